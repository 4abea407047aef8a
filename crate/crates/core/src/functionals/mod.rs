//! Lazily evaluated linear forms on `H`, forming the unital shuffle algebra
//! `Lin(H, K)`: convolution `*`, the half-shuffles `≺` and `≻`, the pre-Lie
//! product `▷` and the convolution inverse.
//!
//! A [`Functional`] is an immutable expression tree. Interior nodes memoize
//! their values per bar-word, so sharing a subexpression shares its cache.
//!
//! Unit conventions: `(f ≺ g)(b)` sums over the full `Δ≺(b)`, letting `f`
//! and `g` take their declared values at `𝟏`. This realizes `e ≺ Ψ = 0`,
//! `e ≻ Ψ = Ψ`, `Ψ ≺ e = Ψ` and `Ψ ≻ e = 0`. Both half-products vanish at `𝟏`
//! itself, so `f ≺ g + f ≻ g = f * g` holds on `H₊` only.

mod table;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, Mutex, Weak};

use num_traits::{One, Zero};

pub use table::{BarTable, CumulantTable, MomentTable, WordTable};

use crate::coalgebra::{self, Split};
use crate::scalar::format_scalar;
use crate::words::{BarWord, Domain, Word};
use crate::{Counterexample, Error, Result, Scalar};

/// A linear form on `H`, evaluated on demand.
#[derive(Clone)]
pub struct Functional(Arc<Node>);

struct Node {
    kind: Kind,
    memo: Option<Mutex<HashMap<BarWord, Scalar>>>,
}

enum Kind {
    Unit,
    Zero,
    Character(Arc<WordTable>),
    Infinitesimal(Arc<WordTable>),
    Linear(Arc<BarTable>),
    Add(Functional, Functional),
    Scale(Scalar, Functional),
    Conv(Functional, Functional),
    HalfLeft(Functional, Functional),
    HalfRight(Functional, Functional),
    PreLie(Functional, Functional),
    Inverse(Functional),
    Series(Series),
    Fixed(Functional),
    SelfRef(Weak<Node>),
}

type Step = Box<dyn Fn(&Functional) -> Functional + Send + Sync>;
type Coefficient = Box<dyn Fn(usize) -> Scalar + Send + Sync>;

/// `Σ_j c_j T_j` with `T_{j+1} = step(T_j)`, where `T_j` vanishes below
/// degree `j + shift`. Terms are built lazily as higher degrees are asked for.
pub(crate) struct Series {
    coefficient: Coefficient,
    step: Step,
    shift: usize,
    terms: Mutex<Vec<(Scalar, Functional)>>,
}

impl Series {
    fn term(&self, j: usize) -> (Scalar, Functional) {
        let mut terms = self.terms.lock().unwrap();
        while terms.len() <= j {
            let next = (self.step)(&terms.last().expect("series has a first term").1);
            let c = (self.coefficient)(terms.len());
            terms.push((c, next));
        }
        terms[j].clone()
    }
}

struct Ctx {
    cached: bool,
    active: HashSet<(usize, BarWord)>,
}

fn check_degree(b: &BarWord, domain: &Domain) -> Result<()> {
    if b.degree() > domain.max_len() {
        return Err(Error::Truncation { degree: b.degree(), max_len: domain.max_len() });
    }
    Ok(())
}

impl Functional {
    fn plain(kind: Kind) -> Self {
        Functional(Arc::new(Node { kind, memo: None }))
    }

    fn memoized(kind: Kind) -> Self {
        Functional(Arc::new(Node { kind, memo: Some(Mutex::default()) }))
    }

    /// The counit `e`: `1` on `𝟏`, `0` on `H₊`.
    pub fn unit() -> Self {
        Self::plain(Kind::Unit)
    }

    pub fn zero() -> Self {
        Self::plain(Kind::Zero)
    }

    /// Multiplicative extension of a moment table: `Φ(w₁|⋯|wₘ) = ∏ Φ(wᵢ)`.
    pub fn character(table: &MomentTable) -> Self {
        Self::plain(Kind::Character(Arc::new((**table).clone())))
    }

    /// Extension of a cumulant table vanishing on `𝟏` and on bar-products.
    pub fn infinitesimal(table: &CumulantTable) -> Self {
        Self::plain(Kind::Infinitesimal(Arc::new((**table).clone())))
    }

    /// An arbitrary linear form given by its values on bar-words.
    pub fn linear(table: BarTable) -> Self {
        Self::plain(Kind::Linear(Arc::new(table)))
    }

    pub fn add(&self, other: &Functional) -> Self {
        Self::plain(Kind::Add(self.clone(), other.clone()))
    }

    pub fn sub(&self, other: &Functional) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-Scalar::one())
    }

    pub fn scale(&self, c: Scalar) -> Self {
        Self::plain(Kind::Scale(c, self.clone()))
    }

    /// `f * g = m(f ⊗ g)Δ`.
    pub fn conv(&self, other: &Functional) -> Self {
        Self::memoized(Kind::Conv(self.clone(), other.clone()))
    }

    /// `f ≺ g`, summed over `Δ≺`.
    pub fn half_left(&self, other: &Functional) -> Self {
        Self::memoized(Kind::HalfLeft(self.clone(), other.clone()))
    }

    /// `f ≻ g`, summed over `Δ≻`.
    pub fn half_right(&self, other: &Functional) -> Self {
        Self::memoized(Kind::HalfRight(self.clone(), other.clone()))
    }

    /// Left pre-Lie product `f ▷ g = f ≻ g − g ≺ f`.
    pub fn prelie(&self, other: &Functional) -> Self {
        Self::memoized(Kind::PreLie(self.clone(), other.clone()))
    }

    /// Convolution inverse. Evaluation fails with [`Error::NotInvertible`]
    /// unless `f(𝟏) = 1`.
    pub fn inverse(&self) -> Self {
        Self::memoized(Kind::Inverse(self.clone()))
    }

    /// The solution `X` of `X = body(X)`. The body must lower degree: the
    /// value of `X` on a bar-word may only depend on values of `X` on
    /// bar-words of smaller degree, otherwise evaluation reports
    /// [`Error::IllFounded`]. The handle passed to `body` must not be
    /// evaluated while `body` runs.
    pub fn fixed_point(body: impl FnOnce(&Functional) -> Functional) -> Self {
        Functional(Arc::new_cyclic(|weak| {
            let this = Functional::plain(Kind::SelfRef(weak.clone()));
            Node { kind: Kind::Fixed(body(&this)), memo: Some(Mutex::default()) }
        }))
    }

    pub(crate) fn series(
        first: Functional,
        shift: usize,
        coefficient: impl Fn(usize) -> Scalar + Send + Sync + 'static,
        step: impl Fn(&Functional) -> Functional + Send + Sync + 'static,
    ) -> Self {
        let c0 = coefficient(0);
        Self::memoized(Kind::Series(Series {
            coefficient: Box::new(coefficient),
            step: Box::new(step),
            shift,
            terms: Mutex::new(vec![(c0, first)]),
        }))
    }

    pub fn eval(&self, b: &BarWord) -> Result<Scalar> {
        self.eval_in(b, &mut Ctx { cached: true, active: HashSet::new() })
    }

    pub fn eval_word(&self, w: &Word) -> Result<Scalar> {
        self.eval(&BarWord::from(w.clone()))
    }

    /// Evaluation that neither reads nor fills any memo table.
    pub fn eval_uncached(&self, b: &BarWord) -> Result<Scalar> {
        self.eval_in(b, &mut Ctx { cached: false, active: HashSet::new() })
    }

    fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    fn eval_in(&self, b: &BarWord, ctx: &mut Ctx) -> Result<Scalar> {
        let memo = if ctx.cached { self.0.memo.as_ref() } else { None };
        if let Some(memo) = memo {
            if let Some(v) = memo.lock().unwrap().get(b) {
                return Ok(v.clone());
            }
        }
        let value = self.compute(b, ctx)?;
        if let Some(memo) = memo {
            memo.lock().unwrap().insert(b.clone(), value.clone());
        }
        Ok(value)
    }

    fn compute(&self, b: &BarWord, ctx: &mut Ctx) -> Result<Scalar> {
        match &self.0.kind {
            Kind::Unit => Ok(if b.is_unit() { Scalar::one() } else { Scalar::zero() }),
            Kind::Zero => Ok(Scalar::zero()),
            Kind::Character(t) => {
                check_degree(b, t.domain())?;
                let mut acc = Scalar::one();
                for w in b.factors() {
                    acc *= t.get(w)?;
                }
                Ok(acc)
            }
            Kind::Infinitesimal(t) => {
                check_degree(b, t.domain())?;
                for w in b.factors() {
                    t.domain().check_word(w)?;
                }
                match b.as_word() {
                    Some(w) => t.get(w).cloned(),
                    None => Ok(Scalar::zero()),
                }
            }
            Kind::Linear(t) => t.get(b),
            Kind::Add(f, g) => Ok(f.eval_in(b, ctx)? + g.eval_in(b, ctx)?),
            Kind::Scale(c, f) => {
                if c.is_zero() {
                    return Ok(Scalar::zero());
                }
                Ok(c * f.eval_in(b, ctx)?)
            }
            Kind::Conv(f, g) => pair_sum(f, g, &coalgebra::cached(b, Split::Full), b, ctx),
            Kind::HalfLeft(f, g) => {
                if b.is_unit() {
                    return Ok(Scalar::zero());
                }
                pair_sum(f, g, &coalgebra::cached(b, Split::Left), b, ctx)
            }
            Kind::HalfRight(f, g) => {
                if b.is_unit() {
                    return Ok(Scalar::zero());
                }
                pair_sum(f, g, &coalgebra::cached(b, Split::Right), b, ctx)
            }
            Kind::PreLie(f, g) => {
                if b.is_unit() {
                    return Ok(Scalar::zero());
                }
                let succ = pair_sum(f, g, &coalgebra::cached(b, Split::Right), b, ctx)?;
                let prec = pair_sum(g, f, &coalgebra::cached(b, Split::Left), b, ctx)?;
                Ok(succ - prec)
            }
            Kind::Inverse(f) => {
                let at_unit = f.eval_in(&BarWord::unit(), ctx)?;
                if !at_unit.is_one() {
                    return Err(Error::NotInvertible(format_scalar(&at_unit)));
                }
                if b.is_unit() {
                    return Ok(Scalar::one());
                }
                // (g * f)(b) = 0 with f(𝟏) = 1 determines g(b) from lower degrees.
                let mut acc = Scalar::zero();
                for (l, r, c) in coalgebra::cached(b, Split::Full).terms() {
                    if r.is_unit() {
                        continue;
                    }
                    let fr = f.eval_in(r, ctx)?;
                    if fr.is_zero() {
                        continue;
                    }
                    acc += self.eval_in(l, ctx)? * fr * Scalar::from_integer((*c).into());
                }
                Ok(-acc)
            }
            Kind::Series(s) => {
                let mut acc = Scalar::zero();
                let mut j = 0;
                while j + s.shift <= b.degree() {
                    let (c, term) = s.term(j);
                    if !c.is_zero() {
                        acc += c * term.eval_in(b, ctx)?;
                    }
                    j += 1;
                }
                Ok(acc)
            }
            Kind::Fixed(body) => {
                let key = (self.node_id(), b.clone());
                if !ctx.active.insert(key.clone()) {
                    return Err(Error::IllFounded(b.clone()));
                }
                let value = body.eval_in(b, ctx);
                ctx.active.remove(&key);
                value
            }
            Kind::SelfRef(weak) => match weak.upgrade() {
                Some(node) => Functional(node).eval_in(b, ctx),
                None => Err(Error::DanglingFixedPoint),
            },
        }
    }

    /// Values on all words of the domain.
    pub fn materialize(&self, domain: &Domain) -> Result<WordTable> {
        WordTable::try_from_fn(domain, |w| self.eval_word(w))
    }

    /// First bar-word among `bar_words` where `self` and `other` differ.
    pub fn first_difference<'a, I>(&self, other: &Functional, bar_words: I) -> Result<Option<Counterexample>>
    where
        I: IntoIterator<Item = &'a BarWord>,
    {
        for b in bar_words {
            let left = self.eval(b)?;
            let right = other.eval(b)?;
            if left != right {
                return Ok(Some(Counterexample { word: b.clone(), left, right }));
            }
        }
        Ok(None)
    }

    /// Number of memoized values held by this node.
    pub fn memo_len(&self) -> usize {
        self.0.memo.as_ref().map_or(0, |m| m.lock().unwrap().len())
    }
}

fn pair_sum(
    f: &Functional,
    g: &Functional,
    terms: &coalgebra::TensorSum,
    _b: &BarWord,
    ctx: &mut Ctx,
) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for (l, r, c) in terms.terms() {
        let fl = f.eval_in(l, ctx)?;
        if fl.is_zero() {
            continue;
        }
        let gr = g.eval_in(r, ctx)?;
        if gr.is_zero() {
            continue;
        }
        acc += fl * gr * Scalar::from_integer((*c).into());
    }
    Ok(acc)
}

impl Add for &Functional {
    type Output = Functional;

    fn add(self, rhs: &Functional) -> Functional {
        Functional::add(self, rhs)
    }
}

impl Sub for &Functional {
    type Output = Functional;

    fn sub(self, rhs: &Functional) -> Functional {
        Functional::sub(self, rhs)
    }
}

impl Neg for &Functional {
    type Output = Functional;

    fn neg(self) -> Functional {
        Functional::neg(self)
    }
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(node: &Functional, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
            if depth > 6 {
                return f.write_str("…");
            }
            let binary = |f: &mut fmt::Formatter<'_>, name: &str, a: &Functional, b: &Functional| {
                write!(f, "{name}(")?;
                go(a, f, depth + 1)?;
                f.write_str(", ")?;
                go(b, f, depth + 1)?;
                f.write_str(")")
            };
            match &node.0.kind {
                Kind::Unit => f.write_str("e"),
                Kind::Zero => f.write_str("0"),
                Kind::Character(_) => f.write_str("Char"),
                Kind::Infinitesimal(_) => f.write_str("Inf"),
                Kind::Linear(_) => f.write_str("Linear"),
                Kind::Add(a, b) => binary(f, "Add", a, b),
                Kind::Scale(c, a) => {
                    write!(f, "Scale({}, ", format_scalar(c))?;
                    go(a, f, depth + 1)?;
                    f.write_str(")")
                }
                Kind::Conv(a, b) => binary(f, "Conv", a, b),
                Kind::HalfLeft(a, b) => binary(f, "HalfLeft", a, b),
                Kind::HalfRight(a, b) => binary(f, "HalfRight", a, b),
                Kind::PreLie(a, b) => binary(f, "PreLie", a, b),
                Kind::Inverse(a) => {
                    f.write_str("Inverse(")?;
                    go(a, f, depth + 1)?;
                    f.write_str(")")
                }
                Kind::Series(_) => f.write_str("Series"),
                Kind::Fixed(body) => {
                    f.write_str("Fix(")?;
                    go(body, f, depth + 1)?;
                    f.write_str(")")
                }
                Kind::SelfRef(_) => f.write_str("self"),
            }
        }
        go(self, f, 0)
    }
}

/// Bar-words with at least two factors, up to the domain's degree.
fn bar_products(domain: &Domain) -> impl Iterator<Item = BarWord> {
    domain.bar_words(domain.max_len()).into_iter().filter(|b| b.factors().len() >= 2)
}

/// First violation of `f(𝟏) = 1`, `f(w|w′) = f(w)f(w′)` on bar-words of
/// degree at most `domain.max_len()`.
pub fn character_defect(f: &Functional, domain: &Domain) -> Result<Option<Counterexample>> {
    let at_unit = f.eval(&BarWord::unit())?;
    if !at_unit.is_one() {
        return Ok(Some(Counterexample { word: BarWord::unit(), left: at_unit, right: Scalar::one() }));
    }
    for b in bar_products(domain) {
        let left = f.eval(&b)?;
        let mut right = Scalar::one();
        for w in b.factors() {
            right *= f.eval_word(w)?;
        }
        if left != right {
            return Ok(Some(Counterexample { word: b, left, right }));
        }
    }
    Ok(None)
}

/// First violation of `f(𝟏) = 0`, `f(w|w′) = 0`.
pub fn infinitesimal_defect(f: &Functional, domain: &Domain) -> Result<Option<Counterexample>> {
    let bar_words = std::iter::once(BarWord::unit()).chain(bar_products(domain));
    for b in bar_words {
        let v = f.eval(&b)?;
        if !v.is_zero() {
            return Ok(Some(Counterexample { word: b, left: v, right: Scalar::zero() }));
        }
    }
    Ok(None)
}

/// Exhaustive character test on all bar-words of degree `≤ domain.max_len()`.
pub fn is_character(f: &Functional, domain: &Domain) -> Result<bool> {
    Ok(character_defect(f, domain)?.is_none())
}

/// Exhaustive infinitesimal-character test on all bar-words of degree
/// `≤ domain.max_len()`.
pub fn is_infinitesimal(f: &Functional, domain: &Domain) -> Result<bool> {
    Ok(infinitesimal_defect(f, domain)?.is_none())
}
