//! Exponentials and logarithms for `*`, `≺` and `≻`, the pre-Lie Magnus
//! pair `(Ω′, W′)`, the `#` product and the shuffle adjoint actions.
//!
//! Every series is graded: its `j`-th term vanishes on bar-words of degree
//! below `j`, so evaluation on a bar-word of degree `n` is a finite sum.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::functionals::{character_defect, infinitesimal_defect, CumulantTable, MomentTable};
use crate::scalar::{binomial, factorial};
use crate::words::{BarWord, Domain, Word};
use crate::{Error, Functional, Result, Scalar};

/// An infinitesimal character: vanishes on `𝟏` and on bar-products.
#[derive(Clone, Debug)]
pub struct LieElement(Functional);

/// A character: unital and multiplicative.
#[derive(Clone, Debug)]
pub struct GroupElement(Functional);

impl LieElement {
    pub fn from_table(table: &CumulantTable) -> Self {
        LieElement(Functional::infinitesimal(table))
    }

    pub fn zero() -> Self {
        LieElement(Functional::zero())
    }

    /// Wraps `f` after checking the defining equations exhaustively up to
    /// `domain.max_len()`.
    pub fn new_checked(f: Functional, domain: &Domain) -> Result<Self> {
        match infinitesimal_defect(&f, domain)? {
            Some(c) => Err(Error::NotInfinitesimal(Box::new(c))),
            None => Ok(LieElement(f)),
        }
    }

    pub(crate) fn wrap(f: Functional) -> Self {
        LieElement(f)
    }

    pub fn functional(&self) -> &Functional {
        &self.0
    }

    pub fn add(&self, other: &LieElement) -> Self {
        LieElement(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &LieElement) -> Self {
        LieElement(self.0.sub(&other.0))
    }

    pub fn neg(&self) -> Self {
        LieElement(self.0.neg())
    }

    pub fn scale(&self, c: Scalar) -> Self {
        LieElement(self.0.scale(c))
    }

    /// `self ▷ other`.
    pub fn prelie(&self, other: &LieElement) -> Self {
        LieElement(self.0.prelie(&other.0))
    }

    /// `[self, other] = self * other − other * self`.
    pub fn bracket(&self, other: &LieElement) -> Self {
        LieElement(self.0.conv(&other.0).sub(&other.0.conv(&self.0)))
    }

    pub fn eval_word(&self, w: &Word) -> Result<Scalar> {
        self.0.eval_word(w)
    }

    pub fn materialize(&self, domain: &Domain) -> Result<CumulantTable> {
        self.0.materialize(domain).map(CumulantTable::new)
    }
}

impl GroupElement {
    pub fn from_table(table: &MomentTable) -> Self {
        GroupElement(Functional::character(table))
    }

    pub fn unit() -> Self {
        GroupElement(Functional::unit())
    }

    pub fn new_checked(f: Functional, domain: &Domain) -> Result<Self> {
        match character_defect(&f, domain)? {
            Some(c) => Err(Error::NotCharacter(Box::new(c))),
            None => Ok(GroupElement(f)),
        }
    }

    pub fn functional(&self) -> &Functional {
        &self.0
    }

    pub fn conv(&self, other: &GroupElement) -> Self {
        GroupElement(self.0.conv(&other.0))
    }

    pub fn inverse(&self) -> Self {
        GroupElement(self.0.inverse())
    }

    pub fn eval_word(&self, w: &Word) -> Result<Scalar> {
        self.0.eval_word(w)
    }

    pub fn eval(&self, b: &BarWord) -> Result<Scalar> {
        self.0.eval(b)
    }

    pub fn materialize(&self, domain: &Domain) -> Result<MomentTable> {
        self.0.materialize(domain).map(MomentTable::new)
    }
}

fn inv_factorial(n: usize) -> Scalar {
    Scalar::new(BigInt::one(), factorial(n))
}

/// `exp*(α) = Σ_j α^{*j} / j!`.
pub fn exp_conv(alpha: &LieElement) -> GroupElement {
    let a = alpha.0.clone();
    GroupElement(Functional::series(Functional::unit(), 0, inv_factorial, move |t| t.conv(&a)))
}

/// `log*(e + x) = Σ_{l≥1} (−1)^{l−1} x^{*l} / l`.
pub fn log_conv(phi: &GroupElement) -> LieElement {
    let x = phi.0.sub(&Functional::unit());
    let step = x.clone();
    LieElement(Functional::series(
        x,
        1,
        |j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            Scalar::new(sign.into(), (j as i64 + 1).into())
        },
        move |t| t.conv(&step),
    ))
}

/// `E≺(α)`, the solution of `X = e + α ≺ X`.
pub fn exp_left(alpha: &LieElement) -> GroupElement {
    GroupElement(Functional::fixed_point(|x| Functional::unit().add(&alpha.0.half_left(x))))
}

/// `E≻(α)`, the solution of `Y = e + Y ≻ α`.
pub fn exp_right(alpha: &LieElement) -> GroupElement {
    GroupElement(Functional::fixed_point(|y| Functional::unit().add(&y.half_right(&alpha.0))))
}

/// `L≺(Φ) = (Φ − e) ≺ Φ^{*−1}`, inverse to [`exp_left`].
pub fn log_left(phi: &GroupElement) -> LieElement {
    LieElement(phi.0.sub(&Functional::unit()).half_left(&phi.0.inverse()))
}

/// `L≻(Φ) = Φ^{*−1} ≻ (Φ − e)`, inverse to [`exp_right`].
pub fn log_right(phi: &GroupElement) -> LieElement {
    LieElement(phi.0.inverse().half_right(&phi.0.sub(&Functional::unit())))
}

/// Bernoulli numbers `B_0 … B_n` with `B_1 = −1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Scalar> {
    static CACHE: OnceLock<RwLock<Vec<Scalar>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(vec![Scalar::one()]));
    {
        let known = cache.read().unwrap();
        if known.len() > n {
            return known[..=n].to_vec();
        }
    }
    let mut known = cache.write().unwrap();
    while known.len() <= n {
        let m = known.len();
        let sum = (0..m).fold(Scalar::zero(), |acc, k| acc + Scalar::from_integer(binomial(m + 1, k)) * &known[k]);
        known.push(-sum / Scalar::from_integer(BigInt::from(m + 1)));
    }
    known[..=n].to_vec()
}

fn bernoulli(m: usize) -> Scalar {
    bernoulli_numbers(m).pop().expect("nonempty")
}

/// Pre-Lie Magnus expansion `Ω′(α) = Σ_m (b_m / m!) L^{(m)}_{Ω′(α)▷}(α)`,
/// the element with `exp*(Ω′(α)) = E≺(α)`.
pub fn magnus(alpha: &LieElement) -> LieElement {
    LieElement(Functional::fixed_point(|omega| {
        let omega = omega.clone();
        Functional::series(alpha.0.clone(), 1, |m| bernoulli(m) * inv_factorial(m), move |t| omega.prelie(t))
    }))
}

/// `W′(α) = Σ_m L^{(m)}_{α▷}(α) / (m+1)!`, the compositional inverse of
/// [`magnus`].
pub fn magnus_inverse(alpha: &LieElement) -> LieElement {
    let a = alpha.0.clone();
    LieElement(Functional::series(alpha.0.clone(), 1, |m| inv_factorial(m + 1), move |t| a.prelie(t)))
}

/// `a # b = a + E≺(a) ≻ b ≺ E≺(a)^{*−1}`, so that `E≺(a) * E≺(b) = E≺(a # b)`.
pub fn sharp(a: &LieElement, b: &LieElement) -> LieElement {
    a.add(&ad_upper(a, b))
}

/// `log*(exp*(x) * exp*(y))`.
pub fn bch(x: &LieElement, y: &LieElement) -> LieElement {
    log_conv(&exp_conv(x).conv(&exp_conv(y)))
}

/// `y^x = Ad_x(y) = E≺(x)^{*−1} ≻ y ≺ E≺(x)`.
pub fn ad_lower(x: &LieElement, y: &LieElement) -> LieElement {
    let e = exp_left(x).0;
    LieElement(e.inverse().half_right(&y.0.half_left(&e)))
}

/// `y_x = Ad^x(y) = E≺(x) ≻ y ≺ E≺(x)^{*−1}`, inverse to [`ad_lower`].
pub fn ad_upper(x: &LieElement, y: &LieElement) -> LieElement {
    let e = exp_left(x).0;
    LieElement(e.half_right(&y.0.half_left(&e.inverse())))
}

/// Two factors of a group element together with the product they were
/// checked against.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub product: GroupElement,
    pub first: GroupElement,
    pub second: GroupElement,
}

fn checked(
    identity: &str,
    product: GroupElement,
    first: GroupElement,
    second: GroupElement,
    domain: &Domain,
) -> Result<Factorization> {
    let joined = first.conv(&second);
    let words = domain.bar_words(domain.max_len());
    match product.0.first_difference(&joined.0, &words)? {
        Some(counterexample) => {
            Err(Error::IdentityFailed { identity: identity.to_string(), counterexample: Box::new(counterexample) })
        }
        None => Ok(Factorization { product, first, second }),
    }
}

/// `E≺(x + y) = E≺(x) * E≺(Ad_x(y))`, verified on all bar-words of the domain.
pub fn factorize_left(x: &LieElement, y: &LieElement, domain: &Domain) -> Result<Factorization> {
    checked("factorize-left", exp_left(&x.add(y)), exp_left(x), exp_left(&ad_lower(x, y)), domain)
}

/// `E≻(x + y) = E≻(Ad_{−y}(x)) * E≻(y)`, verified on all bar-words of the domain.
pub fn factorize_right(x: &LieElement, y: &LieElement, domain: &Domain) -> Result<Factorization> {
    checked("factorize-right", exp_right(&x.add(y)), exp_right(&ad_lower(&y.neg(), x)), exp_right(y), domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn univariate(values: &[Scalar]) -> (Domain, CumulantTable) {
        let d = Domain::univariate("a", values.len()).unwrap();
        let t = CumulantTable::from_fn(&d, |w| values[w.len() - 1].clone());
        (d, t)
    }

    fn word(n: usize) -> Word {
        Word::parse(&vec!["a"; n].join(".")).unwrap()
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(6);
        assert_eq!(
            b,
            vec![ratio(1, 1), ratio(-1, 2), ratio(1, 6), ratio(0, 1), ratio(-1, 30), ratio(0, 1), ratio(1, 42)]
        );
    }

    #[test]
    fn degree_two_expansions() {
        let (_, t) = univariate(&[ratio(2, 3), ratio(-5, 7)]);
        let alpha = LieElement::from_table(&t);
        let (h1, h2) = (ratio(2, 3), ratio(-5, 7));
        let sq = &h1 * &h1;
        assert_eq!(exp_conv(&alpha).eval_word(&word(2)).unwrap(), &h2 + &sq);
        assert_eq!(exp_left(&alpha).eval_word(&word(2)).unwrap(), &h2 + &sq);
        assert_eq!(exp_right(&alpha).eval_word(&word(2)).unwrap(), &h2 + &sq);
        let half = alpha.prelie(&alpha).eval_word(&word(2)).unwrap() * ratio(1, 2);
        assert_eq!(magnus(&alpha).eval_word(&word(2)).unwrap(), &h2 - half);
        assert_eq!(magnus(&alpha).eval_word(&word(1)).unwrap(), h1);
    }

    #[test]
    fn log_left_degree_two() {
        let d = Domain::univariate("a", 2).unwrap();
        let phi = GroupElement::from_table(&MomentTable::from_fn(&d, |w| ratio(w.len() as i64 + 2, 3)));
        let (m1, m2) = (ratio(1, 1), ratio(4, 3));
        assert_eq!(log_left(&phi).eval_word(&word(1)).unwrap(), m1);
        assert_eq!(log_left(&phi).eval_word(&word(2)).unwrap(), &m2 - &m1 * &m1);
        assert_eq!(log_right(&phi).eval_word(&word(2)).unwrap(), &m2 - &m1 * &m1);
        assert_eq!(log_conv(&phi).eval_word(&word(2)).unwrap(), &m2 - &m1 * &m1);
    }

    #[test]
    fn zero_arguments() {
        let d = Domain::univariate("a", 3).unwrap();
        let zero = LieElement::zero();
        for b in d.bar_words(3) {
            let e = Functional::unit().eval(&b).unwrap();
            assert_eq!(exp_conv(&zero).eval(&b).unwrap(), e);
            assert_eq!(exp_left(&zero).eval(&b).unwrap(), e);
            assert_eq!(exp_right(&zero).eval(&b).unwrap(), e);
            assert!(log_left(&GroupElement::unit()).functional().eval(&b).unwrap().is_zero());
        }
    }

    #[test]
    fn left_inverse_is_right_exponential_of_negative() {
        let (d, t) = univariate(&[ratio(1, 2), ratio(-3, 4), ratio(5, 6), ratio(7, 8)]);
        let alpha = LieElement::from_table(&t);
        let lhs = exp_left(&alpha).inverse();
        let rhs = exp_right(&alpha.neg());
        assert!(lhs.functional().first_difference(rhs.functional(), &d.bar_words(4)).unwrap().is_none());
    }

    #[test]
    fn checked_wrappers() {
        let (d, t) = univariate(&[ratio(1, 2), ratio(1, 3)]);
        let alpha = LieElement::from_table(&t);
        assert!(LieElement::new_checked(alpha.prelie(&alpha).functional().clone(), &d).is_ok());
        assert!(matches!(
            LieElement::new_checked(exp_conv(&alpha).functional().clone(), &d),
            Err(Error::NotInfinitesimal(_))
        ));
        assert!(GroupElement::new_checked(exp_left(&alpha).functional().clone(), &d).is_ok());
        assert!(matches!(GroupElement::new_checked(alpha.functional().clone(), &d), Err(Error::NotCharacter(_))));
    }

    #[test]
    fn factorizations_with_zero() {
        let (d, t) = univariate(&[ratio(1, 2), ratio(1, 3), ratio(-1, 5)]);
        let x = LieElement::from_table(&t);
        assert!(factorize_left(&x, &LieElement::zero(), &d).is_ok());
        assert!(factorize_right(&x, &LieElement::zero(), &d).is_ok());
    }
}
