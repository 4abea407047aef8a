//! The coproduct `Δ(a₁⋯aₙ) = Σ_{S⊆[n]} a_S ⊗ a_{J^S_{[n]}}`, its splitting
//! into the half-coproducts `Δ≺` (position 1 extracted) and `Δ≻` (position 1
//! left behind), the reduced variants, and the multiplicative extension to
//! bar-words.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::words::{BarWord, Word};
use crate::{Error, Result};

/// Which part of the coproduct to take on the first factor of a bar-word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Split {
    Full,
    Left,
    Right,
}

/// A normalized formal sum `Σ c · (left ⊗ right)` with integer coefficients:
/// no repeated pairs, no zero coefficients, terms sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorSum {
    terms: Vec<(BarWord, BarWord, i64)>,
}

impl TensorSum {
    pub fn from_terms<I: IntoIterator<Item = (BarWord, BarWord, i64)>>(terms: I) -> Self {
        let mut merged: HashMap<(BarWord, BarWord), i64> = HashMap::new();
        for (l, r, c) in terms {
            *merged.entry((l, r)).or_insert(0) += c;
        }
        let mut terms: Vec<_> = merged.into_iter().filter(|(_, c)| *c != 0).map(|((l, r), c)| (l, r, c)).collect();
        terms.sort();
        TensorSum { terms }
    }

    pub fn terms(&self) -> &[(BarWord, BarWord, i64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, left: &BarWord, right: &BarWord) -> i64 {
        self.terms.iter().find(|(l, r, _)| l == left && r == right).map_or(0, |t| t.2)
    }

    /// Sum of all coefficients (the number of subsets before merging).
    pub fn total_weight(&self) -> i64 {
        self.terms.iter().map(|t| t.2).sum()
    }

    pub fn add(&self, other: &TensorSum) -> TensorSum {
        TensorSum::from_terms(self.terms.iter().chain(&other.terms).cloned())
    }

    fn minus(&self, left: &BarWord, right: &BarWord) -> TensorSum {
        TensorSum::from_terms(self.terms.iter().cloned().chain([(left.clone(), right.clone(), -1)]))
    }

    /// Product in `H ⊗ H`: bar-concatenation on each leg.
    pub fn mul(&self, other: &TensorSum) -> TensorSum {
        TensorSum::from_terms(self.terms.iter().flat_map(|(l1, r1, c1)| {
            other.terms.iter().map(move |(l2, r2, c2)| (l1.concat(l2), r1.concat(r2), c1 * c2))
        }))
    }

    /// `(left-barword, right-barword, coeff)` triples, sorted by their text
    /// form so the dump does not depend on interning order.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Term<'a>(&'a BarWord, &'a BarWord, i64);
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(l, r, _)| (l.to_string(), r.to_string()));
        serde_json::to_value(terms.into_iter().map(|(l, r, c)| Term(l, r, *c)).collect::<Vec<_>>())
            .expect("tensor sums serialize")
    }
}

impl fmt::Display for TensorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(l, r, c)| match c {
                1 => format!("{l}⊗{r}"),
                c => format!("{c}·{l}⊗{r}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

fn word_part(w: &Word, split: Split) -> TensorSum {
    let letters = w.letters();
    let n = letters.len();
    let mut terms = Vec::with_capacity(1 << n);
    for mask in 0u32..1 << n {
        let first_extracted = mask & 1 == 1;
        match split {
            Split::Left if !first_extracted => continue,
            Split::Right if first_extracted => continue,
            _ => {}
        }
        let mut extracted = Vec::new();
        let mut rest = BarWord::unit();
        let mut run = Vec::new();
        for (i, &l) in letters.iter().enumerate() {
            if mask >> i & 1 == 1 {
                extracted.push(l);
                if !run.is_empty() {
                    rest.push(Word::from_letters(std::mem::take(&mut run)));
                }
            } else {
                run.push(l);
            }
        }
        if !run.is_empty() {
            rest.push(Word::from_letters(run));
        }
        let left = if extracted.is_empty() { BarWord::unit() } else { BarWord::from(Word::from_letters(extracted)) };
        terms.push((left, rest, 1));
    }
    TensorSum::from_terms(terms)
}

fn unit_tensor() -> TensorSum {
    TensorSum { terms: vec![(BarWord::unit(), BarWord::unit(), 1)] }
}

fn compute(b: &BarWord, split: Split) -> TensorSum {
    let mut factors = b.factors().iter();
    let mut acc = match factors.next() {
        None => unit_tensor(),
        Some(first) => word_part(first, split),
    };
    for w in factors {
        acc = acc.mul(&word_part(w, Split::Full));
    }
    acc
}

const CACHE_LIMIT: usize = 1 << 16;

type Cache = Mutex<HashMap<(BarWord, Split), Arc<TensorSum>>>;

/// Memoized coproduct pieces for the evaluation engine. The cache is
/// cleared wholesale once it holds `CACHE_LIMIT` entries.
pub(crate) fn cached(b: &BarWord, split: Split) -> Arc<TensorSum> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (b.clone(), split);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let value = Arc::new(compute(b, split));
    let mut guard = cache.lock().unwrap();
    if guard.len() >= CACHE_LIMIT {
        guard.clear();
    }
    guard.insert(key, value.clone());
    value
}

/// `Δ(w)` for a single word: `2^{|w|}` subsets before merging.
pub fn coproduct_word(w: &Word) -> TensorSum {
    word_part(w, Split::Full)
}

/// `Δ(w₁|⋯|wₘ) = Δ(w₁)⋯Δ(wₘ)`, with `Δ(𝟏) = 𝟏⊗𝟏`.
pub fn coproduct(b: &BarWord) -> TensorSum {
    compute(b, Split::Full)
}

fn require_nonunit(b: &BarWord) -> Result<()> {
    if b.is_unit() {
        Err(Error::UnitSplit)
    } else {
        Ok(())
    }
}

/// `Δ≺(w₁|⋯|wₘ) = Δ≺(w₁)Δ(w₂)⋯Δ(wₘ)`.
pub fn half_coproduct_left(b: &BarWord) -> Result<TensorSum> {
    require_nonunit(b)?;
    Ok(compute(b, Split::Left))
}

/// `Δ≻(w₁|⋯|wₘ) = Δ≻(w₁)Δ(w₂)⋯Δ(wₘ)`.
pub fn half_coproduct_right(b: &BarWord) -> Result<TensorSum> {
    require_nonunit(b)?;
    Ok(compute(b, Split::Right))
}

/// `Δ⁺(b) = Δ(b) − b⊗𝟏 − 𝟏⊗b`.
pub fn reduced_coproduct(b: &BarWord) -> Result<TensorSum> {
    require_nonunit(b)?;
    Ok(coproduct(b).minus(b, &BarWord::unit()).minus(&BarWord::unit(), b))
}

/// `Δ⁺≺(b) = Δ≺(b) − b⊗𝟏`.
pub fn reduced_half_left(b: &BarWord) -> Result<TensorSum> {
    Ok(half_coproduct_left(b)?.minus(b, &BarWord::unit()))
}

/// `Δ⁺≻(b) = Δ≻(b) − 𝟏⊗b`.
pub fn reduced_half_right(b: &BarWord) -> Result<TensorSum> {
    Ok(half_coproduct_right(b)?.minus(&BarWord::unit(), b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bar(s: &str) -> BarWord {
        BarWord::parse(s).unwrap()
    }

    fn sum(terms: &[(&str, &str)]) -> TensorSum {
        TensorSum::from_terms(terms.iter().map(|(l, r)| (bar(l), bar(r), 1)))
    }

    #[test]
    fn single_letter() {
        let a = Word::parse("a").unwrap();
        assert_eq!(coproduct_word(&a), sum(&[("a", "1"), ("1", "a")]));
        assert_eq!(half_coproduct_left(&bar("a")).unwrap(), sum(&[("a", "1")]));
        assert_eq!(half_coproduct_right(&bar("a")).unwrap(), sum(&[("1", "a")]));
        assert!(reduced_coproduct(&bar("a")).unwrap().is_empty());
    }

    #[test]
    fn length_two() {
        let w = Word::parse("a1.a2").unwrap();
        assert_eq!(coproduct_word(&w), sum(&[("a1.a2", "1"), ("1", "a1.a2"), ("a1", "a2"), ("a2", "a1")]));
        assert_eq!(coproduct(&BarWord::from(w.clone())), coproduct_word(&w));
        assert_eq!(reduced_half_left(&bar("a1.a2")).unwrap(), sum(&[("a1", "a2")]));
        assert_eq!(reduced_half_right(&bar("a1.a2")).unwrap(), sum(&[("a2", "a1")]));
    }

    #[test]
    fn bar_product_by_hand() {
        assert_eq!(coproduct(&BarWord::unit()), sum(&[("1", "1")]));
        assert_eq!(coproduct(&bar("a|b")), sum(&[("a|b", "1"), ("a", "b"), ("b", "a"), ("1", "a|b")]));
    }

    #[test]
    fn repeated_letters_merge() {
        let delta = coproduct(&bar("a.a"));
        assert_eq!(delta.coefficient(&bar("a"), &bar("a")), 2);
        assert_eq!(delta.total_weight(), 4);
    }

    #[test]
    fn unit_split_is_rejected() {
        assert!(matches!(half_coproduct_left(&BarWord::unit()), Err(Error::UnitSplit)));
        assert!(matches!(reduced_half_right(&BarWord::unit()), Err(Error::UnitSplit)));
        assert!(matches!(reduced_coproduct(&BarWord::unit()), Err(Error::UnitSplit)));
    }

    #[test]
    fn json_dump() {
        let dump = coproduct(&bar("a|b")).to_json().to_string();
        assert_eq!(dump, r#"[[[],[["a"],["b"]],1],[[["a"]],[["b"]],1],[[["a"],["b"]],[],1],[[["b"]],[["a"]],1]]"#);
    }
}
