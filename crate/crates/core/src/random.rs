//! Seeded random rational tables. Every scalar is `p/q` with `p` uniform in
//! `[−9, 9]` and `q` uniform in `[1, 9]`; draws follow the canonical word
//! order, so a seed and a domain determine the table.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::functionals::{BarTable, CumulantTable, MomentTable, WordTable};
use crate::scalar::ratio;
use crate::words::{BarWord, Domain};
use crate::Scalar;

pub struct TableRng(ChaCha8Rng);

impl TableRng {
    pub fn new(seed: u64) -> Self {
        TableRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn scalar(&mut self) -> Scalar {
        let num = self.0.random_range(-9..=9);
        let den = self.0.random_range(1..=9);
        ratio(num, den)
    }

    pub fn word_table(&mut self, domain: &Domain) -> WordTable {
        WordTable::from_fn(domain, |_| self.scalar())
    }

    pub fn moments(&mut self, domain: &Domain) -> MomentTable {
        MomentTable::new(self.word_table(domain))
    }

    pub fn cumulants(&mut self, domain: &Domain) -> CumulantTable {
        CumulantTable::new(self.word_table(domain))
    }

    /// A general linear form: random values on every bar-word of the
    /// domain, with `unit` prescribed at `𝟏`.
    pub fn bar_table(&mut self, domain: &Domain, unit: Scalar) -> BarTable {
        let mut values = HashMap::new();
        for b in domain.bar_words(domain.max_len()) {
            let v = if b.is_unit() { unit.clone() } else { self.scalar() };
            values.insert(b, v);
        }
        values.insert(BarWord::unit(), unit);
        BarTable::new(domain.clone(), values).expect("bar-words come from the domain")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;
    use num_traits::Signed;

    #[test]
    fn seeded_and_bounded() {
        let d = Domain::new(Alphabet::new(&["a", "b"]).unwrap(), 3).unwrap();
        assert_eq!(TableRng::new(7).word_table(&d), TableRng::new(7).word_table(&d));
        assert_ne!(TableRng::new(7).word_table(&d), TableRng::new(8).word_table(&d));
        let mut rng = TableRng::new(1);
        for _ in 0..500 {
            let s = rng.scalar();
            assert!(s.numer().abs() <= 9.into() && s.denom() <= &9.into());
        }
    }
}
