use std::collections::HashMap;
use std::ops::Deref;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::scalar::{format_scalar, parse_scalar};
use crate::words::{Alphabet, BarWord, Domain, Word};
use crate::{Error, Result, Scalar};

/// A total map from the words of a [`Domain`] to scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordTable {
    domain: Domain,
    values: HashMap<Word, Scalar>,
}

impl WordTable {
    /// Requires exactly one value for every word of the domain.
    pub fn new(domain: Domain, values: HashMap<Word, Scalar>) -> Result<Self> {
        for w in values.keys() {
            domain.check_word(w)?;
        }
        if let Some(missing) = domain.words().into_iter().find(|w| !values.contains_key(w)) {
            return Err(Error::MissingEntry(missing.dotted()));
        }
        Ok(WordTable { domain, values })
    }

    pub fn from_fn(domain: &Domain, mut f: impl FnMut(&Word) -> Scalar) -> Self {
        let values = domain
            .words()
            .into_iter()
            .map(|w| {
                let v = f(&w);
                (w, v)
            })
            .collect();
        WordTable { domain: domain.clone(), values }
    }

    pub fn try_from_fn(domain: &Domain, mut f: impl FnMut(&Word) -> Result<Scalar>) -> Result<Self> {
        let mut values = HashMap::new();
        for w in domain.words() {
            let v = f(&w)?;
            values.insert(w, v);
        }
        Ok(WordTable { domain: domain.clone(), values })
    }

    pub fn zero(domain: &Domain) -> Self {
        Self::from_fn(domain, |_| Scalar::zero())
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn get(&self, w: &Word) -> Result<&Scalar> {
        self.domain.check_word(w)?;
        self.values.get(w).ok_or_else(|| Error::MissingEntry(w.dotted()))
    }

    /// Entries by word length, then alphabet order.
    pub fn entries(&self) -> Vec<(Word, Scalar)> {
        self.domain
            .words()
            .into_iter()
            .map(|w| {
                let v = self.values[&w].clone();
                (w, v)
            })
            .collect()
    }

    /// Restriction to a smaller truncation degree.
    pub fn truncate(&self, max_len: usize) -> Result<Self> {
        if max_len > self.domain.max_len() {
            return Err(Error::Truncation { degree: max_len, max_len: self.domain.max_len() });
        }
        let domain = self.domain.with_max_len(max_len)?;
        let values = self.values.iter().filter(|(w, _)| w.len() <= max_len);
        Ok(WordTable { domain, values: values.map(|(w, v)| (w.clone(), v.clone())).collect() })
    }

    /// Pointwise combination. Tables on the same alphabet but different
    /// truncation degrees are combined on the smaller one, with a warning.
    pub fn zip_with(&self, other: &WordTable, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Self> {
        if self.domain.alphabet() != other.domain.alphabet() {
            return Err(Error::Mismatch(format!(
                "alphabets {:?} and {:?} differ",
                self.domain.alphabet(),
                other.domain.alphabet()
            )));
        }
        let n = self.domain.max_len().min(other.domain.max_len());
        if self.domain.max_len() != other.domain.max_len() {
            log::warn!(
                "combining tables truncated at {} and {}; keeping degree {n}",
                self.domain.max_len(),
                other.domain.max_len()
            );
        }
        let domain = self.domain.with_max_len(n)?;
        Ok(Self::from_fn(&domain, |w| f(&self.values[w], &other.values[w])))
    }

    pub fn add(&self, other: &WordTable) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        WordTable { domain: self.domain.clone(), values: self.values.iter().map(|(w, v)| (w.clone(), v * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::from_integer(1.into()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Pretty JSON with words in canonical order; byte-stable.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    alphabet: Vec<String>,
    max_len: usize,
    values: Map<String, Value>,
}

impl Serialize for WordTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let values = self.entries().into_iter().map(|(w, v)| (w.dotted(), Value::String(format_scalar(&v)))).collect();
        TableRepr { alphabet: self.domain.alphabet().names(), max_len: self.domain.max_len(), values }
            .serialize(serializer)
    }
}

fn scalar_from_json(value: &Value) -> Result<Scalar> {
    match value {
        Value::String(s) => parse_scalar(s),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => Ok(Scalar::from_integer(i.into())),
            (_, Some(u)) => Ok(Scalar::from_integer(u.into())),
            _ => Err(Error::Scalar(n.to_string())),
        },
        other => Err(Error::Scalar(other.to_string())),
    }
}

impl WordTable {
    fn from_repr(repr: TableRepr) -> Result<Self> {
        let domain = Domain::new(Alphabet::new(&repr.alphabet)?, repr.max_len)?;
        let mut values = HashMap::new();
        for (key, value) in &repr.values {
            let w = Word::parse(key)?;
            if values.insert(w, scalar_from_json(value)?).is_some() {
                return Err(Error::Mismatch(format!("duplicate word {key}")));
            }
        }
        WordTable::new(domain, values)
    }
}

impl<'de> Deserialize<'de> for WordTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = TableRepr::deserialize(deserializer)?;
        WordTable::from_repr(repr).map_err(serde::de::Error::custom)
    }
}

macro_rules! table_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(WordTable);

        impl $name {
            pub fn new(table: WordTable) -> Self {
                $name(table)
            }

            pub fn from_fn(domain: &Domain, f: impl FnMut(&Word) -> Scalar) -> Self {
                $name(WordTable::from_fn(domain, f))
            }

            pub fn into_table(self) -> WordTable {
                self.0
            }

            pub fn from_json(text: &str) -> Result<Self> {
                WordTable::from_json(text).map($name)
            }
        }

        impl Deref for $name {
            type Target = WordTable;

            fn deref(&self) -> &WordTable {
                &self.0
            }
        }

        impl From<WordTable> for $name {
            fn from(table: WordTable) -> Self {
                $name(table)
            }
        }
    };
}

table_newtype!(
    /// Moments `Φ(w) = φ(a₁⋯aₙ)` of a state; extended multiplicatively to a
    /// character on bar-words.
    MomentTable
);

table_newtype!(
    /// Word values of an infinitesimal character (free, boolean, monotone or
    /// c-free cumulants).
    CumulantTable
);

impl MomentTable {
    /// The state with vanishing moments on all nonempty words, i.e. the
    /// counit `e` seen as a character.
    pub fn unit_state(domain: &Domain) -> Self {
        MomentTable(WordTable::zero(domain))
    }
}

impl CumulantTable {
    pub fn zero(domain: &Domain) -> Self {
        CumulantTable(WordTable::zero(domain))
    }

    pub fn add(&self, other: &CumulantTable) -> Result<Self> {
        self.0.add(&other.0).map(CumulantTable)
    }

    pub fn neg(&self) -> Self {
        CumulantTable(self.0.neg())
    }
}

/// Values of an arbitrary linear form on the bar-words of degree at most
/// `domain.max_len()`. Absent bar-words have value zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarTable {
    domain: Domain,
    values: HashMap<BarWord, Scalar>,
}

impl BarTable {
    pub fn new(domain: Domain, values: HashMap<BarWord, Scalar>) -> Result<Self> {
        for b in values.keys() {
            for w in b.factors() {
                domain.check_word(w)?;
            }
            if b.degree() > domain.max_len() {
                return Err(Error::Truncation { degree: b.degree(), max_len: domain.max_len() });
            }
        }
        Ok(BarTable { domain, values })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn get(&self, b: &BarWord) -> Result<Scalar> {
        if b.degree() > self.domain.max_len() {
            return Err(Error::Truncation { degree: b.degree(), max_len: self.domain.max_len() });
        }
        for w in b.factors() {
            if let Some(l) = w.letters().iter().find(|l| !self.domain.alphabet().contains(**l)) {
                return Err(Error::UnknownLetter(l.name().to_string()));
            }
        }
        Ok(self.values.get(b).cloned().unwrap_or_else(Scalar::zero))
    }
}
