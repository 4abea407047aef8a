use std::fmt;

use crate::{BarWord, Scalar};

pub type Result<T> = std::result::Result<T, Error>;

/// A bar-word on which two sides of an identity disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub word: BarWord,
    pub left: Scalar,
    pub right: Scalar,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "word={} left={} right={}",
            self.word,
            crate::format_scalar(&self.left),
            crate::format_scalar(&self.right)
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("position {index} out of range for a word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("index set is not strictly increasing: {0:?}")]
    NotIncreasing(Vec<usize>),

    #[error("index set {inner:?} is not contained in {outer:?}")]
    NotSubset { inner: Vec<usize>, outer: Vec<usize> },

    #[error("words must contain at least one letter")]
    EmptyWord,

    #[error("invalid letter name {0:?}")]
    InvalidLetter(String),

    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(String),

    #[error("half-coproducts are not defined on the empty bar-word")]
    UnitSplit,

    #[error("degree {degree} exceeds the truncation degree {max_len}")]
    Truncation { degree: usize, max_len: usize },

    #[error("truncation degree {0} outside the supported range 1..=12")]
    TruncationRange(usize),

    #[error("functional is not invertible: its value at the unit is {0}, expected 1")]
    NotInvertible(String),

    #[error("not an infinitesimal character: {0}")]
    NotInfinitesimal(Box<Counterexample>),

    #[error("not a character: {0}")]
    NotCharacter(Box<Counterexample>),

    #[error("identity {identity} fails: {counterexample}")]
    IdentityFailed { identity: String, counterexample: Box<Counterexample> },

    #[error("fixed point is not well founded at {0}")]
    IllFounded(BarWord),

    #[error("fixed point evaluated before construction finished")]
    DanglingFixedPoint,

    #[error("table is missing a value for word {0}")]
    MissingEntry(String),

    #[error("incompatible inputs: {0}")]
    Mismatch(String),

    #[error("partition order {0} outside the supported range 1..=14")]
    PartitionOrder(usize),

    #[error("partition {0} is not a valid set partition")]
    InvalidPartition(String),

    #[error("partition {0} has crossing blocks")]
    Crossing(String),

    #[error("cannot parse scalar {0:?}")]
    Scalar(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
