//! Exact shuffle-algebra calculus on the double tensor algebra `H = T(T₊(A))`.
//!
//! The crate evaluates linear forms on bar-words `w₁|⋯|wₘ` built from moment
//! and cumulant tables, the convolution product and its two half-shuffle
//! pieces, the three exponential/logarithm pairs, the pre-Lie Magnus
//! expansion and the shuffle adjoint actions. On top of that engine it
//! computes free, boolean, monotone and conditionally free cumulants, and
//! the corresponding additive convolutions, in exact rational arithmetic.
//!
//! Every closed moment-cumulant formula also has an independent
//! non-crossing-partition evaluator in [`partitions`], so the two engines can
//! be compared word by word.
//!
//! ```
//! use cfree::{cumulants, parse_scalar, Domain, MomentTable, Word};
//!
//! let domain = Domain::univariate("a", 3).unwrap();
//! // moments of a standard semicircle: 0, 1, 0
//! let phi = MomentTable::from_fn(&domain, |w| match w.len() {
//!     2 => parse_scalar("1").unwrap(),
//!     _ => parse_scalar("0").unwrap(),
//! });
//! let kappa = cumulants::free_cumulants(&phi).unwrap();
//! assert_eq!(kappa.get(&Word::parse("a.a").unwrap()).unwrap(), &parse_scalar("1").unwrap());
//! assert_eq!(kappa.get(&Word::parse("a.a.a").unwrap()).unwrap(), &parse_scalar("0").unwrap());
//! ```

pub mod cli;
pub mod coalgebra;
pub mod cumulants;
mod error;
pub mod functionals;
pub mod partitions;
pub mod random;
mod scalar;
pub mod series;
pub mod verify;
pub mod words;

pub use error::{Counterexample, Error, Result};
pub use functionals::{BarTable, CumulantTable, Functional, MomentTable, WordTable};
pub use scalar::{format_scalar, parse_scalar, Scalar};
pub use series::{GroupElement, LieElement};
pub use words::{Alphabet, BarWord, Domain, Letter, Word};

/// Largest truncation degree accepted by tables and CLI runs.
pub const MAX_TRUNCATION: usize = 12;
