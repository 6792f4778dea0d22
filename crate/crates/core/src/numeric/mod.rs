//! Certified real arithmetic.
//!
//! [`Interval`] values enclose exact reals with dyadic endpoints; all
//! operations round outward at the interval's working precision. Number-theoretic
//! inequalities are decided with [`Interval::compare`], which only answers
//! `CertainlyLess`/`CertainlyGreater` when the enclosures are disjoint.

mod constants;
mod dyadic;
mod elementary;
mod interval;

pub use constants::{
    Constants, ExactDecimal, LOG_WINDOW_FORM1_C, LOG_WINDOW_UPPER_C, MIN_PRIME_COUNT, PRIME_GAP_THRESHOLD,
    SIZE_FLOOR_LOG10_LOG10, SWAP_LOG_RATIO_C, S_WINDOW_LOWER, S_WINDOW_UPPER,
};
pub use dyadic::{parse_decimal, Dyadic, Rounding};
pub use interval::{Interval, IvOrdering};

use thiserror::Error;

/// Default working precision in mantissa bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// Smallest working precision accepted by the command line.
pub const MIN_PRECISION: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("logarithm of a non-positive value")]
    LogDomain,
    #[error("square root of a negative value")]
    SqrtDomain,
    #[error("exponential argument out of range")]
    Overflow,
    #[error("interval bounds out of order")]
    InvalidBounds,
    #[error("cannot parse decimal `{0}`")]
    Parse(String),
}
