//! Mathematical constants and the decimal thresholds of the counterexample
//! conditions, kept exactly as written.

use num_rational::BigRational;
use serde::Serialize;

use super::dyadic::{parse_decimal, Dyadic};
use super::Interval;

/// Euler–Mascheroni constant, 250 decimals (truncated).
const GAMMA_DIGITS: &str = "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495146314472498070824809605040144865428362241739976449235362535003337429373377376739427925952582470949160087352039481656708532331517766115286211995015079";
const GAMMA_RADIUS: &str = "2e-250";

/// A decimal constant stored as its literal text; converted to an exact
/// rational or an outward-rounded enclosure on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ExactDecimal(&'static str);

impl ExactDecimal {
    pub const fn new(text: &'static str) -> Self {
        ExactDecimal(text)
    }

    pub fn as_str(&self) -> &'static str {
        self.0
    }

    pub fn to_rational(&self) -> BigRational {
        parse_decimal(self.0).expect("constant literal parses")
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        Interval::from_rational(&self.to_rational(), prec)
    }
}

/// `log10 log10 n` must exceed this for the least counterexample.
pub const SIZE_FLOOR_LOG10_LOG10: ExactDecimal = ExactDecimal::new("13.099");
/// Upper log-window slack: `log n <= p_r (1 + c / log p_r)`.
pub const LOG_WINDOW_UPPER_C: ExactDecimal = ExactDecimal::new("0.005589");
/// Slack in the alternative form `p_r <= log N (1 - c / log log N)`.
pub const LOG_WINDOW_FORM1_C: ExactDecimal = ExactDecimal::new("0.005587");
/// Bound `log n <= c p_r` used by the swap reduction argument.
pub const SWAP_LOG_RATIO_C: ExactDecimal = ExactDecimal::new("1.000235");
/// Upper edge of the window for the last prime with exponent other than one.
pub const S_WINDOW_UPPER: ExactDecimal = ExactDecimal::new("1.414342");
/// Lower edge of the same window.
pub const S_WINDOW_LOWER: ExactDecimal = ExactDecimal::new("0.999999");
/// The least counterexample has more than this many distinct prime factors.
pub const MIN_PRIME_COUNT: u64 = 969_672_728;
/// Lower limit above which the prime-gap window bound is asserted.
pub const PRIME_GAP_THRESHOLD: u64 = 468_991_632;

/// Interval constants at a fixed working precision.
#[derive(Debug, Clone)]
pub struct Constants {
    pub precision: u32,
    pub gamma: Interval,
    pub exp_gamma: Interval,
    pub exp_neg_gamma: Interval,
    pub ln2: Interval,
    pub ln10: Interval,
}

impl Constants {
    pub fn new(prec: u32) -> Self {
        let center = parse_decimal(GAMMA_DIGITS).expect("gamma digits");
        let radius = parse_decimal(GAMMA_RADIUS).expect("gamma radius");
        let gamma = Interval::from_bounds(
            Dyadic::from_rational(&(&center - &radius), prec, super::Rounding::Down),
            Dyadic::from_rational(&(&center + &radius), prec, super::Rounding::Up),
            prec,
        )
        .expect("ordered bounds");
        Constants::with_gamma(gamma)
    }

    /// Builds the derived constants around a supplied enclosure of gamma.
    /// Used by the self-test to inject a corrupted table.
    pub fn with_gamma(gamma: Interval) -> Self {
        let prec = gamma.precision();
        let exp_gamma = gamma.exp().expect("exp of gamma");
        let exp_neg_gamma = gamma.neg().exp().expect("exp of -gamma");
        Constants {
            precision: prec,
            ln2: Interval::from_u64(2, prec).ln().expect("ln 2"),
            ln10: Interval::from_u64(10, prec).ln().expect("ln 10"),
            gamma,
            exp_gamma,
            exp_neg_gamma,
        }
    }
}
