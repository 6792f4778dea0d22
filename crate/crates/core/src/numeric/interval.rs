use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::{parse_decimal, Dyadic, Rounding};
use super::elementary::{exp_fixed, ln_fixed, pow_nonneg, sqrt_round};
use super::{NumericError, DEFAULT_PRECISION};

/// Outcome of comparing two enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IvOrdering {
    CertainlyLess,
    CertainlyGreater,
    Overlapping,
}

/// A closed interval `[lo, hi]` with dyadic endpoints, carrying the working
/// precision (mantissa bits) used to round results of further operations.
///
/// Every operation rounds outward, so the exact real result of the exact
/// computation on any points of the operands lies inside the result.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Interval {
    /// Encloses a dyadic value, rounding outward if it has more than `prec` bits.
    pub fn point(d: Dyadic, prec: u32) -> Self {
        Interval {
            lo: d.round(prec, Rounding::Down),
            hi: d.round(prec, Rounding::Up),
            prec,
        }
    }

    pub fn from_bounds(lo: Dyadic, hi: Dyadic, prec: u32) -> Result<Self, NumericError> {
        if lo > hi {
            return Err(NumericError::InvalidBounds);
        }
        Ok(Interval {
            lo: lo.round(prec, Rounding::Down),
            hi: hi.round(prec, Rounding::Up),
            prec,
        })
    }

    pub fn from_u64(v: u64, prec: u32) -> Self {
        Interval::point(Dyadic::from_u64(v), prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Interval::point(Dyadic::from_i64(v), prec)
    }

    pub fn from_int(v: &BigInt, prec: u32) -> Self {
        Interval::point(Dyadic::from_int(v.clone()), prec)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Self, NumericError> {
        if den.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        Ok(Interval::from_rational(
            &BigRational::new(num.clone(), den.clone()),
            prec,
        ))
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational(q, prec, Rounding::Down),
            hi: Dyadic::from_rational(q, prec, Rounding::Up),
            prec,
        }
    }

    /// Encloses an exact decimal literal such as `"0.005589"`.
    pub fn from_decimal(s: &str, prec: u32) -> Result<Self, NumericError> {
        let q = parse_decimal(s).ok_or_else(|| NumericError::Parse(s.to_string()))?;
        Ok(Interval::from_rational(&q, prec))
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Midpoint as an `f64`, for display only.
    pub fn mid_f64(&self) -> f64 {
        (self.lo.to_f64() + self.hi.to_f64()) / 2.0
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        self.lo.to_rational() <= *q && *q <= self.hi.to_rational()
    }

    /// True if `other ⊆ self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Same enclosure re-rounded outward to a new working precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        Interval {
            lo: self.lo.round(prec, Rounding::Down),
            hi: self.hi.round(prec, Rounding::Up),
            prec,
        }
    }

    fn joint_prec(&self, other: &Interval) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let p = self.joint_prec(other);
        Interval {
            lo: self.lo.add(&other.lo).round(p, Rounding::Down),
            hi: self.hi.add(&other.hi).round(p, Rounding::Up),
            prec: p,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        let p = self.joint_prec(other);
        Interval {
            lo: self.lo.sub(&other.hi).round(p, Rounding::Down),
            hi: self.hi.sub(&other.lo).round(p, Rounding::Up),
            prec: p,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let p = self.joint_prec(other);
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = products.iter().min().expect("four products").clone();
        let hi = products.iter().max().expect("four products").clone();
        Interval {
            lo: lo.round(p, Rounding::Down),
            hi: hi.round(p, Rounding::Up),
            prec: p,
        }
    }

    pub fn mul_u64(&self, k: u64) -> Interval {
        self.mul(&Interval::from_u64(k, self.prec))
    }

    pub fn div(&self, other: &Interval) -> Result<Interval, NumericError> {
        if !other.lo.is_positive() && !other.hi.is_negative() {
            return Err(NumericError::DivisionByZero);
        }
        let p = self.joint_prec(other);
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| a.div_round(b, p, Rounding::Down))
            .min()
            .expect("four quotients");
        let hi = pairs
            .iter()
            .map(|(a, b)| a.div_round(b, p, Rounding::Up))
            .max()
            .expect("four quotients");
        Ok(Interval { lo, hi, prec: p })
    }

    pub fn recip(&self) -> Result<Interval, NumericError> {
        Interval::from_u64(1, self.prec).div(self)
    }

    /// Natural logarithm; requires `lo > 0`.
    pub fn ln(&self) -> Result<Interval, NumericError> {
        if !self.lo.is_positive() {
            return Err(NumericError::LogDomain);
        }
        let p = self.prec;
        if self.is_point() && self.lo == Dyadic::one() {
            return Ok(Interval::from_u64(0, p));
        }
        let w = p + 64;
        let lo_arg = self.lo.round(w + 16, Rounding::Down);
        let hi_arg = self.hi.round(w + 16, Rounding::Up);
        let lo = ln_fixed(&lo_arg, w)?.lower(p);
        let hi = ln_fixed(&hi_arg, w)?.upper(p);
        Ok(Interval { lo, hi, prec: p })
    }

    pub fn exp(&self) -> Result<Interval, NumericError> {
        let p = self.prec;
        if self.is_point() && self.lo.is_zero() {
            return Ok(Interval::from_u64(1, p));
        }
        let w = p + 64;
        let lo_arg = self.lo.round(w + 16, Rounding::Down);
        let hi_arg = self.hi.round(w + 16, Rounding::Up);
        let mut lo = exp_fixed(&lo_arg, w)?.lower(p);
        if lo.is_negative() {
            lo = Dyadic::zero();
        }
        let hi = exp_fixed(&hi_arg, w)?.upper(p);
        Ok(Interval { lo, hi, prec: p })
    }

    /// Square root; requires `lo >= 0`.
    pub fn sqrt(&self) -> Result<Interval, NumericError> {
        let p = self.prec;
        Ok(Interval {
            lo: sqrt_round(&self.lo, p, Rounding::Down)?,
            hi: sqrt_round(&self.hi, p, Rounding::Up)?,
            prec: p,
        })
    }

    /// Integer power. Negative exponents require `0 ∉ self`.
    pub fn powi(&self, k: i64) -> Result<Interval, NumericError> {
        if k < 0 {
            return self.powi(-k)?.recip();
        }
        let p = self.prec;
        let k = k as u64;
        if k == 0 {
            return Ok(Interval::from_u64(1, p));
        }
        let odd = k % 2 == 1;
        let (lo, hi) = if !self.lo.is_negative() {
            (
                pow_nonneg(&self.lo, k, p, Rounding::Down),
                pow_nonneg(&self.hi, k, p, Rounding::Up),
            )
        } else if !self.hi.is_positive() {
            let a = pow_nonneg(&self.hi.abs(), k, p, Rounding::Down);
            let b = pow_nonneg(&self.lo.abs(), k, p, Rounding::Up);
            if odd {
                (b.neg(), a.neg())
            } else {
                (a, b)
            }
        } else if odd {
            (
                pow_nonneg(&self.lo.abs(), k, p, Rounding::Up).neg(),
                pow_nonneg(&self.hi, k, p, Rounding::Up),
            )
        } else {
            let m = self.lo.abs().max(self.hi.clone());
            (Dyadic::zero(), pow_nonneg(&m, k, p, Rounding::Up))
        };
        Ok(Interval { lo, hi, prec: p })
    }

    /// Real power `self^e = exp(e · ln self)`; requires `self > 0`.
    pub fn pow(&self, e: &Interval) -> Result<Interval, NumericError> {
        e.mul(&self.ln()?).exp()
    }

    /// `⌊x⌋` when both endpoints share it, `None` when the enclosure
    /// straddles an integer boundary (or the floor does not fit an `i64`).
    pub fn floor(&self) -> Option<i64> {
        let a = self.lo.floor();
        let b = self.hi.floor();
        if a == b {
            a.to_i64()
        } else {
            None
        }
    }

    pub fn compare(&self, other: &Interval) -> IvOrdering {
        if self.hi < other.lo {
            IvOrdering::CertainlyLess
        } else if self.lo > other.hi {
            IvOrdering::CertainlyGreater
        } else {
            IvOrdering::Overlapping
        }
    }

    /// Certified `self < other`: `Some(true)` / `Some(false)` when decided.
    pub fn lt(&self, other: &Interval) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Certified `self <= other`.
    pub fn le(&self, other: &Interval) -> Option<bool> {
        if self.hi <= other.lo {
            Some(true)
        } else if self.lo > other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn gt(&self, other: &Interval) -> Option<bool> {
        other.lt(self)
    }

    pub fn ge(&self, other: &Interval) -> Option<bool> {
        other.le(self)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]@{}", self.lo.to_f64(), self.hi.to_f64(), self.prec)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Interval> for &Interval {
            type Output = Interval;
            fn $method(self, rhs: &Interval) -> Interval {
                Interval::$method(self, rhs)
            }
        }
        impl $tr<Interval> for Interval {
            type Output = Interval;
            fn $method(self, rhs: Interval) -> Interval {
                Interval::$method(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::neg(self)
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: String,
    hi: String,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: self.lo.to_decimal_string(),
            hi: self.hi.to_decimal_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = IntervalRepr::deserialize(d)?;
        let parse = |s: &str| parse_decimal(s).ok_or_else(|| D::Error::custom(format!("bad decimal `{s}`")));
        let (lo, hi) = (parse(&repr.lo)?, parse(&repr.hi)?);
        let exact = |q: &BigRational| Dyadic::from_rational_exact(q);
        let prec = [exact(&lo), exact(&hi)]
            .iter()
            .flatten()
            .map(|d| d.bits() as u32)
            .fold(DEFAULT_PRECISION, u32::max);
        let lo = Dyadic::from_rational(&lo, prec, Rounding::Down);
        let hi = Dyadic::from_rational(&hi, prec, Rounding::Up);
        Interval::from_bounds(lo, hi, prec).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn iv(v: f64) -> Interval {
        Interval::point(Dyadic::from_f64(v).unwrap(), P)
    }

    fn dec(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    #[test]
    fn exact_integer_sum() {
        let s = iv(1.0) + iv(2.0);
        assert!(s.contains(&Dyadic::from_u64(3)));
        assert!(s.is_point());
    }

    #[test]
    fn identity_product() {
        let s = iv(2.0) * iv(0.5);
        assert_eq!(s, iv(1.0));
    }

    #[test]
    fn third_is_tight() {
        let q = iv(1.0).div(&iv(3.0)).unwrap();
        let third = BigRational::new(1.into(), 3.into());
        assert!(q.contains_rational(&third));
        assert!(!q.is_point());
        // width at most two ulps of 1/3 at 128 bits
        let two_ulps = Dyadic::new(BigInt::from(2), -129);
        assert!(q.width() <= two_ulps, "{:?}", q.width());
    }

    #[test]
    fn division_by_zero_interval() {
        let z = Interval::from_bounds(Dyadic::from_i64(-1), Dyadic::from_i64(1), P).unwrap();
        assert!(matches!(iv(1.0).div(&z), Err(NumericError::DivisionByZero)));
    }

    #[test]
    fn log_of_one_is_zero() {
        assert_eq!(iv(1.0).ln().unwrap(), iv(0.0));
    }

    #[test]
    fn log_domain() {
        assert!(matches!(iv(0.0).ln(), Err(NumericError::LogDomain)));
        assert!(matches!(iv(-3.0).ln(), Err(NumericError::LogDomain)));
    }

    #[test]
    fn exp_log_inverse_pair() {
        let r = iv(5.0).ln().unwrap().exp().unwrap();
        assert!(r.contains(&Dyadic::from_u64(5)));
        assert!(r.width().to_f64() < 1e-35);
    }

    #[test]
    fn known_logs() {
        // mpmath, 40 digits
        let ln2 = dec("0.6931471805599453094172321214581765680755");
        let ln5040 = dec("8.525161361065414300165531036347");
        assert!(iv(2.0).ln().unwrap().contains_rational(&ln2));
        let l = Interval::from_u64(5040, P).ln().unwrap();
        assert!((l.mid_f64() - 8.525161361065414).abs() < 1e-14);
        assert!(l.lo().to_rational() < &ln5040 + dec("1e-30") && ln5040 < l.hi().to_rational() + dec("1e-30"));
    }

    #[test]
    fn sqrt_two_hundred() {
        let r = Interval::from_u64(200, P).pow(&iv(0.5)).unwrap();
        let s = Interval::from_u64(200, P).sqrt().unwrap();
        // independent oracle: 14.14213562373095048801688724209698 (mpmath)
        let truth = dec("14.142135623730950488016887242096980785696");
        assert!(r.lo().to_rational() < truth.clone() + dec("1e-36"));
        assert!(r.hi().to_rational() > truth.clone() - dec("1e-36"));
        assert!(r.lo() <= s.lo() && s.hi() <= r.hi() || r.compare(&s) == IvOrdering::Overlapping);
        let sq = &s * &s;
        assert!(sq.contains(&Dyadic::from_u64(200)));
    }

    #[test]
    fn comparisons() {
        let a = Interval::from_bounds(Dyadic::from_i64(1), Dyadic::from_i64(2), P).unwrap();
        let b = Interval::from_bounds(Dyadic::from_i64(3), Dyadic::from_i64(4), P).unwrap();
        let c = Interval::from_bounds(Dyadic::from_i64(1), Dyadic::from_i64(3), P).unwrap();
        let d = Interval::from_bounds(Dyadic::from_i64(2), Dyadic::from_i64(4), P).unwrap();
        assert_eq!(a.compare(&b), IvOrdering::CertainlyLess);
        assert_eq!(b.compare(&a), IvOrdering::CertainlyGreater);
        assert_eq!(c.compare(&d), IvOrdering::Overlapping);
    }

    #[test]
    fn floors() {
        let a = Interval::from_bounds(Dyadic::from_f64(2.1).unwrap(), Dyadic::from_f64(2.9).unwrap(), P).unwrap();
        let b = Interval::from_bounds(Dyadic::from_f64(2.9).unwrap(), Dyadic::from_f64(3.1).unwrap(), P).unwrap();
        assert_eq!(a.floor(), Some(2));
        assert_eq!(b.floor(), None);
        let r = Interval::from_u64(97, P)
            .ln()
            .unwrap()
            .div(&iv(2.0).ln().unwrap())
            .unwrap();
        assert_eq!(r.floor(), Some(6));
    }

    #[test]
    fn integer_powers_by_sign() {
        let a = Interval::from_bounds(Dyadic::from_i64(-3), Dyadic::from_i64(2), P).unwrap();
        let sq = a.powi(2).unwrap();
        assert_eq!((sq.lo().to_f64(), sq.hi().to_f64()), (0.0, 9.0));
        let cube = a.powi(3).unwrap();
        assert_eq!((cube.lo().to_f64(), cube.hi().to_f64()), (-27.0, 8.0));
        let neg = Interval::from_bounds(Dyadic::from_i64(-3), Dyadic::from_i64(-2), P).unwrap();
        let sq = neg.powi(2).unwrap();
        assert_eq!((sq.lo().to_f64(), sq.hi().to_f64()), (4.0, 9.0));
        assert!(a.powi(-1).is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let x = Interval::from_u64(7, P).ln().unwrap();
        let s = serde_json::to_string(&x).unwrap();
        let y: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(x.lo(), y.lo());
        assert_eq!(x.hi(), y.hi());
        assert!(s.starts_with("{\"lo\":\"1.945910149055313305105352"));
    }
}
