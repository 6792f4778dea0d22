//! Exact dyadic rationals `m · 2^e` with directed rounding to a bit precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for an inexact result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

/// A dyadic rational `mant · 2^exp`, kept normalized (odd mantissa, or zero
/// with exponent zero) so that structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

pub(crate) fn floor_shr(m: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    if m.sign() != Sign::Minus {
        m >> s
    } else {
        let mag = m.magnitude();
        let q = mag >> s;
        let exact = (&q << s) == *mag;
        let q = BigInt::from_biguint(Sign::Minus, q);
        if exact {
            q
        } else {
            q - 1
        }
    }
}

pub(crate) fn ceil_shr(m: &BigInt, s: u64) -> BigInt {
    -floor_shr(&-m, s)
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_int(BigInt::one())
    }

    /// Builds `mant · 2^exp` and normalizes.
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic {
                mant: mant >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn from_int(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_u64(v: u64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    /// Exact conversion; `None` for NaN or infinities.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        Some(Dyadic::new(BigInt::from(m) * sign, e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Bit length of the mantissa magnitude.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |x|)`; `None` for zero.
    pub fn msb_exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64 - 1)
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Self {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Rounds to at most `prec` mantissa bits in the given direction.
    pub fn round(&self, prec: u32, dir: Rounding) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        let m = match dir {
            Rounding::Down => floor_shr(&self.mant, s),
            Rounding::Up => ceil_shr(&self.mant, s),
        };
        Dyadic::new(m, self.exp + s as i64)
    }

    /// `self / other` rounded to `prec` bits. `other` must be nonzero.
    pub fn div_round(&self, other: &Dyadic, prec: u32, dir: Rounding) -> Self {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let shift = prec as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 2;
        let shift = shift.max(0) as u64;
        let num = &self.mant << shift;
        let q = match dir {
            Rounding::Down => num.div_floor(&other.mant),
            Rounding::Up => -((-num).div_floor(&other.mant)),
        };
        Dyadic::new(q, self.exp - other.exp - shift as i64).round(prec, dir)
    }

    /// `num / den` rounded to `prec` bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, dir: Rounding) -> Self {
        Dyadic::from_int(num.clone()).div_round(&Dyadic::from_int(den.clone()), prec, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            floor_shr(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    /// Exact value as a big rational.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Exact dyadic for a rational whose reduced denominator is a power of two.
    pub fn from_rational_exact(q: &BigRational) -> Option<Self> {
        let den = q.denom();
        if den.sign() != Sign::Plus {
            return None;
        }
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) != BigInt::one() {
            return None;
        }
        Some(Dyadic::new(q.numer().clone(), -(tz as i64)))
    }

    pub fn from_rational(q: &BigRational, prec: u32, dir: Rounding) -> Self {
        match Dyadic::from_rational_exact(q) {
            Some(d) => d.round(prec, dir),
            None => Dyadic::from_ratio(q.numer(), q.denom(), prec, dir),
        }
    }

    /// Nearest-ish `f64`, for diagnostics and search hints only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 64 {
            let s = bits - 64;
            (floor_shr(&self.mant, s), self.exp + s as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        mf * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }

    /// Exact decimal expansion (every dyadic has a finite one).
    pub fn to_decimal_string(&self) -> String {
        if self.exp >= 0 {
            return (&self.mant << self.exp as u64).to_string();
        }
        let k = (-self.exp) as usize;
        let scaled: BigUint = self.mant.magnitude() * num_traits::pow(BigUint::from(5u32), k);
        let mut digits = scaled.to_string();
        if digits.len() <= k {
            digits = "0".repeat(k + 1 - digits.len()) + &digits;
        }
        let split = digits.len() - k;
        let sign = if self.is_negative() { "-" } else { "" };
        format!("{sign}{}.{}", &digits[..split], &digits[split..])
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb {
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same sign: compare magnitudes via the binade first.
        let ma = self.exp + self.mant.bits() as i64;
        let mb = other.exp + other.mant.bits() as i64;
        let mag = if ma != mb {
            ma.cmp(&mb)
        } else {
            let e = self.exp.min(other.exp);
            let a = self.mant.magnitude() << (self.exp - e) as u64;
            let b = other.mant.magnitude() << (other.exp - e) as u64;
            a.cmp(&b)
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }
}

fn rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

/// Parses `[-]digits[.digits][(e|E)[+-]digits]` into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().ok()?;
    if neg {
        num = -num;
    }
    let scale = exp10 - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return None;
    }
    let ten = BigInt::from(10u32);
    Some(if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_makes_equality_numeric() {
        assert_eq!(Dyadic::new(BigInt::from(12), 0), Dyadic::new(BigInt::from(3), 2));
        assert_eq!(Dyadic::new(BigInt::zero(), 17), Dyadic::zero());
    }

    #[test]
    fn directed_rounding_brackets() {
        let x = Dyadic::from_ratio(&BigInt::from(1), &BigInt::from(3), 10, Rounding::Down);
        let y = Dyadic::from_ratio(&BigInt::from(1), &BigInt::from(3), 10, Rounding::Up);
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!(x.to_rational() < third && third < y.to_rational());
        assert!(x.bits() <= 10 && y.bits() <= 10);
    }

    #[test]
    fn negative_rounding() {
        let x = Dyadic::from_i64(-7); // -111b
        assert_eq!(x.round(2, Rounding::Down), Dyadic::from_i64(-8));
        assert_eq!(x.round(2, Rounding::Up), Dyadic::from_i64(-6));
    }

    #[test]
    fn ordering() {
        let a = Dyadic::from_f64(-1.5).unwrap();
        let b = Dyadic::from_f64(0.25).unwrap();
        let c = Dyadic::from_f64(0.375).unwrap();
        assert!(a < b && b < c);
        assert!(Dyadic::from_f64(-0.25).unwrap() > Dyadic::from_f64(-0.375).unwrap());
    }

    #[test]
    fn decimal_round_trip() {
        for v in [0.0, 1.0, -2.5, 1e-30, 123456.789, -3.0e20] {
            let d = Dyadic::from_f64(v).unwrap();
            let s = d.to_decimal_string();
            let q = parse_decimal(&s).unwrap();
            assert_eq!(Dyadic::from_rational_exact(&q).unwrap(), d, "{s}");
        }
        assert_eq!(Dyadic::from_f64(0.375).unwrap().to_decimal_string(), "0.375");
        assert_eq!(Dyadic::from_f64(-0.0625).unwrap().to_decimal_string(), "-0.0625");
    }

    #[test]
    fn floor_and_ceil() {
        let d = Dyadic::from_f64(-2.5).unwrap();
        assert_eq!(d.floor(), BigInt::from(-3));
        assert_eq!(d.ceil(), BigInt::from(-2));
        assert_eq!(Dyadic::from_i64(4).floor(), BigInt::from(4));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_decimal("1.2.3").is_none());
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal("").is_none());
        assert_eq!(
            parse_decimal("1.5e2").unwrap(),
            BigRational::from_integer(BigInt::from(150))
        );
    }
}
