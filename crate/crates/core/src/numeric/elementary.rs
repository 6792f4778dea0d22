//! Fixed-point kernels for `ln`, `exp` and `sqrt` on exact dyadic arguments.
//!
//! Each kernel returns an [`Approx`]: an integer `value` at binary scale
//! `2^scale` together with a rigorous bound `err` on the absolute error in the
//! same units. Error bounds are tracked by hand for every truncating step;
//! they are loose but never optimistic.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dyadic::{floor_shr, Dyadic, Rounding};
use super::NumericError;

/// `value · 2^scale` is within `err · 2^scale` of the true result.
#[derive(Debug, Clone)]
pub(crate) struct Approx {
    pub value: BigInt,
    pub err: BigInt,
    pub scale: i64,
}

impl Approx {
    /// Lower bound padded by twice the error bound. The extra padding keeps
    /// enclosures at higher working precision nested inside lower ones.
    pub fn lower(&self, prec: u32) -> Dyadic {
        let v = &self.value - (&self.err << 1u32);
        Dyadic::new(v, self.scale).round(prec, Rounding::Down)
    }

    pub fn upper(&self, prec: u32) -> Dyadic {
        let v = &self.value + (&self.err << 1u32);
        Dyadic::new(v, self.scale).round(prec, Rounding::Up)
    }
}

/// `floor(2^w · atanh(1/q))` and the number of series terms used; the true
/// scaled value lies in `[S, S + terms + 1]`.
fn atanh_recip(q: u64, w: u32) -> (BigInt, u64) {
    let q2 = BigInt::from(q) * BigInt::from(q);
    let mut t = (BigInt::one() << w) / BigInt::from(q);
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !t.is_zero() {
        sum += &t / BigInt::from(2 * j + 1);
        t /= &q2;
        j += 1;
    }
    (sum, j)
}

struct Ln2Cache {
    w: u32,
    value: BigInt,
    err: u64,
}

static LN2: Mutex<Option<Ln2Cache>> = Mutex::new(None);

/// `ln 2` scaled by `2^w`, with absolute error bound in units.
pub(crate) fn ln2_fixed(w: u32) -> (BigInt, u64) {
    let mut guard = LN2.lock().unwrap_or_else(|e| e.into_inner());
    let need = w + 16;
    let fresh = match guard.as_ref() {
        Some(c) if c.w >= need => None,
        _ => {
            let wc = need.max(guard.as_ref().map_or(0, |c| c.w * 2));
            let (s, terms) = atanh_recip(3, wc);
            // 2·atanh(1/3); take the midpoint of [2S, 2S + 2(terms+1)].
            let value = (s << 1u32) + BigInt::from(terms + 1);
            Some(Ln2Cache {
                w: wc,
                value,
                err: terms + 2,
            })
        }
    };
    if let Some(c) = fresh {
        *guard = Some(c);
    }
    let c = guard.as_ref().expect("ln2 cache populated");
    let d = (c.w - w) as u64;
    let value = floor_shr(&c.value, d);
    // Floor adds under one unit; the cached error shrinks by 2^d >= 2^16.
    (value, c.err.checked_shr(d as u32).unwrap_or(0) + 2)
}

fn guard_bits(k: i64) -> u32 {
    64 - k.unsigned_abs().leading_zeros()
}

/// Natural logarithm of a positive dyadic, to roughly `w` fractional bits.
pub(crate) fn ln_fixed(x: &Dyadic, w: u32) -> Result<Approx, NumericError> {
    if !x.is_positive() {
        return Err(NumericError::LogDomain);
    }
    let m = x.mantissa().clone();
    let b = m.bits();
    // y = m / 2^t in [1/sqrt2, sqrt2), x = y · 2^k
    let t = if (&m * &m) >= (BigInt::one() << (2 * b - 1)) {
        b
    } else {
        b - 1
    };
    let k = x.exponent() + t as i64;
    let ww = w + guard_bits(k) + 8;

    let pow_t = BigInt::one() << t;
    let z = ((&m - &pow_t) << ww).div_floor(&(&m + &pow_t));
    let z2 = (&z * &z) >> ww;
    let mut p = z.clone();
    let mut s = BigInt::zero();
    let mut terms: u64 = 0;
    while !p.is_zero() {
        s += &p / BigInt::from(2 * terms + 1);
        p = (&p * &z2) / (BigInt::one() << ww);
        terms += 1;
    }
    // |z| <= 0.1716: each term carries < 4 units of error, the tail and the
    // rounding of z contribute < 8 more.
    let series_err = 4 * terms + 8;
    let (l2, l2_err) = ln2_fixed(ww);
    let value = (s << 1u32) + BigInt::from(k) * l2;
    let err = BigInt::from(2 * series_err) + BigInt::from(k.unsigned_abs()) * BigInt::from(l2_err) + 2;
    Ok(Approx {
        value,
        err,
        scale: -(ww as i64),
    })
}

/// Largest argument magnitude accepted by [`exp_fixed`].
pub(crate) const EXP_ARG_LIMIT: f64 = 1.0e12;

/// Exponential of a dyadic, to roughly `w` bits relative precision.
pub(crate) fn exp_fixed(x: &Dyadic, w: u32) -> Result<Approx, NumericError> {
    let xf = x.to_f64();
    if !xf.is_finite() || xf.abs() > EXP_ARG_LIMIT {
        return Err(NumericError::Overflow);
    }
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    const HALVINGS: u32 = 12;
    let wi = w + 48 + HALVINGS + guard_bits(k);

    let (l2, l2_err) = ln2_fixed(wi);
    let xs = if x.exponent() + wi as i64 >= 0 {
        x.mantissa() << (x.exponent() + wi as i64) as u64
    } else {
        floor_shr(x.mantissa(), (-(x.exponent() + wi as i64)) as u64)
    };
    let t = xs - BigInt::from(k) * &l2;
    let t_err = BigInt::from(k.unsigned_abs()) * BigInt::from(l2_err) + 1;
    let one = BigInt::one() << wi;
    if t.abs() > (&one >> 1u32) {
        return Err(NumericError::Overflow);
    }
    let tr = floor_shr(&t, HALVINGS as u64);
    let tr_err = (&t_err >> HALVINGS) + 1;

    let mut sum = one.clone();
    let mut term = one.clone();
    let mut j: u64 = 1;
    loop {
        term = (&term * &tr) / (&one * BigInt::from(j));
        if term.is_zero() {
            break;
        }
        sum += &term;
        j += 1;
    }
    // Truncated terms each contribute < 2 units; the tail after the first
    // zero term is < 2 units; the argument error propagates with slope < 1.01.
    let mut err = BigInt::from(2 * j + 4) + (&tr_err << 1u32);
    let mut v = sum;
    for _ in 0..HALVINGS {
        v = (&v * &v) >> wi;
        // v < 1.5 · 2^wi, so (v ± e)^2 moves by < 3e + e^2/2^wi units.
        err = &err * 3 + 2;
    }
    Ok(Approx {
        value: v,
        err,
        scale: k - wi as i64,
    })
}

/// Square root of a non-negative dyadic rounded to `prec` bits.
pub(crate) fn sqrt_round(x: &Dyadic, prec: u32, dir: Rounding) -> Result<Dyadic, NumericError> {
    if x.is_negative() {
        return Err(NumericError::SqrtDomain);
    }
    if x.is_zero() {
        return Ok(Dyadic::zero());
    }
    let m = x.mantissa();
    let mut shift = (2 * prec as i64 + 4 - m.bits() as i64).max(0);
    if (x.exponent() - shift) % 2 != 0 {
        shift += 1;
    }
    let scaled: BigInt = m << shift as u64;
    let r = scaled.sqrt();
    let exact = &r * &r == scaled;
    let r = match dir {
        Rounding::Up if !exact => r + 1,
        _ => r,
    };
    Ok(Dyadic::new(r, (x.exponent() - shift) / 2).round(prec, dir))
}

/// `x^k` for non-negative `x`, rounding every intermediate in `dir`.
pub(crate) fn pow_nonneg(x: &Dyadic, mut k: u64, prec: u32, dir: Rounding) -> Dyadic {
    debug_assert!(!x.is_negative());
    let mut result = Dyadic::one();
    let mut base = x.round(prec, dir);
    while k > 0 {
        if k & 1 == 1 {
            result = result.mul(&base).round(prec, dir);
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(&base).round(prec, dir);
        }
    }
    result
}
