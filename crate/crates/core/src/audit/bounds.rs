//! The exponent bounds `U_n(p)` and `L(p)`, the function `M(k)` and `ε(x)`.

use num_bigint::BigInt;
use num_traits::Pow;

use super::AuditError;
use crate::factored::{self, CandidateFactorization};
use crate::numeric::{Constants, Interval};
use crate::primes::PrimeTable;

/// Powers up to this many bits are compared exactly.
const EXACT_BITS: u64 = 1 << 16;

fn bit_len(x: u64) -> u64 {
    64 - x.leading_zeros() as u64
}

/// `⌊a log p / log q⌋`: the largest `k` with `q^k <= p^a`.
///
/// Decided in exact integer arithmetic when `p^a` is small enough,
/// otherwise by a certified interval floor.
pub fn floor_log_ratio(p: u64, a: u64, q: u64, prec: u32) -> Result<u64, AuditError> {
    assert!(p >= 2 && q >= 2, "bases must be at least 2");
    if p == q {
        return Ok(a);
    }
    if a.saturating_mul(bit_len(p)) <= EXACT_BITS {
        let target: BigInt = BigInt::from(p).pow(a as u32);
        let est = (a as f64 * (p as f64).ln() / (q as f64).ln()).floor().max(0.0) as u64;
        let qb = BigInt::from(q);
        let mut k = est;
        let mut qk: BigInt = Pow::pow(&qb, k as u32);
        while qk > target {
            k -= 1;
            qk /= &qb;
        }
        loop {
            let next = &qk * &qb;
            if next > target {
                return Ok(k);
            }
            qk = next;
            k += 1;
        }
    }
    let r = factored::ln_prime(p, prec)
        .mul_u64(a)
        .div(&factored::ln_prime(q, prec))?;
    match r.floor() {
        Some(f) if f >= 0 => Ok(f as u64),
        _ => Err(AuditError::Indeterminate {
            what: format!("floor of {a} log {p} / log {q}"),
            precision: prec,
        }),
    }
}

/// `L_{p_r}(p_i) = ⌊log p_r / log p_i⌋`.
pub fn compute_l(p_r: u64, p_i: u64, prec: u32) -> Result<u64, AuditError> {
    if p_i > p_r {
        return Err(AuditError::Domain(format!("L needs p_i <= p_r, got {p_i} > {p_r}")));
    }
    floor_log_ratio(p_r, 1, p_i, prec)
}

/// Precomputed `log(k log n)` for the bracket search behind `U_n`.
#[derive(Debug, Clone)]
pub struct UContext {
    log_n: Interval,
    /// `lkl[k − 1]` encloses `log(k log n)`.
    lkl: Vec<Interval>,
}

impl UContext {
    /// Builds the table up to the first `K` with `x_K < 2`, so every
    /// prime bracket lies below it.
    pub fn new(log_n: Interval) -> Result<Self, AuditError> {
        let prec = log_n.precision();
        let one = Interval::from_u64(1, prec);
        if log_n.gt(&one) != Some(true) {
            return Err(AuditError::Domain("U_n needs log n > 1".into()));
        }
        let ln2 = factored::ln_prime(2, prec);
        let mut lkl = Vec::new();
        for k in 1u64.. {
            let v = log_n.mul_u64(k).ln()?;
            let done = ln2.mul_u64(k).gt(&v) == Some(true);
            lkl.push(v);
            if done {
                break;
            }
            if k > 4096 {
                return Err(AuditError::Domain("log n too large for the bracket table".into()));
            }
        }
        Ok(UContext { log_n, lkl })
    }

    pub fn log_n(&self) -> &Interval {
        &self.log_n
    }

    /// `x_k = (k log n)^{1/k}`.
    pub fn x(&self, k: u64) -> Result<Interval, AuditError> {
        let v = match self.lkl.get(k as usize - 1) {
            Some(v) => v.clone(),
            None => self.log_n.mul_u64(k).ln()?,
        };
        Ok(v.div(&Interval::from_u64(k, v.precision()))?.exp()?)
    }

    /// `U_n(p)`: the bracket index `k` with `x_{k+1} < p <= x_k`, checked
    /// against `⌊log(k log n) / log p⌋`.
    pub fn compute_u(&self, p: u64) -> Result<u32, AuditError> {
        let prec = self.log_n.precision();
        let pi = Interval::from_u64(p, prec);
        match self.log_n.gt(&pi) {
            Some(true) => {}
            Some(false) => {
                return Err(AuditError::Domain(format!("U_n(p) needs p < log n, got p = {p}")));
            }
            None => {
                return Err(AuditError::Indeterminate {
                    what: format!("whether {p} < log n"),
                    precision: prec,
                })
            }
        }
        let lp = factored::ln_prime(p, prec);
        // p <= x_k  <=>  k log p <= log(k log n); true on a prefix of k.
        let holds = |k: usize| lp.mul_u64(k as u64).le(&self.lkl[k - 1]);
        let indeterminate = |k: usize| AuditError::Indeterminate {
            what: format!("bracket x_{k} against p = {p}"),
            precision: prec,
        };
        if holds(1) != Some(true) {
            return Err(indeterminate(1));
        }
        let (mut lo, mut hi) = (1usize, self.lkl.len());
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            match holds(mid) {
                Some(true) => lo = mid,
                Some(false) => hi = mid,
                None => return Err(indeterminate(mid)),
            }
        }
        let k = lo;
        let f = self.lkl[k - 1]
            .div(&lp)?
            .floor()
            .ok_or_else(|| AuditError::Indeterminate {
                what: format!("floor of log({k} log n) / log {p}"),
                precision: prec,
            })?;
        if f != k as i64 {
            return Err(AuditError::BracketMismatch {
                p,
                bracket: k as u64,
                floor: f,
            });
        }
        Ok(k as u32)
    }
}

/// `U_n(p_i)` for a candidate.
pub fn compute_u(c: &CandidateFactorization, i: u64, t: &PrimeTable, prec: u32) -> Result<u32, AuditError> {
    let p = t.nth_prime(i).map_err(|e| AuditError::Domain(e.to_string()))?;
    if i == 0 || i > c.r() {
        return Err(AuditError::Domain(format!("index {i} outside 1..={}", c.r())));
    }
    UContext::new(factored::log_n(c, t, prec)?)?.compute_u(p)
}

/// `M(k) = exp(e^{−γ} f(N_k)) − log N_k` for the primorial `N_k`.
pub fn compute_m(k: u64, t: &PrimeTable, consts: &Constants) -> Result<Interval, AuditError> {
    if k == 0 {
        return Err(AuditError::Domain("M(k) needs k >= 1".into()));
    }
    let nk = CandidateFactorization::primorial(k);
    let prec = consts.precision;
    let f = factored::n_over_phi(&nk, t, prec)?;
    let log_nk = factored::log_n(&nk, t, prec)?;
    Ok(consts.exp_neg_gamma.mul(&f).exp()?.sub(&log_nk))
}

/// `ε(x) = (1 / log x)(1 + 3 / (2 log x))`, given `log x`.
pub fn epsilon(ln_x: &Interval) -> Result<Interval, AuditError> {
    let prec = ln_x.precision();
    let inv = ln_x.recip()?;
    let one = Interval::from_u64(1, prec);
    let three_halves = Interval::from_ratio(&3.into(), &2.into(), prec)?;
    Ok(inv.mul(&one.add(&three_halves.mul(&inv))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_at_log_n_100() {
        let ctx = UContext::new(Interval::from_u64(100, 128)).unwrap();
        assert_eq!(ctx.compute_u(2).unwrap(), 9);
        assert_eq!(ctx.compute_u(3).unwrap(), 5);
        assert_eq!(ctx.compute_u(7).unwrap(), 2);
        assert_eq!(ctx.compute_u(97).unwrap(), 1);
        assert!(matches!(ctx.compute_u(101), Err(AuditError::Domain(_))));
        let x9 = ctx.x(9).unwrap().mid_f64();
        assert!((x9 - 900f64.powf(1.0 / 9.0)).abs() < 1e-12);
    }

    #[test]
    fn l_values() {
        assert_eq!(compute_l(97, 2, 128).unwrap(), 6);
        assert_eq!(compute_l(97, 3, 128).unwrap(), 4);
        assert_eq!(compute_l(97, 97, 128).unwrap(), 1);
        assert_eq!(compute_l(8191, 2, 128).unwrap(), 12);
        assert!(compute_l(2, 3, 128).is_err());
    }

    #[test]
    fn exact_and_interval_floors_agree() {
        for (p, a, q) in [
            (2u64, 40u64, 3u64),
            (3, 17, 2),
            (7, 5, 11),
            (101, 3, 7),
            (2, 63, 1_000_003),
        ] {
            let exact = floor_log_ratio(p, a, q, 128).unwrap();
            let iv = factored::ln_prime(p, 128)
                .mul_u64(a)
                .div(&factored::ln_prime(q, 128))
                .unwrap();
            assert_eq!(Some(exact as i64), iv.floor(), "{a} log {p} / log {q}");
        }
        // Beyond the exact cut-off the interval path takes over.
        let big = floor_log_ratio(3, 100_000, 2, 128).unwrap();
        assert_eq!(big, (100_000.0 * 3f64.log2()).floor() as u64);
    }

    #[test]
    fn m_values() {
        let t = PrimeTable::build(100).unwrap();
        let c = Constants::new(128);
        let m1 = compute_m(1, &t, &c).unwrap();
        let m2 = compute_m(2, &t, &c).unwrap();
        assert!((m1.mid_f64() - 2.3806663009802776).abs() < 1e-14);
        assert!((m2.mid_f64() - 3.5973408304222735).abs() < 1e-14);
        assert!(compute_m(0, &t, &c).is_err());
    }

    #[test]
    fn epsilon_at_seven() {
        let e = epsilon(&factored::ln_prime(7, 128)).unwrap();
        assert!((e.mid_f64() - 0.910_035_601_805_317).abs() < 1e-15);
    }
}
