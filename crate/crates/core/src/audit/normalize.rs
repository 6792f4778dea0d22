//! Moves a candidate into the exponent window `L(p_i) <= a_i <= U_n(p_i)`
//! with the two `G`-increasing reductions: dividing by `p_s` when
//! `a_s > U_n(p_s)`, and replacing `p_r` by `p_s` when `a_s < L(p_s)`.

use serde::Serialize;

use super::bounds::{compute_l, UContext};
use super::AuditError;
use crate::factored::{self, CandidateFactorization};
use crate::numeric::Interval;
use crate::primes::PrimeTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepKind {
    /// `n → n / p_s`.
    Divide,
    /// `n → n p_s / p_r`.
    Swap,
}

#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub kind: StepKind,
    pub index: u64,
    pub prime: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed_prime: Option<u64>,
    /// Enclosure of `G(n_before) / G(n_after)`.
    pub ratio: Option<Interval>,
    /// `Some(true)` when the ratio is certainly below 1.
    pub ratio_below_one: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormalizeStatus {
    InWindow,
    StepLimit,
    /// No step applies but `log n <= p_r`.
    OutsideLogWindow,
    /// A swap is called for but `a_r != 1`.
    SwapBlocked,
    /// Some comparison could not be decided at this precision.
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizeOutcome {
    pub candidate: CandidateFactorization,
    pub status: NormalizeStatus,
    pub precision_bits: u32,
    pub steps: Vec<Step>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Largest `s` with `a_s > U_n(p_s)`; violations form a suffix of each run.
fn divide_index(c: &CandidateFactorization, t: &PrimeTable, ctx: &UContext) -> Result<Option<u64>, AuditError> {
    for j in (0..c.runs().len()).rev() {
        let e = c.run_end(j);
        if c.runs()[j].exponent > ctx.compute_u(t.nth_prime(e).expect("in table"))? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

/// Largest `s < r` with `a_s < L(p_s)`; violations form a prefix of each run.
fn swap_index(c: &CandidateFactorization, t: &PrimeTable, p_r: u64, prec: u32) -> Result<Option<u64>, AuditError> {
    let r = c.r();
    let below = |i: u64, a: u32| -> Result<bool, AuditError> {
        Ok((a as u64) < compute_l(p_r, t.nth_prime(i).expect("in table"), prec)?)
    };
    for j in (0..c.runs().len()).rev() {
        let a = c.runs()[j].exponent;
        let (s, e) = (c.run_start(j), c.run_end(j).min(r - 1));
        if s > e || !below(s, a)? {
            continue;
        }
        let (mut lo, mut hi) = (s, e);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if below(mid, a)? {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        return Ok(Some(lo));
    }
    Ok(None)
}

/// Applies divide steps (largest index first), then swap steps, until
/// neither applies or `step_limit` steps were taken.
pub fn normalize(
    c: &CandidateFactorization,
    t: &PrimeTable,
    prec: u32,
    step_limit: usize,
) -> Result<NormalizeOutcome, AuditError> {
    let mut cur = c.clone();
    let mut steps = Vec::new();
    let finish = |cur: CandidateFactorization, steps, status, reason: Option<String>| NormalizeOutcome {
        candidate: cur,
        status,
        precision_bits: prec,
        steps,
        reason,
    };
    loop {
        let r = cur.r();
        let p_r = t
            .nth_prime(r)
            .map_err(|_| AuditError::Domain(format!("prime table holds {} primes, candidate needs {r}", t.len())))?;
        let log_n = factored::log_n(&cur, t, prec)?;
        let one = Interval::from_u64(1, log_n.precision());
        let in_log_window = log_n.gt(&Interval::from_u64(p_r, prec));

        let pending = (|| -> Result<Option<(StepKind, u64)>, AuditError> {
            if in_log_window == Some(true) {
                let ctx = UContext::new(log_n.clone())?;
                if let Some(s) = divide_index(&cur, t, &ctx)? {
                    return Ok(Some((StepKind::Divide, s)));
                }
            }
            if r >= 2 {
                if let Some(s) = swap_index(&cur, t, p_r, prec)? {
                    return Ok(Some((StepKind::Swap, s)));
                }
            }
            Ok(None)
        })();
        let pending = match pending {
            Ok(p) => p,
            Err(e @ AuditError::Indeterminate { .. }) => {
                return Ok(finish(cur, steps, NormalizeStatus::Undecided, Some(e.to_string())));
            }
            Err(e) => return Err(e),
        };
        let Some((kind, s)) = pending else {
            let status = match in_log_window {
                Some(true) => NormalizeStatus::InWindow,
                Some(false) => NormalizeStatus::OutsideLogWindow,
                None => NormalizeStatus::Undecided,
            };
            return Ok(finish(cur, steps, status, None));
        };
        if steps.len() >= step_limit {
            return Ok(finish(cur, steps, NormalizeStatus::StepLimit, None));
        }
        if kind == StepKind::Swap && cur.exponent(r) != 1 {
            let reason = format!("a_{s} is below L but a_r = {}", cur.exponent(r));
            return Ok(finish(cur, steps, NormalizeStatus::SwapBlocked, Some(reason)));
        }
        let (ratio, next) = match kind {
            StepKind::Divide => (factored::g_ratio_divide_with(&cur, s, t, &log_n), cur.divided_by(s)?),
            StepKind::Swap => (factored::g_ratio_swap_with(&cur, s, t, &log_n), cur.swapped(s)?),
        };
        let ratio = ratio.ok();
        steps.push(Step {
            kind,
            index: s,
            prime: t.nth_prime(s).expect("in table"),
            removed_prime: (kind == StepKind::Swap).then_some(p_r),
            ratio_below_one: ratio.as_ref().and_then(|x| x.lt(&one)),
            ratio,
        });
        cur = next;
    }
}

/// `Σ |a_i − clamp(a_i, L(p_i), U_n(p_i))|`, defined when `log n > p_r`.
pub fn window_distance(c: &CandidateFactorization, t: &PrimeTable, prec: u32) -> Result<Option<u64>, AuditError> {
    let r = c.r();
    let p_r = t.nth_prime(r).map_err(|e| AuditError::Domain(e.to_string()))?;
    let log_n = factored::log_n(c, t, prec)?;
    if log_n.gt(&Interval::from_u64(p_r, prec)) != Some(true) {
        return Ok(None);
    }
    let ctx = UContext::new(log_n)?;
    let mut total = 0u64;
    for i in 1..=r {
        let p = t.nth_prime(i).expect("in table");
        let a = c.exponent(i) as u64;
        let (l, u) = (compute_l(p_r, p, prec)?, ctx.compute_u(p)? as u64);
        total += a.saturating_sub(u) + l.saturating_sub(a);
    }
    Ok(Some(total))
}
