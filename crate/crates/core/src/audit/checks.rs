//! Individual checks. Each returns a [`Verdict`]; component errors become
//! `Unknown` with the reason in the witness.

use num_bigint::BigInt;
use num_traits::Pow;
use serde_json::{json, Value};

use super::bounds::{compute_l, compute_m, epsilon, floor_log_ratio, UContext};
use super::{AuditError, CheckId, Status, Verdict};
use crate::factored::{self, CandidateFactorization};
use crate::numeric::{
    Constants, Interval, LOG_WINDOW_FORM1_C, LOG_WINDOW_UPPER_C, MIN_PRIME_COUNT, SIZE_FLOOR_LOG10_LOG10,
    S_WINDOW_LOWER, S_WINDOW_UPPER,
};
use crate::primes::PrimeTable;

/// Exact power comparisons are used up to this many bits.
const EXACT_BITS: u64 = 1 << 16;

/// Indices examined per end of the candidate when `shape_B2` samples.
const B2_SAMPLE_EDGE: u64 = 1000;

/// Strict lower bounds on `a_1 … a_5`.
const EXPONENT_FLOORS: [u32; 5] = [19, 12, 7, 6, 5];

/// Quantities shared by several checks.
struct Scalars {
    log_n: Interval,
    rho: Interval,
    n_over_phi: Interval,
    p_r: u64,
    ln_pr: Interval,
}

/// A candidate prepared for auditing at one working precision.
pub struct Subject<'a> {
    c: &'a CandidateFactorization,
    t: &'a PrimeTable,
    prec: u32,
    consts: Constants,
    pair_budget: u64,
    scalars: Result<Scalars, String>,
}

fn decided(answer: Option<bool>, if_true: Status, if_false: Status) -> Status {
    match answer {
        Some(true) => if_true,
        Some(false) => if_false,
        None => Status::Unknown,
    }
}

fn bit_len(x: u64) -> u64 {
    64 - x.leading_zeros() as u64
}

/// Least index in `[lo, hi]` where `pred` holds, for a predicate that is
/// false then true on the range.
fn first_true(lo: u64, hi: u64, pred: impl Fn(u64) -> Result<bool, AuditError>) -> Result<Option<u64>, AuditError> {
    if lo > hi || !pred(hi)? {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = a + (b - a) / 2;
        if pred(mid)? {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    Ok(Some(a))
}

impl<'a> Subject<'a> {
    pub fn new(c: &'a CandidateFactorization, t: &'a PrimeTable, prec: u32, pair_budget: u64) -> Self {
        let scalars = (|| -> Result<Scalars, AuditError> {
            let p_r = t.nth_prime(c.r()).map_err(|_| {
                AuditError::Domain(format!(
                    "prime table holds {} primes, candidate needs {}",
                    t.len(),
                    c.r()
                ))
            })?;
            Ok(Scalars {
                log_n: factored::log_n(c, t, prec)?,
                rho: factored::rho(c, t, prec)?,
                n_over_phi: factored::n_over_phi(c, t, prec)?,
                p_r,
                ln_pr: factored::ln_prime(p_r, prec),
            })
        })()
        .map_err(|e| e.to_string());
        Subject {
            c,
            t,
            prec,
            consts: Constants::new(prec),
            pair_budget,
            scalars,
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    fn verdict(&self, status: Status, witness: Value) -> Verdict {
        Verdict::new(status, witness, self.prec)
    }

    fn p(&self, i: u64) -> u64 {
        self.t.nth_prime(i).expect("index within candidate support")
    }

    /// Runs one check; table or numeric failures become `Unknown`.
    pub fn run(&self, id: CheckId) -> Verdict {
        let needs_table = !matches!(
            id,
            CheckId::ShapeB1 | CheckId::ShapeB3 | CheckId::PrimeCountD1 | CheckId::NonUnitD2 | CheckId::ExponentsE
        );
        if needs_table {
            if let Err(reason) = &self.scalars {
                return Verdict::unknown(reason.clone(), self.prec);
            }
        }
        let result = match id {
            CheckId::SizeFloorC => Ok(self.size_floor()),
            CheckId::LogWindow1 => Ok(self.log_window_1()),
            CheckId::LogWindow2 => Ok(self.log_window_2()),
            CheckId::UpperWindow3 => self.upper_window(),
            CheckId::LowerWindow4 => self.lower_window(1),
            CheckId::ShapeB1 => Ok(self.shape_b1()),
            CheckId::ShapeB2 => self.shape_b2(),
            CheckId::ShapeB3 => Ok(self.shape_b3()),
            CheckId::ShapeB4 => self.shape_b4(),
            CheckId::ShapeB5 => self.lower_window(2),
            CheckId::DensityB6 => self.density_b6(),
            CheckId::PrimeCountD1 => Ok(self.prime_count_d1()),
            CheckId::NonUnitD2 => Ok(self.non_unit_d2()),
            CheckId::LogRatioD3 => self.log_ratio_d3(),
            CheckId::PowerBoundD4 => self.power_bound_d4(),
            CheckId::ExponentsE => Ok(self.exponents_e()),
            CheckId::TwoSquaresF => self.two_squares_f(),
            CheckId::SWindow56 => Ok(self.s_window()),
        };
        result.unwrap_or_else(|e| Verdict::unknown(e.to_string(), self.prec))
    }

    fn s(&self) -> &Scalars {
        self.scalars.as_ref().expect("checked by run")
    }

    fn size_floor(&self) -> Verdict {
        check_size_floor_log(&self.s().log_n, &self.consts)
    }

    fn log_window_1(&self) -> Verdict {
        let s = self.s();
        let pr = Interval::from_u64(s.p_r, self.prec);
        let status = decided(s.log_n.gt(&pr), Status::Pass, Status::Fail);
        self.verdict(status, json!({ "log_n": s.log_n, "p_r": s.p_r }))
    }

    fn log_window_2(&self) -> Verdict {
        let s = self.s();
        let bound = log_window_bound(s.p_r, &s.ln_pr, self.prec);
        let status = decided(s.log_n.le(&bound), Status::Pass, Status::Fail);
        self.verdict(status, json!({ "log_n": s.log_n, "p_r": s.p_r, "bound": bound }))
    }

    fn upper_window(&self) -> Result<Verdict, AuditError> {
        let s = self.s();
        let pr = Interval::from_u64(s.p_r, self.prec);
        match s.log_n.gt(&pr) {
            Some(true) => {}
            Some(false) => {
                return Ok(Verdict::not_applicable(
                    "log n <= p_r: U_n(p_i) is undefined",
                    self.prec,
                ));
            }
            None => return Ok(Verdict::unknown("cannot decide log n > p_r", self.prec)),
        }
        let ctx = UContext::new(s.log_n.clone())?;
        for (j, run) in self.c.runs().iter().enumerate() {
            let a = run.exponent;
            let hit = first_true(self.c.run_start(j), self.c.run_end(j), |i| {
                Ok(a > ctx.compute_u(self.p(i))?)
            })?;
            if let Some(i) = hit {
                let p = self.p(i);
                return Ok(self.verdict(
                    Status::Fail,
                    json!({ "index": i, "prime": p, "exponent": a, "U": ctx.compute_u(p)?, "log_n": s.log_n }),
                ));
            }
        }
        Ok(self.verdict(Status::Pass, json!({ "log_n": s.log_n })))
    }

    /// `a_i >= ⌊log p_r / log p_i⌋` for `i >= from`. Within a run the bound
    /// does not increase, so only the first index of each run can be the
    /// least violation.
    fn lower_window(&self, from: u64) -> Result<Verdict, AuditError> {
        let s = self.s();
        if self.c.r() < 2 {
            return Ok(Verdict::not_applicable("needs r >= 2", self.prec));
        }
        for (j, run) in self.c.runs().iter().enumerate() {
            if self.c.run_end(j) < from {
                continue;
            }
            let i = self.c.run_start(j).max(from);
            let l = compute_l(s.p_r, self.p(i), self.prec)?;
            if (run.exponent as u64) < l {
                return Ok(self.verdict(
                    Status::Fail,
                    json!({ "index": i, "prime": self.p(i), "exponent": run.exponent, "L": l, "p_r": s.p_r }),
                ));
            }
        }
        Ok(self.verdict(Status::Pass, json!({ "p_r": s.p_r })))
    }

    fn shape_b1(&self) -> Verdict {
        let runs = self.c.runs();
        match (0..runs.len().saturating_sub(1)).find(|&j| runs[j].exponent < runs[j + 1].exponent) {
            Some(j) => {
                let i = self.c.run_end(j);
                self.verdict(
                    Status::Fail,
                    json!({ "index": i, "a_i": runs[j].exponent, "a_next": runs[j + 1].exponent }),
                )
            }
            None => self.verdict(Status::Pass, json!({ "runs": runs.len() })),
        }
    }

    /// `⌊a_i log p_i / log p_j⌋` for prime indices `i < j`.
    fn b2_floor(&self, i: u64, j: u64) -> Result<u64, AuditError> {
        floor_log_ratio(self.p(i), self.c.exponent(i) as u64, self.p(j), self.prec)
    }

    fn b2_violation(&self, i: u64, j: u64, f: u64) -> Verdict {
        self.verdict(
            Status::Fail,
            json!({ "i": i, "j": j, "a_i": self.c.exponent(i), "a_j": self.c.exponent(j), "floor": f }),
        )
    }

    /// `|a_j − ⌊a_i log p_i / log p_j⌋| <= 1` for all `i < j`. The floor
    /// grows with `i` and shrinks with `j`, so each pair of runs is settled
    /// by its two extreme index pairs.
    fn shape_b2(&self) -> Result<Verdict, AuditError> {
        let c = self.c;
        let nr = c.runs().len() as u64;
        let run_pairs = nr * (nr + 1) / 2;
        if run_pairs <= self.pair_budget {
            for ri in 0..c.runs().len() {
                for rj in ri..c.runs().len() {
                    let aj = c.runs()[rj].exponent as u64;
                    let (si, ei) = (c.run_start(ri), c.run_end(ri));
                    let (sj, ej) = (c.run_start(rj), c.run_end(rj));
                    if ri == rj && si == ei {
                        continue;
                    }
                    let lo = self.b2_floor(si, ej)?;
                    if lo + 1 < aj {
                        return Ok(self.b2_violation(si, ej, lo));
                    }
                    if ri != rj {
                        let hi = self.b2_floor(ei, sj)?;
                        if hi > aj + 1 {
                            return Ok(self.b2_violation(ei, sj, hi));
                        }
                    }
                }
            }
            return Ok(self.verdict(Status::Pass, json!({ "mode": "exact", "run_pairs": run_pairs })));
        }
        let r = c.r();
        let mut sample: Vec<u64> = (1..=B2_SAMPLE_EDGE.min(r)).collect();
        sample.extend(r.saturating_sub(B2_SAMPLE_EDGE - 1).max(1)..=r);
        let stride = (nr / B2_SAMPLE_EDGE).max(1) as usize;
        for j in (0..c.runs().len()).step_by(stride) {
            sample.push(c.run_start(j));
            sample.push(c.run_end(j));
        }
        sample.sort_unstable();
        sample.dedup();
        for (x, &i) in sample.iter().enumerate() {
            for &j in &sample[x + 1..] {
                let f = self.b2_floor(i, j)?;
                if f.abs_diff(c.exponent(j) as u64) > 1 {
                    return Ok(self.b2_violation(i, j, f));
                }
            }
        }
        Ok(self.verdict(
            Status::Unknown,
            json!({ "mode": "sampled", "reason": "pair budget exceeded; sampled pairs pass", "sampled_indices": sample.len() }),
        ))
    }

    fn shape_b3(&self) -> Verdict {
        let c = self.c;
        let ar = c.exponent(c.r());
        let exps = c.runs();
        let is_4_or_36 = ar == 2 && exps.len() == 1 && exps[0].count <= 2;
        let status = if ar == 1 || is_4_or_36 {
            Status::Pass
        } else {
            Status::Fail
        };
        let mut w = json!({ "a_r": ar });
        if is_4_or_36 {
            w["exception"] = json!(if c.r() == 1 { 4 } else { 36 });
        }
        self.verdict(status, w)
    }

    /// Certified `a log p >= m log 2`, exactly when small.
    fn power_at_least_pow2(&self, p: u64, a: u64, m: u64) -> Result<bool, AuditError> {
        if a.saturating_mul(bit_len(p)) <= EXACT_BITS {
            let v: BigInt = BigInt::from(p).pow(a as u32);
            return Ok(v.bits() > m);
        }
        let lhs = factored::ln_prime(p, self.prec).mul_u64(a);
        let rhs = factored::ln_prime(2, self.prec).mul_u64(m);
        lhs.ge(&rhs).ok_or_else(|| AuditError::Indeterminate {
            what: format!("{p}^{a} against 2^{m}"),
            precision: self.prec,
        })
    }

    /// Least `i >= 2` whose index satisfies a per-run suffix predicate.
    fn least_suffix_violation(
        &self,
        pred: impl Fn(u64, u64) -> Result<bool, AuditError>,
    ) -> Result<Option<u64>, AuditError> {
        for (j, run) in self.c.runs().iter().enumerate() {
            let (s, e) = (self.c.run_start(j).max(2), self.c.run_end(j));
            if let Some(i) = first_true(s, e, |i| pred(i, run.exponent as u64))? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn shape_b4(&self) -> Result<Verdict, AuditError> {
        let m = self.c.exponent(1) as u64 + 2;
        let hit = self.least_suffix_violation(|i, a| self.power_at_least_pow2(self.p(i), a, m))?;
        Ok(match hit {
            Some(i) => self.verdict(
                Status::Fail,
                json!({ "index": i, "prime": self.p(i), "exponent": self.c.exponent(i), "bound_log2": m }),
            ),
            None => self.verdict(Status::Pass, json!({ "bound_log2": m })),
        })
    }

    fn density_b6(&self) -> Result<Verdict, AuditError> {
        let s = self.s();
        let eps = epsilon(&s.ln_pr)?;
        let one = Interval::from_u64(1, self.prec);
        let rhs = one.sub(&eps).mul(&s.n_over_phi);
        let status = decided(s.rho.gt(&rhs), Status::Pass, Status::Fail);
        Ok(self.verdict(
            status,
            json!({ "rho": s.rho, "epsilon": eps, "n_over_phi": s.n_over_phi, "bound": rhs }),
        ))
    }

    fn prime_count_d1(&self) -> Verdict {
        let r = self.c.r();
        let status = if r > MIN_PRIME_COUNT {
            Status::Pass
        } else {
            Status::Fail
        };
        self.verdict(status, json!({ "r": r, "bound": MIN_PRIME_COUNT }))
    }

    fn non_unit_d2(&self) -> Verdict {
        let (r, k) = (self.c.r(), self.c.non_unit_count());
        let status = if 14 * k < r { Status::Pass } else { Status::Fail };
        self.verdict(status, json!({ "non_unit": k, "r": r }))
    }

    fn log_ratio_d3(&self) -> Result<Verdict, AuditError> {
        let s = self.s();
        let ratio = Interval::from_u64(s.p_r, self.prec).div(&s.log_n)?;
        let lower = s.ln_pr.recip()?.neg().exp()?;
        let one = Interval::from_u64(1, self.prec);
        let status = match (lower.lt(&ratio), ratio.lt(&one)) {
            (Some(true), Some(true)) => Status::Pass,
            (Some(false), _) | (_, Some(false)) => Status::Fail,
            _ => Status::Unknown,
        };
        Ok(self.verdict(status, json!({ "ratio": ratio, "lower": lower })))
    }

    fn power_bound_d4(&self) -> Result<Verdict, AuditError> {
        let m = compute_m(self.c.r(), self.t, &self.consts)?;
        let m2 = self.c.exponent(1) as u64 + 2;
        let hit = self.least_suffix_violation(|i, a| {
            let p = self.p(i);
            if self.power_at_least_pow2(p, a, m2)? {
                return Ok(true);
            }
            // p^a >= p e^M  <=>  (a − 1) log p >= M
            let lhs = factored::ln_prime(p, self.prec).mul_u64(a - 1);
            lhs.ge(&m).ok_or_else(|| AuditError::Indeterminate {
                what: format!("p_{i}^{a} against p_{i} e^M(r)"),
                precision: self.prec,
            })
        })?;
        Ok(match hit {
            Some(i) => self.verdict(
                Status::Fail,
                json!({ "index": i, "prime": self.p(i), "exponent": self.c.exponent(i), "M": m }),
            ),
            None => self.verdict(Status::Pass, json!({ "M": m })),
        })
    }

    fn exponents_e(&self) -> Verdict {
        let hit = (1..=5u64).find(|&i| self.c.exponent(i) <= EXPONENT_FLOORS[i as usize - 1]);
        match hit {
            Some(i) => self.verdict(
                Status::Fail,
                json!({ "index": i, "exponent": self.c.exponent(i), "must_exceed": EXPONENT_FLOORS[i as usize - 1] }),
            ),
            None => self.verdict(Status::Pass, json!({ "must_exceed": EXPONENT_FLOORS })),
        }
    }

    fn two_squares_f(&self) -> Result<Verdict, AuditError> {
        let sum = factored::is_sum_of_two_squares(self.c, self.t)?;
        let status = if sum { Status::Fail } else { Status::Pass };
        Ok(self.verdict(status, json!({ "sum_of_two_squares": sum })))
    }

    /// `0.999999 √p_r < p_s < 1.414342 √p_r`, decided exactly by squaring.
    fn s_window(&self) -> Verdict {
        let c = self.c;
        let Some(s) = c.last_non_unit_index() else {
            return Verdict::not_applicable("every exponent is 1", self.prec);
        };
        if s == c.r() {
            return Verdict::not_applicable("a_r != 1", self.prec);
        }
        let (ps, pr) = (self.p(s) as u128, self.p(c.r()) as u128);
        let scale = 1_000_000u128;
        let lower_ok = 999_999u128.pow(2) * pr < scale * scale * ps * ps;
        let upper_ok = scale * scale * ps * ps < 1_414_342u128.pow(2) * pr;
        let sqrt_pr = Interval::from_u64(pr as u64, self.prec).sqrt().expect("positive");
        let status = if lower_ok && upper_ok {
            Status::Pass
        } else {
            Status::Fail
        };
        self.verdict(
            status,
            json!({
                "s": s,
                "p_s": ps as u64,
                "p_r": pr as u64,
                "lower": S_WINDOW_LOWER.to_interval(self.prec).mul(&sqrt_pr),
                "upper": S_WINDOW_UPPER.to_interval(self.prec).mul(&sqrt_pr),
                "below_lower": !lower_ok,
                "above_upper": !upper_ok,
            }),
        )
    }
}

/// `p_r (1 + 0.005589 / log p_r)`.
fn log_window_bound(p_r: u64, ln_pr: &Interval, prec: u32) -> Interval {
    let c = LOG_WINDOW_UPPER_C.to_interval(prec);
    let one = Interval::from_u64(1, prec);
    Interval::from_u64(p_r, prec).mul(&one.add(&c.div(ln_pr).expect("log p_r > 0")))
}

/// Size-floor verdict from an enclosure of `log n` alone.
pub fn check_size_floor_log(log_n: &Interval, consts: &Constants) -> Verdict {
    let prec = consts.precision;
    let log10_n = match log_n.div(&consts.ln10) {
        Ok(v) => v,
        Err(e) => return Verdict::unknown(e.to_string(), prec),
    };
    let one = Interval::from_u64(1, prec);
    match log10_n.gt(&one) {
        Some(false) => {
            return Verdict::new(
                Status::Fail,
                json!({ "log10_n": log10_n, "note": "log10 n <= 1" }),
                prec,
            );
        }
        None => return Verdict::unknown("cannot decide log10 n > 1", prec),
        Some(true) => {}
    }
    let v = log10_n.ln().and_then(|l| l.div(&consts.ln10)).expect("log10 n > 1");
    let floor = SIZE_FLOOR_LOG10_LOG10.to_interval(prec);
    let status = decided(v.le(&floor), Status::Fail, Status::Pass);
    Verdict::new(
        status,
        json!({ "log10_log10_n": v, "floor": SIZE_FLOOR_LOG10_LOG10 }),
        prec,
    )
}

/// The alternative log window `p_r <= log n (1 − 0.005587 / log log n)`.
pub fn check_log_window_form1(c: &CandidateFactorization, t: &PrimeTable, prec: u32) -> Verdict {
    let run = || -> Result<Verdict, AuditError> {
        let p_r = t.nth_prime(c.r()).map_err(|e| AuditError::Domain(e.to_string()))?;
        let log_n = factored::log_n(c, t, prec)?;
        let ll = factored::loglog(&log_n)?;
        let one = Interval::from_u64(1, prec);
        let bound = log_n.mul(&one.sub(&LOG_WINDOW_FORM1_C.to_interval(prec).div(&ll)?));
        let status = decided(Interval::from_u64(p_r, prec).le(&bound), Status::Pass, Status::Fail);
        Ok(Verdict::new(
            status,
            json!({ "p_r": p_r, "bound": bound, "log_n": log_n }),
            prec,
        ))
    };
    run().unwrap_or_else(|e| Verdict::unknown(e.to_string(), prec))
}
