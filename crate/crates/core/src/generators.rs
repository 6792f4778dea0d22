//! Exact range verification of Robin's inequality and generation of
//! superabundant and colossally abundant numbers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::factored::{CandidateFactorization, FactoredError, Run};
use crate::numeric::{Constants, Interval, NumericError};
use crate::primes::{PrimeError, PrimeTable};

/// Numbers per sieve segment.
const SEGMENT: u64 = 1 << 18;
/// Numbers sharing one precomputed threshold constant in the fast path.
const BLOCK: u64 = 1 << 12;
/// Largest `n` whose σ is guaranteed to fit the `u64` fast path.
pub const MAX_VERIFY_N: u64 = 1 << 44;
/// Precision doublings tried before a verdict is left Unknown.
const REFINEMENTS: u32 = 3;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("{0}")]
    Domain(String),
    #[error("{what} of {requested} exceeds the budget of {budget}")]
    Budget {
        what: &'static str,
        requested: u64,
        budget: u64,
    },
    #[error("floor undecided for p = {p} even at {precision} bits")]
    Indeterminate { p: u64, precision: u32 },
    #[error(transparent)]
    Prime(#[from] PrimeError),
    #[error(transparent)]
    Factored(#[from] FactoredError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RiVerdict {
    Holds,
    Fails,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationRecord {
    pub n: u64,
    pub sigma: u64,
    /// Enclosure of `e^γ n log log n`.
    pub threshold: Interval,
    pub verdict: RiVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeReport {
    pub from: u64,
    pub to: u64,
    pub precision_bits: u32,
    pub violations: Vec<VerificationRecord>,
    pub unknowns: Vec<VerificationRecord>,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub precision: u32,
    /// Largest `to − from + 1` accepted.
    pub max_span: u64,
    /// Replaces the built-in `e^γ` enclosure (used to test the harness).
    pub exp_gamma: Option<Interval>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            precision: crate::numeric::DEFAULT_PRECISION,
            max_span: 2_000_000_000,
            exp_gamma: None,
        }
    }
}

/// σ(n) by divisor enumeration.
pub fn sigma_naive(n: u64) -> u64 {
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += d;
            if d * d != n {
                s += n / d;
            }
        }
        d += 1;
    }
    s
}

/// σ(n) for every `n` in `[lo, hi]`, given all primes up to `isqrt(hi)`.
///
/// Each prime's contribution `1 + p + … + p^k` is multiplied in per
/// segment; whatever cofactor remains is a single large prime.
pub fn sigma_segment(lo: u64, hi: u64, primes: &[u32]) -> Vec<u64> {
    assert!(lo >= 1 && lo <= hi);
    let len = (hi - lo + 1) as usize;
    let mut rest: Vec<u64> = (lo..=hi).collect();
    let mut sigma = vec![1u64; len];
    for &p in primes {
        let p = p as u64;
        if p * p > hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let k = (m - lo) as usize;
            let mut term = 1u64;
            let mut sum = 1u64;
            while rest[k].is_multiple_of(p) {
                rest[k] /= p;
                term *= p;
                sum += term;
            }
            sigma[k] *= sum;
            m += p;
        }
    }
    for k in 0..len {
        if rest[k] > 1 {
            sigma[k] *= rest[k] + 1;
        }
    }
    sigma
}

/// Enclosures of `e^γ n log log n`, refined on demand.
struct Threshold {
    levels: Vec<Interval>,
}

impl Threshold {
    fn new(cfg: &VerifyConfig) -> Self {
        let levels = (0..=REFINEMENTS)
            .map(|k| match &cfg.exp_gamma {
                Some(eg) => eg.clone(),
                None => Constants::new(cfg.precision << k).exp_gamma,
            })
            .collect();
        Threshold { levels }
    }

    fn at(&self, n: u64, level: usize) -> Interval {
        let eg = &self.levels[level];
        let p = eg.precision().max(64);
        let ni = Interval::from_u64(n, p);
        let ll = ni.ln().and_then(|l| l.ln()).expect("n >= 3");
        eg.mul(&ni).mul(&ll)
    }

    /// `floor(2^64 · lower(e^γ log log a))`; for `n >= a`,
    /// `σ(n) · 2^64 < K n` certifies the inequality.
    fn block_constant(&self, a: u64) -> u128 {
        let eg = &self.levels[0];
        let ll = Interval::from_u64(a, eg.precision())
            .ln()
            .and_then(|l| l.ln())
            .expect("a >= 3");
        let k: BigInt = eg.mul(&ll).lo().mul_pow2(64).floor();
        k.to_u128().unwrap_or(0)
    }

    fn classify(&self, n: u64, sigma: u64) -> VerificationRecord {
        let s = Interval::from_u64(sigma, 64);
        let mut threshold = self.at(n, 0);
        for level in 0..self.levels.len() {
            if level > 0 {
                threshold = self.at(n, level);
            }
            let verdict = match s.lt(&threshold) {
                Some(true) => Some(RiVerdict::Holds),
                Some(false) if s.gt(&threshold) == Some(true) => Some(RiVerdict::Fails),
                _ => None,
            };
            if let Some(verdict) = verdict {
                return VerificationRecord {
                    n,
                    sigma,
                    threshold,
                    verdict,
                };
            }
        }
        VerificationRecord {
            n,
            sigma,
            threshold,
            verdict: RiVerdict::Unknown,
        }
    }
}

/// Checks `σ(n) < e^γ n log log n` for every `n` in `[from, to]`, returning
/// certified violations and undecided cases separately.
pub fn verify_range(from: u64, to: u64, cfg: &VerifyConfig) -> Result<RangeReport, GenError> {
    if from < 3 {
        return Err(GenError::Domain(format!(
            "log log n needs n >= 3, range starts at {from}"
        )));
    }
    if from > to {
        return Err(GenError::Domain(format!("empty range {from}..{to}")));
    }
    if to > MAX_VERIFY_N {
        return Err(GenError::Budget {
            what: "upper end",
            requested: to,
            budget: MAX_VERIFY_N,
        });
    }
    let span = to - from + 1;
    if span > cfg.max_span {
        return Err(GenError::Budget {
            what: "range length",
            requested: span,
            budget: cfg.max_span,
        });
    }
    let table = PrimeTable::build(to.isqrt().max(2))?;
    let threshold = Threshold::new(cfg);
    let starts: Vec<u64> = (from..=to).step_by(SEGMENT as usize).collect();
    let parts: Vec<Vec<VerificationRecord>> = starts
        .par_iter()
        .map(|&a| {
            let b = (a + SEGMENT - 1).min(to);
            let sig = sigma_segment(a, b, table.primes());
            let mut flagged = Vec::new();
            let mut block = a;
            while block <= b {
                let end = (block + BLOCK - 1).min(b);
                let k = threshold.block_constant(block);
                for n in block..=end {
                    let s = sig[(n - a) as usize];
                    if ((s as u128) << 64) >= k * n as u128 {
                        let rec = threshold.classify(n, s);
                        if rec.verdict != RiVerdict::Holds {
                            flagged.push(rec);
                        }
                    }
                }
                block = end + 1;
            }
            flagged
        })
        .collect();
    let (violations, unknowns) = parts.into_iter().flatten().partition(|r| r.verdict == RiVerdict::Fails);
    Ok(RangeReport {
        from,
        to,
        precision_bits: cfg.precision,
        violations,
        unknowns,
    })
}

/// The integers in `[3, 5040]` violating the inequality.
pub fn robin_exceptions() -> Vec<u64> {
    verify_range(3, 5040, &VerifyConfig::default())
        .expect("fixed range is valid")
        .violations
        .iter()
        .map(|r| r.n)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbundanceRecord {
    pub n: u64,
    pub sigma: u64,
    pub rho_num: u64,
    pub rho_den: u64,
}

impl AbundanceRecord {
    /// Record for `n` with `ρ = σ/n` in lowest terms.
    pub fn new(n: u64, sigma: u64) -> Self {
        let g = sigma.gcd(&n);
        AbundanceRecord {
            n,
            sigma,
            rho_num: sigma / g,
            rho_den: n / g,
        }
    }

    pub fn rho(&self) -> BigRational {
        BigRational::new(self.rho_num.into(), self.rho_den.into())
    }
}

/// Largest limit accepted by [`superabundant_up_to`].
pub const MAX_SA_LIMIT: u64 = 10_000_000_000;

/// All superabundant `n <= limit`: record values of `σ(n)/n`.
pub fn superabundant_up_to(limit: u64) -> Result<Vec<AbundanceRecord>, GenError> {
    if limit == 0 {
        return Err(GenError::Domain("limit must be at least 1".into()));
    }
    if limit > MAX_SA_LIMIT {
        return Err(GenError::Budget {
            what: "superabundant limit",
            requested: limit,
            budget: MAX_SA_LIMIT,
        });
    }
    let table = PrimeTable::build(limit.isqrt().max(2))?;
    let mut out = vec![AbundanceRecord::new(1, 1)];
    let (mut best_n, mut best_s) = (1u64, 1u64);
    let batch = SEGMENT * rayon::current_num_threads().max(1) as u64;
    let mut a = 2;
    while a <= limit {
        let b = (a + batch - 1).min(limit);
        let starts: Vec<u64> = (a..=b).step_by(SEGMENT as usize).collect();
        let sigmas: Vec<Vec<u64>> = starts
            .par_iter()
            .map(|&s| sigma_segment(s, (s + SEGMENT - 1).min(b), table.primes()))
            .collect();
        for (n, s) in (a..=b).zip(sigmas.into_iter().flatten()) {
            if (s as u128) * (best_n as u128) > (best_s as u128) * (n as u128) {
                best_n = n;
                best_s = s;
                out.push(AbundanceRecord::new(n, s));
            }
        }
        a = b + 1;
    }
    Ok(out)
}

/// Verdict of the inequality for a single `n`, exact σ given.
pub fn classify(n: u64, sigma: u64, precision: u32) -> Option<VerificationRecord> {
    if n < 3 {
        return None;
    }
    let cfg = VerifyConfig {
        precision,
        ..VerifyConfig::default()
    };
    Some(Threshold::new(&cfg).classify(n, sigma))
}

/// `⌊ log((p^{1+ε} − 1)/(p^ε − 1)) / log p ⌋ − 1`, refining precision until
/// the floor is decided.
fn ca_exponent(p: u64, eps: &BigRational, prec: u32) -> Result<u32, GenError> {
    let mut w = prec;
    for _ in 0..=REFINEMENTS + 1 {
        let e = Interval::from_rational(eps, w);
        let pi = Interval::from_u64(p, w);
        let lp = pi.ln()?;
        let pe = e.mul(&lp).exp()?;
        let one = Interval::from_u64(1, w);
        let ratio = pi.mul(&pe).sub(&one).div(&pe.sub(&one))?;
        if let Some(f) = ratio.ln()?.div(&lp)?.floor() {
            return Ok((f - 1).max(0) as u32);
        }
        w *= 2;
    }
    Err(GenError::Indeterminate { p, precision: w / 2 })
}

/// The colossally abundant number attached to `ε`.
///
/// Exponents do not increase along the primes, so the last index carrying
/// each exponent value is found by binary search over the table.
pub fn ca_candidate(eps: &BigRational, table: &PrimeTable, prec: u32) -> Result<CandidateFactorization, GenError> {
    if eps <= &BigRational::from_integer(0.into()) {
        return Err(GenError::Domain("epsilon must be positive".into()));
    }
    let primes = table.primes();
    let at = |i: usize| ca_exponent(primes[i] as u64, eps, prec);
    let last = primes.len() - 1;
    if at(last)? > 0 {
        return Err(GenError::Budget {
            what: "prime limit needed for this epsilon",
            requested: table.limit() + 1,
            budget: table.limit(),
        });
    }
    let mut a = at(0)?;
    if a == 0 {
        return Err(GenError::Domain(format!(
            "epsilon {} is too large: the candidate is 1",
            eps
        )));
    }
    let mut runs = Vec::new();
    let mut start = 0usize;
    while a > 0 {
        // Largest index whose exponent is still >= a.
        let (mut lo, mut hi) = (start, last);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if at(mid)? >= a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        runs.push(Run::new(a, (lo - start + 1) as u64));
        start = lo + 1;
        a = at(start)?;
    }
    Ok(CandidateFactorization::from_runs(runs)?)
}

/// Distinct CA candidates for `ε_j = ε_0 q^j`, `j = 0, 1, …`, stopping after
/// `count` distinct values.
pub fn ca_sweep(
    eps0: &BigRational,
    q: &BigRational,
    count: usize,
    table: &PrimeTable,
    prec: u32,
) -> Result<Vec<(BigRational, CandidateFactorization)>, GenError> {
    let one = BigRational::one();
    if q <= &BigRational::from_integer(0.into()) || q >= &one {
        return Err(GenError::Domain("sweep ratio must lie in (0, 1)".into()));
    }
    let mut out: Vec<(BigRational, CandidateFactorization)> = Vec::new();
    let mut eps = eps0.clone();
    while out.len() < count {
        match ca_candidate(&eps, table, prec) {
            Ok(c) => {
                if out.last().is_none_or(|(_, prev)| *prev != c) {
                    out.push((eps.clone(), c));
                }
            }
            Err(GenError::Domain(_)) if out.is_empty() => {}
            Err(e) => return Err(e),
        }
        eps = &eps * q;
    }
    Ok(out)
}
