//! Candidates given by their factorization over an initial run of primes.
//!
//! A candidate `n = p_1^{a_1} ⋯ p_r^{a_r}` is stored as runs of equal
//! exponents, so superabundant-shaped numbers with millions of prime factors
//! take a few dozen words. All analytic quantities are certified intervals.
//!
//! Long products are split into fixed chunks whose exact values are
//! converted to intervals once; chunk boundaries depend only on the
//! candidate, so results are reproducible bit for bit.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{Interval, NumericError};
use crate::primes::PrimeTable;

/// Longest explicit exponent list accepted.
pub const MAX_EXPLICIT_LEN: usize = 1 << 20;

/// Default size limit for [`materialize`], in bits.
pub const DEFAULT_MATERIALIZE_BITS: u64 = 1 << 20;

/// Target size of one exact chunk product, in bits.
const CHUNK_BITS: u64 = 8192;

/// Above this many bits `p^k` is handled with interval powers instead.
const EXACT_POWER_BITS: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactoredError {
    #[error("{path}: {reason}")]
    InvalidField { path: String, reason: String },
    #[error("candidate needs the first {need} primes but the table holds {have}")]
    TableTooSmall { need: u64, have: u64 },
    #[error("prime index {index} is outside 1..={r}")]
    IndexOutOfRange { index: u64, r: u64 },
    #[error("log log n is undefined: log n is not certainly above 1")]
    LogLogDomain,
    #[error("{0}")]
    Precondition(String),
    #[error("candidate has about {bits} bits, above the budget of {budget}")]
    Budget { bits: u64, budget: u64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> FactoredError {
    FactoredError::InvalidField {
        path: path.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    pub exponent: u32,
    pub count: u64,
}

impl Run {
    pub fn new(exponent: u32, count: u64) -> Self {
        Run { exponent, count }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    runs: Option<Vec<Run>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponents: Option<Vec<u32>>,
}

/// `n = ∏ p_i^{a_i}` over the first `r` primes, run-length encoded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CandidateRepr", into = "CandidateRepr")]
pub struct CandidateFactorization {
    runs: Vec<Run>,
    /// `ends[j]` is the last prime index covered by run `j`.
    ends: Vec<u64>,
    canonical: bool,
}

impl TryFrom<CandidateRepr> for CandidateFactorization {
    type Error = FactoredError;

    fn try_from(repr: CandidateRepr) -> Result<Self, FactoredError> {
        match (repr.runs, repr.exponents) {
            (Some(runs), None) => CandidateFactorization::from_runs(runs),
            (None, Some(exps)) => CandidateFactorization::from_exponents(&exps),
            (Some(_), Some(_)) => Err(invalid("candidate", "give either `runs` or `exponents`, not both")),
            (None, None) => Err(invalid("candidate", "missing `runs` or `exponents`")),
        }
    }
}

impl From<CandidateFactorization> for CandidateRepr {
    fn from(c: CandidateFactorization) -> Self {
        if c.canonical {
            CandidateRepr {
                runs: Some(c.runs),
                exponents: None,
            }
        } else {
            let exps = c
                .runs
                .iter()
                .flat_map(|r| std::iter::repeat_n(r.exponent, r.count as usize))
                .collect();
            CandidateRepr {
                runs: None,
                exponents: Some(exps),
            }
        }
    }
}

/// Parses candidate JSON, naming the offending field on failure.
pub fn parse_candidate_json(text: &str) -> Result<CandidateFactorization, FactoredError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let repr: CandidateRepr = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        invalid(
            if path == "." { "candidate".to_string() } else { path },
            e.into_inner().to_string(),
        )
    })?;
    de.end().map_err(|e| invalid("candidate", e.to_string()))?;
    CandidateFactorization::try_from(repr)
}

impl CandidateFactorization {
    /// Canonical form: exponents must strictly decrease from run to run.
    pub fn from_runs(runs: Vec<Run>) -> Result<Self, FactoredError> {
        if runs.is_empty() {
            return Err(invalid("runs", "at least one run is required"));
        }
        for (j, run) in runs.iter().enumerate() {
            if run.exponent == 0 {
                return Err(invalid(format!("runs[{j}].exponent"), "must be at least 1"));
            }
            if run.count == 0 {
                return Err(invalid(format!("runs[{j}].count"), "must be at least 1"));
            }
            if j > 0 && run.exponent >= runs[j - 1].exponent {
                return Err(invalid(
                    format!("runs[{j}].exponent"),
                    "run exponents must strictly decrease; use `exponents` for other shapes",
                ));
            }
        }
        Ok(Self::assemble(runs))
    }

    /// Explicit exponent list; non-increasing lists are canonical, any other
    /// shape is accepted but flagged.
    pub fn from_exponents(exps: &[u32]) -> Result<Self, FactoredError> {
        if exps.is_empty() {
            return Err(invalid("exponents", "at least one exponent is required"));
        }
        if exps.len() > MAX_EXPLICIT_LEN {
            return Err(invalid(
                "exponents",
                format!(
                    "{} entries exceed the limit of {MAX_EXPLICIT_LEN}; use `runs`",
                    exps.len()
                ),
            ));
        }
        if let Some(k) = exps.iter().position(|&a| a == 0) {
            return Err(invalid(format!("exponents[{k}]"), "must be at least 1"));
        }
        Ok(Self::assemble(exps.iter().map(|&a| Run::new(a, 1)).collect()))
    }

    /// The product of the first `k` primes.
    pub fn primorial(k: u64) -> Self {
        assert!(k >= 1, "primorial needs k >= 1");
        Self::assemble(vec![Run::new(1, k)])
    }

    /// Merges equal neighbours and drops empty runs. Exponents must be >= 1.
    fn assemble(runs: Vec<Run>) -> Self {
        let mut merged: Vec<Run> = Vec::with_capacity(runs.len());
        for run in runs.into_iter().filter(|r| r.count > 0) {
            debug_assert!(run.exponent >= 1);
            match merged.last_mut() {
                Some(last) if last.exponent == run.exponent => last.count += run.count,
                _ => merged.push(run),
            }
        }
        let canonical = merged.windows(2).all(|w| w[0].exponent > w[1].exponent);
        let ends = merged
            .iter()
            .scan(0u64, |acc, r| {
                *acc += r.count;
                Some(*acc)
            })
            .collect();
        CandidateFactorization {
            runs: merged,
            ends,
            canonical,
        }
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Number of distinct prime factors.
    pub fn r(&self) -> u64 {
        *self.ends.last().expect("nonempty")
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// First (1-based) prime index covered by run `j`.
    pub fn run_start(&self, j: usize) -> u64 {
        if j == 0 {
            1
        } else {
            self.ends[j - 1] + 1
        }
    }

    /// Last prime index covered by run `j`.
    pub fn run_end(&self, j: usize) -> u64 {
        self.ends[j]
    }

    /// Run containing prime index `i`.
    pub fn run_of(&self, i: u64) -> Option<usize> {
        if i == 0 || i > self.r() {
            return None;
        }
        Some(self.ends.partition_point(|&e| e < i))
    }

    /// `a_i`, 1-based; zero beyond `r`.
    pub fn exponent(&self, i: u64) -> u32 {
        self.run_of(i).map_or(0, |j| self.runs[j].exponent)
    }

    pub fn to_exponents(&self) -> Result<Vec<u32>, FactoredError> {
        if self.r() > MAX_EXPLICIT_LEN as u64 {
            return Err(FactoredError::Budget {
                bits: self.r(),
                budget: MAX_EXPLICIT_LEN as u64,
            });
        }
        Ok(self
            .runs
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.exponent, r.count as usize))
            .collect())
    }

    /// Number of indices with `a_i ≠ 1`.
    pub fn non_unit_count(&self) -> u64 {
        self.runs.iter().filter(|r| r.exponent != 1).map(|r| r.count).sum()
    }

    /// Largest index `s` with `a_s ≠ 1`.
    pub fn last_non_unit_index(&self) -> Option<u64> {
        (0..self.runs.len())
            .rev()
            .find(|&j| self.runs[j].exponent != 1)
            .map(|j| self.run_end(j))
    }

    /// Copy with `a_i` replaced. `a = 0` is only allowed at `i = r`, which
    /// drops the largest prime; `i = r + 1` appends the next prime.
    pub fn with_exponent(&self, i: u64, a: u32) -> Result<Self, FactoredError> {
        let r = self.r();
        if i == 0 || i > r + 1 {
            return Err(FactoredError::IndexOutOfRange { index: i, r });
        }
        if a == 0 && i != r {
            return Err(FactoredError::Precondition(format!(
                "setting a_{i} to 0 would leave a gap in the prime support"
            )));
        }
        if a == 0 && r == 1 {
            return Err(FactoredError::Precondition("candidate would become 1".into()));
        }
        let mut runs = Vec::with_capacity(self.runs.len() + 2);
        if i == r + 1 {
            runs.extend_from_slice(&self.runs);
            runs.push(Run::new(a, 1));
            return Ok(Self::assemble(runs));
        }
        let j = self.run_of(i).expect("index within r");
        let (start, end) = (self.run_start(j), self.run_end(j));
        let e = self.runs[j].exponent;
        runs.extend_from_slice(&self.runs[..j]);
        runs.push(Run::new(e, i - start));
        if a > 0 {
            runs.push(Run::new(a, 1));
        }
        runs.push(Run::new(e, end - i));
        runs.extend_from_slice(&self.runs[j + 1..]);
        Ok(Self::assemble(runs))
    }

    /// `n / p_s`.
    pub fn divided_by(&self, s: u64) -> Result<Self, FactoredError> {
        let a = self.exponent(s);
        if a == 0 {
            return Err(FactoredError::IndexOutOfRange { index: s, r: self.r() });
        }
        self.with_exponent(s, a - 1)
    }

    /// `n · p_s / p_r`; requires `s < r` and `a_r = 1`.
    pub fn swapped(&self, s: u64) -> Result<Self, FactoredError> {
        let r = self.r();
        if s == 0 || s >= r {
            return Err(FactoredError::IndexOutOfRange {
                index: s,
                r: r.saturating_sub(1),
            });
        }
        if self.exponent(r) != 1 {
            return Err(FactoredError::Precondition(format!(
                "swap needs a_r = 1, found a_r = {}",
                self.exponent(r)
            )));
        }
        self.with_exponent(s, self.exponent(s) + 1)?.with_exponent(r, 0)
    }
}

impl fmt::Display for CandidateFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .runs
            .iter()
            .map(|r| format!("{}x{}", r.exponent, r.count))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The primes `p_1..p_r` of the candidate.
fn support<'t>(c: &CandidateFactorization, t: &'t PrimeTable) -> Result<&'t [u32], FactoredError> {
    let r = c.r();
    if r > t.len() {
        return Err(FactoredError::TableTooSmall { need: r, have: t.len() });
    }
    Ok(&t.primes()[..r as usize])
}

fn prime_at(t: &PrimeTable, i: u64) -> Result<u64, FactoredError> {
    t.nth_prime(i)
        .map_err(|_| FactoredError::TableTooSmall { need: i, have: t.len() })
}

fn bit_len(x: u64) -> u64 {
    64 - x.leading_zeros() as u64
}

/// Working precision for a sum or product of `terms` enclosures.
fn work_prec(prec: u32, terms: usize) -> u32 {
    prec + 24 + bit_len(terms as u64) as u32
}

/// A slice of primes sharing one exponent.
struct Chunk {
    lo: usize,
    hi: usize,
    exponent: u32,
}

/// Splits every run into chunks whose exact products stay near
/// [`CHUNK_BITS`]; `elem_bits` estimates the bits one prime contributes.
fn chunks(c: &CandidateFactorization, primes: &[u32], elem_bits: impl Fn(u32, u64) -> u64) -> Vec<Chunk> {
    let mut out = Vec::new();
    for (j, run) in c.runs.iter().enumerate() {
        let lo = (c.run_start(j) - 1) as usize;
        let hi = c.run_end(j) as usize;
        let pbits = bit_len(primes[hi - 1] as u64);
        let per = (CHUNK_BITS / elem_bits(run.exponent, pbits).max(1)).max(1) as usize;
        let mut k = lo;
        while k < hi {
            let e = (k + per).min(hi);
            out.push(Chunk {
                lo: k,
                hi: e,
                exponent: run.exponent,
            });
            k = e;
        }
    }
    out
}

fn product(ps: &[u32]) -> BigInt {
    ps.iter().fold(BigInt::one(), |acc, &p| acc * p)
}

fn product_intervals(parts: Vec<Interval>, prec: u32) -> Interval {
    parts.iter().fold(Interval::from_u64(1, prec), |acc, x| acc.mul(x))
}

/// Enclosure of `log p`.
pub fn ln_prime(p: u64, prec: u32) -> Interval {
    Interval::from_u64(p, prec).ln().expect("p >= 2")
}

/// Enclosure of `1 − p^{-k}` for `k >= 1`.
fn one_minus_pow_neg(p: u64, k: u64, prec: u32) -> Result<Interval, FactoredError> {
    let one = Interval::from_u64(1, prec);
    if k.saturating_mul(bit_len(p)) <= EXACT_POWER_BITS {
        let pk: BigInt = BigInt::from(p).pow(k as u32);
        return Ok(Interval::from_ratio(&(&pk - 1u32), &pk, prec)?);
    }
    let inv = Interval::from_ratio(&BigInt::one(), &BigInt::from(p), prec)?;
    let k = i64::try_from(k).map_err(|_| NumericError::Overflow)?;
    Ok(one.sub(&inv.powi(k)?))
}

/// Enclosure of `log n = Σ a_i log p_i`.
///
/// The result carries guard bits above `prec`, so its width stays below
/// `r · 2^(1−prec) · max(a_i log p_i)`.
pub fn log_n(c: &CandidateFactorization, t: &PrimeTable, prec: u32) -> Result<Interval, FactoredError> {
    let primes = support(c, t)?;
    let parts = chunks(c, primes, |_, pbits| pbits);
    let w = work_prec(prec, parts.len());
    let terms: Vec<Interval> = parts
        .par_iter()
        .map(|ch| {
            Interval::from_int(&product(&primes[ch.lo..ch.hi]), w + 8)
                .ln()
                .map(|l| l.mul_u64(ch.exponent as u64).with_precision(w))
        })
        .collect::<Result<_, _>>()?;
    Ok(terms.iter().fold(Interval::from_u64(0, w), |acc, x| acc.add(x)))
}

/// Enclosure of `ρ(n) = σ(n)/n = ∏ (1 − p^{−(a+1)}) / (1 − p^{−1})`.
pub fn rho(c: &CandidateFactorization, t: &PrimeTable, prec: u32) -> Result<Interval, FactoredError> {
    let primes = support(c, t)?;
    let parts = chunks(c, primes, |a, pbits| (a as u64 + 1) * pbits);
    let w = work_prec(prec, parts.len());
    let factors: Vec<Interval> = parts
        .par_iter()
        .map(|ch| -> Result<Interval, FactoredError> {
            let a = ch.exponent as u64;
            let ps = &primes[ch.lo..ch.hi];
            if (a + 1) * 32 <= EXACT_POWER_BITS {
                let (mut num, mut den) = (BigInt::one(), BigInt::one());
                for &p in ps {
                    let pa: BigInt = BigInt::from(p).pow(ch.exponent);
                    num *= &pa * p - 1u32;
                    den *= pa * (p - 1);
                }
                Ok(Interval::from_ratio(&num, &den, w)?)
            } else {
                let mut acc = Interval::from_u64(1, w);
                for &p in ps {
                    let f = one_minus_pow_neg(p as u64, a + 1, w)?.div(&one_minus_pow_neg(p as u64, 1, w)?)?;
                    acc = acc.mul(&f);
                }
                Ok(acc)
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(product_intervals(factors, w))
}

/// Enclosure of `n/φ(n) = ∏ p/(p − 1)`.
pub fn n_over_phi(c: &CandidateFactorization, t: &PrimeTable, prec: u32) -> Result<Interval, FactoredError> {
    let primes = support(c, t)?;
    let parts = chunks(c, primes, |_, pbits| pbits);
    let w = work_prec(prec, parts.len());
    let factors: Vec<Interval> = parts
        .par_iter()
        .map(|ch| {
            let ps = &primes[ch.lo..ch.hi];
            let den = ps.iter().fold(BigInt::one(), |acc, &p| acc * (p - 1));
            Interval::from_ratio(&product(ps), &den, w)
        })
        .collect::<Result<_, _>>()?;
    Ok(product_intervals(factors, w))
}

/// `log log n`, failing unless `log n > 1` is certain.
pub fn loglog(log_n: &Interval) -> Result<Interval, FactoredError> {
    let one = Interval::from_u64(1, log_n.precision());
    if log_n.gt(&one) != Some(true) {
        return Err(FactoredError::LogLogDomain);
    }
    Ok(log_n.ln()?)
}

/// Enclosure of `G(n) = ρ(n) / log log n`.
pub fn big_g(c: &CandidateFactorization, t: &PrimeTable, prec: u32) -> Result<Interval, FactoredError> {
    let ll = loglog(&log_n(c, t, prec)?)?;
    Ok(rho(c, t, prec)?.div(&ll)?)
}

/// The analytic quantities of a candidate, computed together.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedScalars {
    pub log_n: Interval,
    pub loglog_n: Option<Interval>,
    pub rho: Interval,
    #[serde(rename = "G")]
    pub g: Option<Interval>,
    pub n_over_phi: Interval,
}

impl DerivedScalars {
    pub fn compute(c: &CandidateFactorization, t: &PrimeTable, prec: u32) -> Result<Self, FactoredError> {
        let log_n = log_n(c, t, prec)?;
        let rho = rho(c, t, prec)?;
        let loglog_n = loglog(&log_n).ok();
        let g = match &loglog_n {
            Some(ll) => Some(rho.div(ll)?),
            None => None,
        };
        Ok(DerivedScalars {
            log_n,
            loglog_n,
            rho,
            g,
            n_over_phi: n_over_phi(c, t, prec)?,
        })
    }
}

/// `G(n)/G(n/p_s)` from the change in one Euler factor and in `log n`.
pub fn g_ratio_divide(
    c: &CandidateFactorization,
    s: u64,
    t: &PrimeTable,
    prec: u32,
) -> Result<Interval, FactoredError> {
    let ln = log_n(c, t, prec)?;
    g_ratio_divide_with(c, s, t, &ln)
}

/// As [`g_ratio_divide`] with `log n` already known.
pub fn g_ratio_divide_with(
    c: &CandidateFactorization,
    s: u64,
    t: &PrimeTable,
    log_n: &Interval,
) -> Result<Interval, FactoredError> {
    let a = c.exponent(s) as u64;
    if a == 0 {
        return Err(FactoredError::IndexOutOfRange { index: s, r: c.r() });
    }
    if c.r() == 1 && a == 1 {
        return Err(FactoredError::Precondition("n / p_s would be 1".into()));
    }
    let w = log_n.precision();
    let p = prime_at(t, s)?;
    // ρ(n)/ρ(n/p) = (1 − p^{−(a+1)}) / (1 − p^{−a})
    let euler = one_minus_pow_neg(p, a + 1, w)?.div(&one_minus_pow_neg(p, a, w)?)?;
    let log_n1 = log_n.sub(&ln_prime(p, w));
    Ok(euler.mul(&loglog(&log_n1)?).div(&loglog(log_n)?)?)
}

/// `G(n)/G(n p_s / p_r)`; requires `s < r` and `a_r = 1`.
pub fn g_ratio_swap(c: &CandidateFactorization, s: u64, t: &PrimeTable, prec: u32) -> Result<Interval, FactoredError> {
    let ln = log_n(c, t, prec)?;
    g_ratio_swap_with(c, s, t, &ln)
}

/// As [`g_ratio_swap`] with `log n` already known.
pub fn g_ratio_swap_with(
    c: &CandidateFactorization,
    s: u64,
    t: &PrimeTable,
    log_n: &Interval,
) -> Result<Interval, FactoredError> {
    let r = c.r();
    if s == 0 || s >= r {
        return Err(FactoredError::IndexOutOfRange {
            index: s,
            r: r.saturating_sub(1),
        });
    }
    if c.exponent(r) != 1 {
        return Err(FactoredError::Precondition(format!(
            "swap needs a_r = 1, found a_r = {}",
            c.exponent(r)
        )));
    }
    let w = log_n.precision();
    let a = c.exponent(s) as u64;
    let (ps, pr) = (prime_at(t, s)?, prime_at(t, r)?);
    // p_s gains one exponent, p_r (exponent 1, factor 1 + 1/p_r) leaves.
    let euler_s = one_minus_pow_neg(ps, a + 1, w)?.div(&one_minus_pow_neg(ps, a + 2, w)?)?;
    let euler_r = Interval::from_ratio(&BigInt::from(pr + 1), &BigInt::from(pr), w)?;
    let log_n1 = log_n.add(&ln_prime(ps, w)).sub(&ln_prime(pr, w));
    Ok(euler_s.mul(&euler_r).mul(&loglog(&log_n1)?).div(&loglog(log_n)?)?)
}

/// Exact value of the candidate, if it has at most `budget_bits` bits.
pub fn materialize(c: &CandidateFactorization, t: &PrimeTable, budget_bits: u64) -> Result<BigInt, FactoredError> {
    let primes = support(c, t)?;
    let mut bits: u64 = 0;
    for (j, run) in c.runs.iter().enumerate() {
        let pbits = bit_len(primes[c.run_end(j) as usize - 1] as u64);
        bits = bits.saturating_add(run.count.saturating_mul(run.exponent as u64).saturating_mul(pbits));
    }
    if bits > budget_bits {
        return Err(FactoredError::Budget {
            bits,
            budget: budget_bits,
        });
    }
    let mut n = BigInt::one();
    for (j, run) in c.runs.iter().enumerate() {
        let lo = c.run_start(j) as usize - 1;
        let hi = c.run_end(j) as usize;
        n *= product(&primes[lo..hi]).pow(run.exponent);
    }
    Ok(n)
}

/// Sum-of-two-squares criterion on an arbitrary factorization given as
/// `(prime, exponent)` pairs.
pub fn two_squares_criterion(factors: impl IntoIterator<Item = (u64, u32)>) -> bool {
    factors.into_iter().all(|(p, a)| p % 4 != 3 || a % 2 == 0)
}

/// Whether `n` is a sum of two squares: every prime `≡ 3 (mod 4)` has an even exponent.
pub fn is_sum_of_two_squares(c: &CandidateFactorization, t: &PrimeTable) -> Result<bool, FactoredError> {
    let primes = support(c, t)?;
    Ok(c.runs.iter().enumerate().all(|(j, run)| {
        run.exponent % 2 == 0 || {
            let lo = c.run_start(j) as usize - 1;
            primes[lo..c.run_end(j) as usize].iter().all(|&p| p % 4 != 3)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::build(1000).unwrap()
    }

    fn exps(e: &[u32]) -> CandidateFactorization {
        CandidateFactorization::from_exponents(e).unwrap()
    }

    #[test]
    fn run_length_round_trip() {
        let c = exps(&[4, 2, 1, 1, 1]);
        assert!(c.is_canonical());
        assert_eq!(c.runs(), &[Run::new(4, 1), Run::new(2, 1), Run::new(1, 3)]);
        assert_eq!(c.to_exponents().unwrap(), vec![4, 2, 1, 1, 1]);
        assert_eq!((c.r(), c.exponent(1), c.exponent(4), c.exponent(6)), (5, 4, 1, 0));
        assert!(!exps(&[1, 2]).is_canonical());
        assert!(CandidateFactorization::from_runs(vec![Run::new(1, 1), Run::new(2, 1)]).is_err());
        assert!(CandidateFactorization::from_runs(vec![Run::new(2, 1), Run::new(2, 1)]).is_err());
    }

    #[test]
    fn json_forms() {
        let c = parse_candidate_json(
            r#"{"runs":[{"exponent":4,"count":1},{"exponent":2,"count":1},{"exponent":1,"count":3}]}"#,
        )
        .unwrap();
        assert_eq!(c, exps(&[4, 2, 1, 1, 1]));
        assert_eq!(parse_candidate_json(r#"{"exponents":[4,2,1,1,1]}"#).unwrap(), c);
        assert_eq!(serde_json::to_string(&exps(&[1, 2])).unwrap(), r#"{"exponents":[1,2]}"#);
        let err = parse_candidate_json(r#"{"exponents":[4,-2]}"#).unwrap_err();
        assert!(err.to_string().starts_with("exponents[1]"), "{err}");
        let err = parse_candidate_json(r#"{"runs":[{"exponent":2,"count":0}]}"#).unwrap_err();
        assert!(err.to_string().starts_with("runs[0].count"), "{err}");
        let err = parse_candidate_json(r#"{"runs":[{"exponent":2,"count":1,"x":1}]}"#).unwrap_err();
        assert!(err.to_string().starts_with("runs[0]"), "{err}");
    }

    #[test]
    fn edits() {
        let c = exps(&[4, 2, 1, 1, 1]);
        assert_eq!(c.divided_by(1).unwrap(), exps(&[3, 2, 1, 1, 1]));
        assert_eq!(c.divided_by(5).unwrap(), exps(&[4, 2, 1, 1]));
        assert_eq!(c.swapped(1).unwrap(), exps(&[5, 2, 1, 1]));
        assert_eq!(c.with_exponent(6, 1).unwrap(), exps(&[4, 2, 1, 1, 1, 1]));
        assert!(c.with_exponent(3, 0).is_err());
        assert!(exps(&[2, 2]).swapped(1).is_err());
        assert_eq!(c.non_unit_count(), 2);
        assert_eq!(c.last_non_unit_index(), Some(2));
        assert_eq!(exps(&[1, 1]).last_non_unit_index(), None);
    }

    #[test]
    fn materialize_and_two_squares() {
        let t = table();
        assert_eq!(materialize(&exps(&[4, 2, 1, 1]), &t, 64).unwrap(), BigInt::from(5040));
        assert_eq!(
            materialize(&exps(&[4, 2, 1, 1, 1]), &t, 64).unwrap(),
            BigInt::from(55440)
        );
        assert!(materialize(&exps(&[200]), &t, 64).is_err());
        assert!(two_squares_criterion([(2, 1), (5, 2)]));
        assert!(!two_squares_criterion([(3, 1), (7, 1)]));
        assert!(two_squares_criterion([(3, 2)]));
        assert!(is_sum_of_two_squares(&exps(&[3, 2, 2]), &t).unwrap());
        assert!(is_sum_of_two_squares(&exps(&[7]), &t).unwrap());
        assert!(!is_sum_of_two_squares(&exps(&[4, 2, 1, 1, 1]), &t).unwrap());
    }
}
