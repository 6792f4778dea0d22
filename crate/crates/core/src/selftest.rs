//! Embedded oracle-equivalence suite.
//!
//! Every case compares a library routine with an independent computation.
//! The constants table is a parameter so a corrupted table can be injected.

use serde::Serialize;

use crate::audit::{compute_l, UContext};
use crate::corpus;
use crate::factored;
use crate::generators::{sigma_segment, superabundant_up_to, verify_range, VerifyConfig};
use crate::numeric::{Constants, Interval, IvOrdering};
use crate::primes::PrimeTable;

const SIEVE_LIMIT: usize = 100_000;
const SA_LIMIT: usize = 100_000;
const EXCEPTION_LIMIT: usize = 5040;
const BRACKET_MAX_PR: u64 = 10_000;
const BRACKET_CANDIDATES: usize = 50;
/// Terms of the harmonic series behind the gamma enclosure.
const GAMMA_TERMS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestCase {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub precision_bits: u32,
    pub cases: Vec<SelftestCase>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&SelftestCase> {
        self.cases.iter().find(|c| !c.passed)
    }
}

fn divisor_sums(limit: usize) -> Vec<u64> {
    let mut s = vec![0u64; limit + 1];
    for d in 1..=limit {
        for m in (d..=limit).step_by(d) {
            s[m] += d as u64;
        }
    }
    s
}

fn case(name: &'static str, result: Result<String, String>) -> SelftestCase {
    let passed = result.is_ok();
    SelftestCase {
        name,
        passed,
        detail: result.unwrap_or_else(|e| e),
    }
}

fn sigma_sieve(sums: &[u64]) -> Result<String, String> {
    let t = PrimeTable::build(400).map_err(|e| e.to_string())?;
    let got = sigma_segment(1, SIEVE_LIMIT as u64, t.primes());
    match (1..=SIEVE_LIMIT).find(|&n| got[n - 1] != sums[n]) {
        Some(n) => Err(format!("sigma({n}): sieve {} vs divisor sum {}", got[n - 1], sums[n])),
        None => Ok(format!("{SIEVE_LIMIT} values agree")),
    }
}

/// `γ = H_N − ln N − 1/(2N) + 1/(12N²) − 1/(120N⁴) + R`, `|R| <= 1/(252 N⁶)`.
fn gamma_enclosure(prec: u32) -> Interval {
    let n = GAMMA_TERMS;
    let w = prec + 32;
    let frac = |num: u64, den: u128| Interval::from_ratio(&num.into(), &den.into(), w).expect("nonzero");
    let mut h = Interval::from_u64(0, w);
    for k in 1..=n {
        h = h.add(&frac(1, k as u128));
    }
    let nn = n as u128;
    let approx = h
        .sub(&Interval::from_u64(n, w).ln().expect("positive"))
        .sub(&frac(1, 2 * nn))
        .add(&frac(1, 12 * nn.pow(2)))
        .sub(&frac(1, 120 * nn.pow(4)));
    let r = frac(1, 252 * nn.pow(6));
    let pad = Interval::from_bounds(r.neg().lo().clone(), r.hi().clone(), w).expect("ordered");
    approx.add(&pad)
}

fn gamma_check(consts: &Constants) -> Result<String, String> {
    let oracle = gamma_enclosure(consts.precision);
    match consts.gamma.compare(&oracle) {
        IvOrdering::Overlapping => Ok(format!(
            "table gamma overlaps the harmonic-series enclosure (N = {GAMMA_TERMS})"
        )),
        other => Err(format!(
            "table gamma {:.17} lies {} the harmonic-series value {:.17}",
            consts.gamma.mid_f64(),
            if other == IvOrdering::CertainlyLess {
                "below"
            } else {
                "above"
            },
            oracle.mid_f64()
        )),
    }
}

fn exceptions(consts: &Constants, sums: &[u64]) -> Result<String, String> {
    // Float oracle with gamma from the same series, evaluated in f64.
    let n = GAMMA_TERMS as f64;
    let h: f64 = (1..=GAMMA_TERMS).map(|k| 1.0 / k as f64).sum();
    let gamma = h - n.ln() - 1.0 / (2.0 * n) + 1.0 / (12.0 * n * n);
    let eg = gamma.exp();
    let mut expected = Vec::new();
    for (m, &s) in sums.iter().enumerate().take(EXCEPTION_LIMIT + 1).skip(3) {
        let thr = eg * m as f64 * (m as f64).ln().ln();
        if s as f64 > thr {
            expected.push(m as u64);
        }
    }
    let cfg = VerifyConfig {
        precision: consts.precision,
        exp_gamma: Some(consts.exp_gamma.clone()),
        ..VerifyConfig::default()
    };
    let rep = verify_range(3, EXCEPTION_LIMIT as u64, &cfg).map_err(|e| e.to_string())?;
    if !rep.unknowns.is_empty() {
        return Err(format!("{} undecided n in [3, {EXCEPTION_LIMIT}]", rep.unknowns.len()));
    }
    let got: Vec<u64> = rep.violations.iter().map(|r| r.n).collect();
    if got != expected {
        let diff = got
            .iter()
            .chain(&expected)
            .find(|m| got.contains(m) != expected.contains(m));
        return Err(format!(
            "violations in [3, {EXCEPTION_LIMIT}] differ from the oracle at n = {}",
            diff.copied().unwrap_or(0)
        ));
    }
    Ok(format!("{} violations in [3, {EXCEPTION_LIMIT}] agree", got.len()))
}

fn superabundant(sums: &[u64]) -> Result<String, String> {
    let mut expected = vec![1u64];
    let (mut bn, mut bs) = (1u64, 1u64);
    for m in 2..=SA_LIMIT as u64 {
        let s = sums[m as usize];
        if s as u128 * bn as u128 > bs as u128 * m as u128 {
            (bn, bs) = (m, s);
            expected.push(m);
        }
    }
    let got: Vec<u64> = superabundant_up_to(SA_LIMIT as u64)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|r| r.n)
        .collect();
    if got != expected {
        let k = got.iter().zip(&expected).take_while(|(a, b)| a == b).count();
        return Err(format!("record {k} differs: {:?} vs {:?}", got.get(k), expected.get(k)));
    }
    Ok(format!("{} records up to {SA_LIMIT} agree", got.len()))
}

fn bracket_floor(prec: u32) -> Result<String, String> {
    let t = PrimeTable::build(2 * BRACKET_MAX_PR).map_err(|e| e.to_string())?;
    let corpus = corpus::window_ca(BRACKET_CANDIDATES, BRACKET_MAX_PR, &t, prec).map_err(|e| e.to_string())?;
    let mut pairs = 0usize;
    for c in &corpus {
        let p_r = t.nth_prime(c.r()).map_err(|e| e.to_string())?;
        let log_n = factored::log_n(c, &t, prec).map_err(|e| e.to_string())?;
        let ctx = UContext::new(log_n).map_err(|e| format!("{c}: {e}"))?;
        for &p in t.primes().iter().take_while(|&&p| p as u64 <= p_r) {
            let u = ctx.compute_u(p as u64).map_err(|e| format!("{c}: {e}"))?;
            let l = compute_l(p_r, p as u64, prec).map_err(|e| e.to_string())?;
            if l > u as u64 {
                return Err(format!("{c}: L({p}) = {l} exceeds U = {u}"));
            }
            pairs += 1;
        }
    }
    Ok(format!(
        "{pairs} (candidate, prime) pairs over {} candidates agree",
        corpus.len()
    ))
}

/// Runs every case with the given constants table.
pub fn run_selftest(consts: &Constants) -> SelftestReport {
    let sums = divisor_sums(SIEVE_LIMIT.max(SA_LIMIT).max(EXCEPTION_LIMIT));
    SelftestReport {
        precision_bits: consts.precision,
        cases: vec![
            case("sigma_sieve", sigma_sieve(&sums)),
            case("gamma", gamma_check(consts)),
            case("robin_exceptions", exceptions(consts, &sums)),
            case("superabundant", superabundant(&sums)),
            case("bracket_floor", bracket_floor(consts.precision)),
        ],
    }
}
