//! Deterministic candidate fixtures shared by the tests, the self-test and
//! the acceptance run.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::factored::{self, CandidateFactorization, Run};
use crate::generators::{ca_candidate, ca_sweep, GenError};
use crate::numeric::Interval;
use crate::primes::PrimeTable;

/// Seed of the default perturbation stream.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// CA candidates for `ε = 0.55 · 0.9^k`, distinct, in increasing size.
pub fn ca_grid(count: usize, t: &PrimeTable, prec: u32) -> Result<Vec<CandidateFactorization>, GenError> {
    let eps0 = BigRational::new(55.into(), 100.into());
    let q = BigRational::new(9.into(), 10.into());
    Ok(ca_sweep(&eps0, &q, count, t, prec)?
        .into_iter()
        .map(|(_, c)| c)
        .collect())
}

/// `count` grid candidates with `log n > p_r <= max_pr`, spread evenly
/// over all such candidates and always including the largest.
pub fn window_ca(
    count: usize,
    max_pr: u64,
    t: &PrimeTable,
    prec: u32,
) -> Result<Vec<CandidateFactorization>, GenError> {
    let mut eps = BigRational::new(55.into(), 100.into());
    let q = BigRational::new(9.into(), 10.into());
    let mut all: Vec<CandidateFactorization> = Vec::new();
    let mut prev: Option<CandidateFactorization> = None;
    loop {
        let c = match ca_candidate(&eps, t, prec) {
            Ok(c) => c,
            Err(GenError::Domain(_)) if prev.is_none() => {
                eps = &eps * &q;
                continue;
            }
            Err(e) => return Err(e),
        };
        eps = &eps * &q;
        if prev.as_ref() == Some(&c) {
            continue;
        }
        let p_r = t.nth_prime(c.r())?;
        if p_r > max_pr {
            break;
        }
        if factored::log_n(&c, t, prec)?.gt(&Interval::from_u64(p_r, prec)) == Some(true) {
            all.push(c.clone());
        }
        prev = Some(c);
    }
    if all.len() < count {
        return Err(GenError::Domain(format!(
            "only {} window candidates have p_r <= {max_pr}",
            all.len()
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let last = all.len() - 1;
    Ok((0..count)
        .map(|k| all[last - (count - 1 - k) * last / (count - 1).max(1)].clone())
        .collect())
}

/// Window candidates with `p_r` in `[100, 10^4]`, each with one to three
/// random exponent edits of size one or two. Exponents stay at least 1;
/// half of the edits land on the first ten primes.
pub fn perturbed_ca(
    count: usize,
    seed: u64,
    t: &PrimeTable,
    prec: u32,
) -> Result<Vec<CandidateFactorization>, GenError> {
    let bases: Vec<_> = window_ca(50, 10_000, t, prec)?
        .into_iter()
        .filter(|c| t.nth_prime(c.r()).is_ok_and(|p| p >= 100))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let base = &bases[rng.gen_range(0..bases.len())];
        let mut exps = base.to_exponents()?;
        for _ in 0..rng.gen_range(1..=3) {
            let i = if rng.gen_bool(0.5) {
                rng.gen_range(0..10)
            } else {
                rng.gen_range(0..exps.len())
            };
            let delta = rng.gen_range(1..=2u32);
            if rng.gen_bool(0.5) {
                exps[i] += delta;
            } else {
                exps[i] = exps[i].saturating_sub(delta).max(1);
            }
        }
        let c = CandidateFactorization::from_exponents(&exps)?;
        if c != *base {
            out.push(c);
        }
    }
    Ok(out)
}

fn runs(pairs: &[(u32, u64)]) -> CandidateFactorization {
    CandidateFactorization::from_runs(pairs.iter().map(|&(a, k)| Run::new(a, k)).collect()).expect("fixture runs")
}

/// Named hand-built fixtures exercising each audit outcome.
pub fn named_fixtures() -> Vec<(&'static str, CandidateFactorization)> {
    let exps = |e: &[u32]| CandidateFactorization::from_exponents(e).expect("fixture exponents");
    vec![
        ("n5040", runs(&[(4, 1), (2, 1), (1, 2)])),
        ("n55440", runs(&[(4, 1), (2, 1), (1, 3)])),
        ("n30030", CandidateFactorization::primorial(6)),
        ("n2", runs(&[(1, 1)])),
        ("n4", runs(&[(2, 1)])),
        ("n36", runs(&[(2, 2)])),
        ("n18", exps(&[1, 2])),
        ("n1800", exps(&[3, 2, 2])),
        ("primorial_97", CandidateFactorization::primorial(25)),
        // p_r = 10007 is the 1230th prime; p_s = 101 is the 26th, 3 the 2nd.
        ("s_window_101", runs(&[(2, 26), (1, 1204)])),
        ("s_window_3", runs(&[(2, 2), (1, 1228)])),
        ("exponents_pass", exps(&[20, 13, 8, 7, 6, 1])),
        ("exponents_fail_5", exps(&[20, 13, 8, 7, 5, 1])),
        ("upper_window_fail", {
            let mut e = vec![1u32; 168];
            e[0] = 100;
            exps(&e)
        }),
    ]
}
