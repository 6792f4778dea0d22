use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use robin_core::factored::materialize;
use robin_core::generators::*;
use robin_core::primes::PrimeTable;

const EXP_GAMMA: f64 = 1.781_072_417_990_198;

/// σ for all n <= limit by adding each divisor to its multiples.
fn divisor_sums(limit: usize) -> Vec<u64> {
    let mut s = vec![0u64; limit + 1];
    for d in 1..=limit {
        for m in (d..=limit).step_by(d) {
            s[m] += d as u64;
        }
    }
    s
}

#[test]
fn sieve_agrees_with_naive_up_to_1e5() {
    let table = PrimeTable::build(400).unwrap();
    let s = sigma_segment(1, 100_000, table.primes());
    for n in 1..=100_000u64 {
        assert_eq!(s[n as usize - 1], sigma_naive(n));
    }
}

#[test]
fn exceptions_match_float_oracle() {
    let s = divisor_sums(5040);
    let mut expected = Vec::new();
    for (n, &sn) in s.iter().enumerate().take(5041).skip(3) {
        let thr = EXP_GAMMA * n as f64 * (n as f64).ln().ln();
        let gap = (sn as f64 - thr) / thr;
        assert!(gap.abs() > 1e-9, "float oracle too close to call at {n}");
        if gap > 0.0 {
            expected.push(n as u64);
        }
    }
    let got = robin_exceptions();
    assert_eq!(got, expected);
    assert!(got.contains(&5040));
    assert!(!got.iter().any(|&n| n > 2520 && n < 5040));
    let rep = verify_range(3, 5040, &VerifyConfig::default()).unwrap();
    assert!(rep.unknowns.is_empty());
    for r in &rep.violations {
        let thr_ceil = r.threshold.hi().ceil().to_u64().unwrap();
        assert!(r.sigma > thr_ceil - 1);
    }
}

#[test]
fn no_violations_above_5040_to_a_million() {
    let rep = verify_range(5041, 1_000_000, &VerifyConfig::default()).unwrap();
    assert!(rep.violations.is_empty() && rep.unknowns.is_empty());
}

#[test]
fn verdicts_stable_under_precision() {
    let sets: Vec<Vec<u64>> = [64u32, 128, 256]
        .iter()
        .map(|&p| {
            let cfg = VerifyConfig {
                precision: p,
                ..VerifyConfig::default()
            };
            let rep = verify_range(3, 50_000, &cfg).unwrap();
            assert!(rep.unknowns.is_empty());
            rep.violations.iter().map(|r| r.n).collect()
        })
        .collect();
    assert!(sets.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn corrupted_constant_changes_the_answer() {
    let bad = robin_core::numeric::Interval::from_decimal("1.70", 128).unwrap();
    let cfg = VerifyConfig {
        exp_gamma: Some(bad),
        ..VerifyConfig::default()
    };
    let rep = verify_range(5041, 20_000, &cfg).unwrap();
    assert!(!rep.violations.is_empty());
}

#[test]
fn superabundant_records_match_brute_force() {
    let limit = 1_000_000usize;
    let s = divisor_sums(limit);
    let mut expected = vec![1u64];
    let (mut bn, mut bs) = (1u64, 1u64);
    for n in 2..=limit as u64 {
        if s[n as usize] * bn > bs * n {
            bn = n;
            bs = s[n as usize];
            expected.push(n);
        }
    }
    let got: Vec<u64> = superabundant_up_to(limit as u64).unwrap().iter().map(|r| r.n).collect();
    assert_eq!(got, expected);
    assert_eq!(&got[..10], &[1, 2, 4, 6, 12, 24, 36, 48, 60, 120]);
}

#[test]
fn ca_sweep_yields_superabundant_numbers() {
    let t = PrimeTable::build(100_000).unwrap();
    let sa: Vec<u64> = superabundant_up_to(1_000_000).unwrap().iter().map(|r| r.n).collect();
    let eps0 = BigRational::new(58.into(), 100.into());
    let q = BigRational::new(98.into(), 100.into());
    let sweep = ca_sweep(&eps0, &q, 14, &t, 128).unwrap();
    let values: Vec<BigInt> = sweep.iter().map(|(_, c)| materialize(c, &t, 4096).unwrap()).collect();
    for want in [2u64, 6, 12, 60, 120, 360, 2520, 5040] {
        assert!(values.contains(&BigInt::from(want)), "missing {want}");
    }
    for ((_, c), v) in sweep.iter().zip(&values) {
        assert!(c.is_canonical());
        if let Some(v) = v.to_u64().filter(|&v| v <= 1_000_000) {
            assert!(sa.contains(&v), "{v} is not superabundant");
        }
        if *v > BigInt::from(36) {
            assert_eq!(c.exponent(c.r()), 1);
        }
    }
    let default = ca_sweep(
        &BigRational::new(1.into(), 2.into()),
        &BigRational::new(9.into(), 10.into()),
        8,
        &t,
        128,
    )
    .unwrap();
    assert_eq!(default.len(), 8);
}

#[test]
fn large_ca_candidate_shape() {
    let t = PrimeTable::build(2_000_000).unwrap();
    let c = ca_candidate(&BigRational::new(1.into(), 1_000_000.into()), &t, 128).unwrap();
    assert!(c.is_canonical() && c.r() > 5000);
    assert_eq!(c.exponent(c.r()), 1);
}
