use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robin_core::factored::*;
use robin_core::numeric::{parse_decimal, Interval, IvOrdering};
use robin_core::primes::PrimeTable;

const P: u32 = 128;

fn table() -> PrimeTable {
    PrimeTable::build(10_000).unwrap()
}

fn exps(e: &[u32]) -> CandidateFactorization {
    CandidateFactorization::from_exponents(e).unwrap()
}

/// Asserts the enclosure meets `[v − tol, v + tol]` and is narrower than `2 tol`.
fn assert_near(iv: &Interval, value: &str, tol: &str) {
    let v = parse_decimal(value).unwrap();
    let t = parse_decimal(tol).unwrap();
    let (lo, hi) = (iv.lo().to_rational(), iv.hi().to_rational());
    assert!(lo <= &v + &t && &v - &t <= hi, "{iv:?} misses {value}");
    assert!(hi - lo <= &t + &t, "{iv:?} too wide");
}

fn sigma_naive(n: u64) -> u64 {
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

#[test]
fn known_values_at_5040_and_55440() {
    let t = table();
    let c5040 = exps(&[4, 2, 1, 1]);
    let c55440 = exps(&[4, 2, 1, 1, 1]);
    assert_near(&log_n(&c5040, &t, P).unwrap(), "8.5251613610654143002", "1e-18");
    assert_near(&rho(&c5040, &t, P).unwrap(), "3.8380952380952380952", "1e-18");
    assert_near(&big_g(&c5040, &t, P).unwrap(), "1.7909733665348811334", "1e-18");
    assert_near(&log_n(&c55440, &t, P).unwrap(), "10.923056633863784844", "1e-17");
    assert_near(&rho(&c55440, &t, P).unwrap(), "4.187012987012987013", "1e-17");
    assert_near(&big_g(&c55440, &t, P).unwrap(), "1.7512465148874942469", "1e-18");
    assert_near(&n_over_phi(&c5040, &t, P).unwrap(), "4.375", "1e-30");
    assert!(rho(&c5040, &t, P)
        .unwrap()
        .contains_rational(&BigRational::new(19344.into(), 5040.into())));
    assert!(rho(&c55440, &t, P)
        .unwrap()
        .contains_rational(&BigRational::new(232128.into(), 55440.into())));
}

#[test]
fn trivial_values() {
    let t = table();
    let two = exps(&[1]);
    assert_near(&log_n(&two, &t, P).unwrap(), "0.69314718055994530942", "1e-19");
    assert!(rho(&two, &t, P)
        .unwrap()
        .contains_rational(&BigRational::new(3.into(), 2.into())));
    assert!(n_over_phi(&two, &t, P)
        .unwrap()
        .contains_rational(&BigRational::from_integer(2.into())));
    assert!(n_over_phi(&exps(&[1, 1]), &t, P)
        .unwrap()
        .contains_rational(&BigRational::from_integer(3.into())));
    assert_eq!(big_g(&two, &t, P).unwrap_err(), FactoredError::LogLogDomain);
    let d = DerivedScalars::compute(&two, &t, P).unwrap();
    assert!(d.loglog_n.is_none() && d.g.is_none());
}

#[test]
fn log_width_bound() {
    let t = table();
    for c in [exps(&[1]), exps(&[4, 2, 1, 1, 1]), exps(&[30, 9, 4, 3, 2, 2, 1, 1, 1])] {
        for prec in [64u32, 128, 256] {
            let l = log_n(&c, &t, prec).unwrap();
            let r = c.r() as f64;
            let max_term = (1..=c.r())
                .map(|i| c.exponent(i) as f64 * (t.nth_prime(i).unwrap() as f64).ln())
                .fold(0.0, f64::max);
            let bound = r * 2f64.powi(1 - prec as i32) * max_term;
            assert!(
                l.width().to_f64() <= bound,
                "{c} at {prec}: {:e} > {bound:e}",
                l.width().to_f64()
            );
        }
    }
}

#[test]
fn ratios_match_direct_values() {
    let t = table();
    let c55440 = exps(&[4, 2, 1, 1, 1]);
    let r = g_ratio_divide(&c55440, 5, &t, P).unwrap();
    assert_near(&r, "0.97781829010430839", "1e-16");
    assert_eq!(r.compare(&Interval::from_u64(1, P)), IvOrdering::CertainlyLess);
    assert_near(
        &g_ratio_divide(&exps(&[2, 1]), 1, &t, P).unwrap(),
        "0.74749673559336451",
        "1e-16",
    );
    assert!(g_ratio_divide(&exps(&[1]), 1, &t, P).is_err());
    assert_near(
        &g_ratio_swap(&c55440, 1, &t, P).unwrap(),
        "0.99739845840386610",
        "1e-16",
    );
    assert_near(
        &g_ratio_swap(&exps(&[1, 1, 1]), 2, &t, P).unwrap(),
        "0.96042945256058611",
        "1e-16",
    );
    assert!(matches!(
        g_ratio_swap(&exps(&[3, 2]), 1, &t, P),
        Err(FactoredError::Precondition(_))
    ));
    assert_near(&big_g(&exps(&[2, 1]), &t, P).unwrap(), "2.5634403137617130559", "1e-18");
    assert_near(&big_g(&exps(&[1, 1]), &t, P).unwrap(), "3.4293665667005871669", "1e-18");
    assert_near(
        &big_g(&exps(&[5, 2, 1, 1]), &t, P).unwrap(),
        "1.7558143389252967482",
        "1e-18",
    );
}

fn random_candidate(rng: &mut ChaCha8Rng, t: &PrimeTable) -> (CandidateFactorization, u64) {
    loop {
        let r = rng.gen_range(1..=8);
        let mut e: Vec<u32> = (0..r).map(|_| rng.gen_range(1..=6)).collect();
        if rng.gen_bool(0.6) {
            e.sort_unstable_by(|a, b| b.cmp(a));
        }
        let c = exps(&e);
        if let Ok(n) = materialize(&c, t, 40) {
            let n = n.to_u64().unwrap();
            if n < 1_000_000_000_000 && n > 30 {
                return (c, n);
            }
        }
    }
}

#[test]
fn enclosures_contain_exact_oracle_values() {
    let t = table();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..300 {
        let (c, n) = random_candidate(&mut rng, &t);
        let d = DerivedScalars::compute(&c, &t, P).unwrap();
        let sigma = if n < 20_000_000 {
            sigma_naive(n)
        } else {
            (1..=c.r())
                .map(|i| {
                    let p = t.nth_prime(i).unwrap();
                    (p.pow(c.exponent(i) + 1) - 1) / (p - 1)
                })
                .product()
        };
        assert!(
            d.rho.contains_rational(&BigRational::new(sigma.into(), n.into())),
            "{c}"
        );
        let direct = Interval::from_int(&BigInt::from(n), 256).ln().unwrap();
        assert!(d.log_n.compare(&direct) == IvOrdering::Overlapping, "{c}");
        assert!((d.log_n.mid_f64() - (n as f64).ln()).abs() < 1e-12);
        assert_eq!(d.rho.compare(&d.n_over_phi), IvOrdering::CertainlyLess);
        let g = d.g.unwrap();
        assert!((g.mid_f64() - sigma as f64 / n as f64 / (n as f64).ln().ln()).abs() < 1e-12);
    }
}

#[test]
fn sigma_formula_agrees_with_naive_for_moderate_n() {
    let t = table();
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..200 {
        let (c, n) = random_candidate(&mut rng, &t);
        if n < 5_000_000 {
            let d = rho(&c, &t, P).unwrap();
            assert!(d.contains_rational(&BigRational::new(sigma_naive(n).into(), n.into())));
        }
    }
}

#[test]
fn local_ratios_agree_with_full_recomputation() {
    let t = table();
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    let hp = 256;
    for _ in 0..200 {
        let (c, _) = random_candidate(&mut rng, &t);
        let s = rng.gen_range(1..=c.r());
        let g = big_g(&c, &t, hp).unwrap();
        if let (Ok(ratio), Ok(q)) = (g_ratio_divide(&c, s, &t, P), c.divided_by(s)) {
            let direct = g.div(&big_g(&q, &t, hp).unwrap()).unwrap();
            assert_eq!(ratio.compare(&direct), IvOrdering::Overlapping, "{c} / p_{s}");
            assert!(ratio.width().to_f64() < 1e-30);
        }
        if c.exponent(c.r()) == 1 && s < c.r() {
            let ratio = g_ratio_swap(&c, s, &t, P).unwrap();
            let q = c.swapped(s).unwrap();
            let direct = g.div(&big_g(&q, &t, hp).unwrap()).unwrap();
            assert_eq!(ratio.compare(&direct), IvOrdering::Overlapping, "{c} swap {s}");
        }
    }
}

#[test]
fn huge_run_length_candidate() {
    let t = PrimeTable::build(2_000_000).unwrap();
    let c = CandidateFactorization::from_runs(vec![Run::new(20, 1), Run::new(3, 50), Run::new(1, 140_000)]).unwrap();
    let d = DerivedScalars::compute(&c, &t, P).unwrap();
    let f: f64 = (1..=c.r())
        .map(|i| c.exponent(i) as f64 * (t.nth_prime(i).unwrap() as f64).ln())
        .sum();
    assert!((d.log_n.mid_f64() - f).abs() / f < 1e-12);
    assert!(d.log_n.width().to_f64() < 1e-25);
    assert!(d.rho.width().to_f64() / d.rho.mid_f64() < 1e-30);
    assert!(materialize(&c, &t, DEFAULT_MATERIALIZE_BITS).is_err());
}

#[test]
fn exponent_lists_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    for _ in 0..500 {
        let mut e: Vec<u32> = (0..rng.gen_range(1..40)).map(|_| rng.gen_range(1..5)).collect();
        e.sort_unstable_by(|a, b| b.cmp(a));
        let c = exps(&e);
        assert!(c.is_canonical());
        assert_eq!(c.to_exponents().unwrap(), e);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_candidate_json(&json).unwrap(), c);
    }
}
