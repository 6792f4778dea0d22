use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robin_core::numeric::{Interval, IvOrdering, NumericError};

fn rational(rng: &mut ChaCha8Rng) -> BigRational {
    let n: i64 = rng.gen_range(-1_000_000_000_000..=1_000_000_000_000);
    let d: i64 = rng.gen_range(1..=1_000_000_000);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn arithmetic_contains_exact_rational_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for i in 0..100_000 {
        let prec = [53u32, 64, 96, 128, 200][i % 5];
        let (a, b) = (rational(&mut rng), rational(&mut rng));
        let (ia, ib) = (Interval::from_rational(&a, prec), Interval::from_rational(&b, prec));
        assert!(ia.add(&ib).contains_rational(&(&a + &b)));
        assert!(ia.sub(&ib).contains_rational(&(&a - &b)));
        assert!(ia.mul(&ib).contains_rational(&(&a * &b)));
        match ia.div(&ib) {
            Ok(q) => assert!(q.contains_rational(&(&a / &b))),
            Err(NumericError::DivisionByZero) => assert!(ib.contains_rational(&BigRational::from_integer(0.into()))),
            Err(e) => panic!("unexpected {e}"),
        }
    }
}

#[test]
fn elementary_functions_agree_with_f64_and_invert() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..2_000 {
        let n: u64 = rng.gen_range(1..=1_000_000_000_000);
        let d: u64 = rng.gen_range(1..=1_000_000);
        let x = Interval::from_ratio(&BigInt::from(n), &BigInt::from(d), 128).unwrap();
        let l = x.ln().unwrap();
        let xf = n as f64 / d as f64;
        assert!((l.mid_f64() - xf.ln()).abs() <= 1e-12 * xf.ln().abs().max(1.0));
        let back = l.exp().unwrap();
        assert!(back.encloses(&x) || back.compare(&x) == IvOrdering::Overlapping);
        assert!(back.contains_rational(&BigRational::new(BigInt::from(n), BigInt::from(d))));
        let s = x.sqrt().unwrap();
        assert!(s
            .mul(&s)
            .contains_rational(&BigRational::new(BigInt::from(n), BigInt::from(d))));
    }
}

fn expression(a: u64, b: u64, c: u64, prec: u32) -> Interval {
    let ia = Interval::from_u64(a, prec);
    let ib = Interval::from_u64(b, prec);
    let ic = Interval::from_u64(c, prec);
    let l = ia.ln().unwrap().div(&ib.ln().unwrap()).unwrap();
    let e = ic.div(&ib).unwrap().recip().unwrap().exp().unwrap();
    let s = ia.add(&ic).sqrt().unwrap();
    l.mul(&e).sub(&s).add(&ib.ln().unwrap().ln().unwrap())
}

proptest! {
    #[test]
    fn doubling_precision_nests(a in 2u64..1_000_000, b in 3u64..1_000_000, c in 1u64..1_000_000) {
        for prec in [64u32, 96, 128] {
            let lo = expression(a, b, c, prec);
            let hi = expression(a, b, c, 2 * prec);
            prop_assert!(lo.encloses(&hi), "{:?} vs {:?}", lo, hi);
            prop_assert!(hi.width() < lo.width());
        }
    }

    #[test]
    fn compare_never_flips(a in 2u64..100_000, b in 2u64..100_000) {
        let verdicts: Vec<_> = [64u32, 128, 256]
            .iter()
            .map(|&p| {
                let x = Interval::from_u64(a, p).ln().unwrap().mul(&Interval::from_u64(b, p));
                let y = Interval::from_u64(b, p).ln().unwrap().mul(&Interval::from_u64(a, p));
                x.compare(&y)
            })
            .collect();
        let decided: Vec<_> = verdicts.iter().filter(|v| **v != IvOrdering::Overlapping).collect();
        prop_assert!(decided.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn json_round_trip(a in 1u64..u64::MAX, b in 1u64..1_000_000) {
        let x = Interval::from_ratio(&BigInt::from(a), &BigInt::from(b), 128).unwrap().ln().unwrap();
        let y: Interval = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(x.lo(), y.lo());
        prop_assert_eq!(x.hi(), y.hi());
    }
}
