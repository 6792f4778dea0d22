use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robin_core::primes::{PrimeError, PrimeTable, SieveConfig};

/// Trial-free byte sieve, independent of the segmented implementation.
fn naive_pi(n: usize) -> u64 {
    let mut is = vec![1u8; n + 1];
    is[0] = 0;
    is[1] = 0;
    let mut i = 2;
    while i * i <= n {
        if is[i] == 1 {
            (i * i..=n).step_by(i).for_each(|j| is[j] = 0);
        }
        i += 1;
    }
    is.iter().map(|&b| b as u64).sum()
}

#[test]
fn prime_counts_match_naive_sieve() {
    let big = PrimeTable::build(100_000_000).unwrap();
    assert_eq!(big.len(), 5_761_455);
    for k in 1..=8u32 {
        let limit = 10u64.pow(k);
        let count = big.primes().partition_point(|&p| p as u64 <= limit) as u64;
        assert_eq!(count, naive_pi(limit as usize), "pi(10^{k})");
    }
    assert_eq!(PrimeTable::build(10_000).unwrap().len(), 1229);
}

#[test]
fn neighbours_are_consecutive() {
    let t = PrimeTable::build(1_000_000).unwrap();
    for w in t.primes().windows(2) {
        let (p, q) = (w[0] as u64, w[1] as u64);
        assert_eq!(t.next_prime(p).unwrap(), q);
        assert_eq!(t.prev_prime(q).unwrap(), p);
        assert_eq!(t.prime_index(q).unwrap(), t.prime_index(p).unwrap() + 1);
    }
}

#[test]
fn gap_windows_contain_primes() {
    let t = PrimeTable::build(40_000).unwrap();
    assert!(t.prime_gap_holds(468_991_632).unwrap());
    assert!(t.prime_gap_holds(500_000_000).unwrap());
    assert!(matches!(
        t.prime_gap_holds(1_000_000),
        Err(PrimeError::BelowThreshold { .. })
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(6100);
    for _ in 0..1000 {
        let x = rng.gen_range(468_991_632..=1_000_000_000u64);
        assert!(t.prime_gap_holds(x).unwrap(), "x = {x}");
    }
    let small = PrimeTable::build(100).unwrap();
    assert!(matches!(
        small.prime_gap_holds(500_000_000),
        Err(PrimeError::TableTooSmall { .. })
    ));
}

#[test]
fn gap_check_agrees_between_table_and_window_sieve() {
    let big = PrimeTable::build(470_000_000).unwrap();
    let small = PrimeTable::build(30_000).unwrap();
    for x in (468_991_632..469_000_000).step_by(97) {
        assert_eq!(big.prime_gap_holds(x).unwrap(), small.prime_gap_holds(x).unwrap());
    }
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for limit in [2u64, 9, 10, 100_003] {
        let t = PrimeTable::build(limit).unwrap();
        let path = dir.path().join(format!("sieve{limit}.bin"));
        t.save(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..5], b"RBSV1");
        assert_eq!(u64::from_le_bytes(bytes[5..13].try_into().unwrap()), limit);
        assert_eq!(PrimeTable::load(&path).unwrap(), t);
    }
    let bad = dir.path().join("bad.bin");
    std::fs::write(&bad, b"RBSV2\0\0\0\0\0\0\0\0").unwrap();
    assert!(matches!(PrimeTable::load(&bad), Err(PrimeError::BadCache(_))));
}

#[test]
fn segment_size_does_not_change_output() {
    let a = PrimeTable::build_with(
        300_000,
        &SieveConfig {
            segment_size: 1000,
            max_limit: 1 << 32,
        },
    )
    .unwrap();
    assert_eq!(a, PrimeTable::build(300_000).unwrap());
}
