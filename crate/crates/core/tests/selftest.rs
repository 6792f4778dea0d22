use robin_core::numeric::{Constants, Interval};
use robin_core::selftest::run_selftest;

#[test]
fn passes_with_the_shipped_table() {
    let rep = run_selftest(&Constants::new(128));
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert_eq!(rep.cases.len(), 5);
}

#[test]
fn corrupted_gamma_is_caught() {
    for bad in ["0.5772156649", "0.58", "0.5"] {
        let consts = Constants::with_gamma(Interval::from_decimal(bad, 128).unwrap());
        let rep = run_selftest(&consts);
        let first = rep.first_failure().expect("corruption detected");
        assert_eq!(first.name, "gamma", "{bad}");
    }
    // A gross error also changes the exception list.
    let consts = Constants::with_gamma(Interval::from_decimal("0.5", 128).unwrap());
    let rep = run_selftest(&consts);
    assert!(rep.cases.iter().any(|c| c.name == "robin_exceptions" && !c.passed));
}

#[test]
fn output_is_deterministic() {
    let a = serde_json::to_string(&run_selftest(&Constants::new(128))).unwrap();
    let b = serde_json::to_string(&run_selftest(&Constants::new(128))).unwrap();
    assert_eq!(a, b);
}
