use moire_wells::verify::{parity_suite, power_fit, Report, CRITERIA};
use proptest::prelude::*;

#[test]
fn criteria_are_numbered_one_to_ten() {
    let ids: Vec<u32> = CRITERIA.iter().map(|c| c.0).collect();
    assert_eq!(ids, (1..=10).collect::<Vec<_>>());
}

#[test]
fn parity_suite_is_exact() {
    assert_eq!(parity_suite(50, 3), 0.0);
}

#[test]
fn report_line_and_json() {
    let r = Report { id: 4, title: "t".into(), passed: false, summary: "s".into(), notes: vec![], measured: serde_json::json!({}), seconds: 1.5 };
    assert!(r.line().starts_with("[FAIL] criterion  4 t: s"));
    let v = serde_json::to_value(&r).unwrap();
    assert!(v.get("seconds").is_none());
}

proptest! {
    #[test]
    fn power_fit_recovers_exact_laws(c in 0.01f64..100.0, p in -1.0f64..4.0) {
        let hs: [f64; 3] = [1.0 / 60.0, 1.0 / 120.0, 1.0 / 240.0];
        let errs: Vec<f64> = hs.iter().map(|h| c * h.powf(p)).collect();
        let (cf, pf) = power_fit(&hs, &errs);
        prop_assert!((pf - p).abs() < 1e-10);
        prop_assert!((cf / c - 1.0).abs() < 1e-9);
    }
}
