//! Every suite passes at its defaults, and the reports round-trip.

use qheis::harness::{run_suite, SuiteConfig, SuiteId};
use qheis::Report;

#[test]
fn all_default_suites_pass() {
    for id in SuiteId::ALL {
        let mut cfg = SuiteConfig::defaults(id);
        cfg.jobs = 2;
        let r = run_suite(&cfg).unwrap();
        assert!(!r.cases.is_empty(), "{id}");
        assert!(r.all_pass(), "{id}: {:?}", r.failures());
        let names: Vec<&str> = r.cases.iter().map(|c| c.name.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted, "{id}: rows must be sorted and unique");
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back.to_json(), r.to_json());
    }
}

#[test]
fn tolerance_override_applies_to_residual_rows_only() {
    let mut cfg = SuiteConfig::defaults(SuiteId::SlN);
    cfg.tol = Some(1e-3);
    let r = run_suite(&cfg).unwrap();
    assert_eq!(r.case("slN.N=3.q=1.3.above.dcr.cross").unwrap().tolerance, 1e-3);
    // negative control keeps its own convention
    let neg = r.case("slN.N=3.q=1.3.below.dcr").unwrap();
    assert_eq!(neg.tolerance, 0.0);
    assert!(neg.pass);
}

#[test]
fn wrong_sign_is_caught_for_kz_operator() {
    let mut cfg = SuiteConfig::defaults(SuiteId::KzOperator);
    cfg.cutoff = 3;
    let r = run_suite(&cfg).unwrap();
    assert!(r.all_pass(), "{:?}", r.failures());
    let neg = r.cases.iter().find(|c| c.name.ends_with("wrong_sign")).unwrap();
    assert!(neg.metadata["observed"].as_f64().unwrap() > 0.1);
}

#[test]
fn invalid_config_is_rejected_before_running() {
    // so(N) with too small a cutoff is rejected up front
    let mut cfg = SuiteConfig::defaults(SuiteId::SoNOrbital);
    cfg.cutoff = 3;
    assert!(run_suite(&cfg).is_err());
}
