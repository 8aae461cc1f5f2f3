//! Running a verification suite from code and reading the report.

use qheis::harness::{run_suite, SuiteConfig, SuiteId};

fn main() -> qheis::Result<()> {
    let mut cfg = SuiteConfig::defaults(SuiteId::Braid);
    cfg.q = vec![0.8];
    cfg.jobs = 2;
    let report = run_suite(&cfg)?;
    for case in &report.cases {
        println!("{:<44} {:>10.2e} <= {:<8.0e} {}", case.name, case.residual, case.tolerance, if case.pass { "ok" } else { "FAIL" });
    }
    println!("all pass: {}", report.all_pass());
    Ok(())
}
