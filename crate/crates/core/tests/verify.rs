use std::time::Instant;

use su11_core::verify::{run_suite, VerifyOptions, SUITES};
use su11_core::Error;

#[test]
fn every_suite_passes() {
    let opts = VerifyOptions::default();
    let mut failed = Vec::new();
    for name in SUITES {
        let t = Instant::now();
        let report = run_suite(name, &opts).unwrap();
        eprintln!(
            "{name}: {} checks in {:.2?}",
            report.checks.len(),
            t.elapsed()
        );
        for c in report.checks.iter().filter(|c| !c.pass) {
            failed.push(format!(
                "{name}/{}: residual {:e}, tol {:e}",
                c.name, c.residual, c.tol
            ));
        }
    }
    assert!(failed.is_empty(), "{}", failed.join("\n"));
}

#[test]
fn unknown_suite_is_rejected() {
    assert!(matches!(
        run_suite("nope", &VerifyOptions::default()),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn completeness_rejects_unreachable_tolerance() {
    let opts = VerifyOptions {
        quad_tol: 1e-30,
        ..VerifyOptions::default()
    };
    let report = run_suite("completeness", &opts).unwrap();
    assert!(!report.passed());
}
