//! Runs every acceptance criterion at its stated tolerance, one line each.

use expsum::acceptance::{run_suite, Suite};

#[test]
fn acceptance() {
    let reports = run_suite(Suite::Acceptance, |r| println!("{r}"));
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!(
        "acceptance: {}/{} passed",
        reports.len() - failed.len(),
        reports.len()
    );
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
