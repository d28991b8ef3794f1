//! Runs every acceptance criterion and prints one verdict line for each.

use std::process::ExitCode;
use std::time::Instant;

use glab_core::suites::run_suite;

const CRITERIA: &[(u32, &str, &str)] = &[
    (1, "hopf-axioms", "Hopf axioms on (FG)* for |G| <= 16, p in {3,5}"),
    (2, "duality-roundtrip", "grading <-> K-action roundtrip, group-like census, primitive dimension"),
    (3, "module-algebra", "group-like acts as automorphism, primitive as derivation"),
    (4, "divided-powers", "divided-power coproduct and product leading terms"),
    (5, "gen-leibniz", "generalized Leibniz rules for delta^(q) on Z_{p^2}-gradings"),
    (6, "martindale", "Martindale decomposition of ad s + lambda tr"),
    (7, "p-grading", "Lie p-gradings with 1 in R_1 are associative"),
    (8, "exchange", "exchange identity and closure"),
    (9, "type-two", "type II gradings of sl_n"),
    (10, "classify-p-group", "p-group classification by elementary enumeration"),
    (11, "pauli", "Pauli gradings"),
];

fn main() -> ExitCode {
    let seed = 0;
    let mut failed = 0;
    for &(n, suite, title) in CRITERIA {
        let start = Instant::now();
        let report = run_suite(suite, seed).expect("suite exists");
        let secs = start.elapsed().as_secs_f64();
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {n:>2} [{suite}] {verdict}: {title} ({} checks, {} failures, {secs:.1}s)",
            report.checks(),
            report.failures()
        );
        if !report.passed() {
            failed += 1;
            print!("{}", report.table());
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
