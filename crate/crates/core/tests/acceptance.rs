//! One PASS/FAIL line per acceptance criterion, at the default tolerances.
//! Exits non-zero if any criterion fails or runs over its time budget.

use std::process::ExitCode;
use std::time::Instant;

use zakfrft::selftest::{run_criterion, run_selftest, CRITERIA};
use zakfrft::{ReportBundle, Tolerances};

fn main() -> ExitCode {
    let tol = Tolerances::default();
    let mut all = Vec::new();
    let mut ok = true;
    for c in CRITERIA.iter() {
        let start = Instant::now();
        let reports = run_criterion(c, &tol);
        let secs = start.elapsed().as_secs_f64();
        let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
        let within = secs <= c.budget;
        let pass = failed.is_empty() && within;
        ok &= pass;
        println!(
            "{} criterion {} ({}): {} checks, {} failed, {:.1}s of {:.0}s budget",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            reports.len(),
            failed.len(),
            secs,
            c.budget
        );
        for r in failed {
            println!("    {} max_error {:e} > {:e}", r.check, r.max_error, r.tolerance);
        }
        all.extend(reports);
    }
    let first = ReportBundle::new(all).to_json();
    let second = run_selftest(&tol).to_json();
    let same = first == second;
    ok &= same;
    println!(
        "{} criterion 8 (determinism): rerun bundle {} ({} bytes)",
        if same { "PASS" } else { "FAIL" },
        if same { "byte-identical" } else { "differs" },
        first.len()
    );
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
