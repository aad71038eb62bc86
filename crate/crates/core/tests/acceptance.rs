use std::process::ExitCode;

use ptmat::selftest::{run_with, SelftestConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = SelftestConfig { seed: 0, quick: false };
    let report = run_with(&cfg, |r| println!("{r}"));
    let failed: Vec<usize> = report.results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    let passed = report.results.len() - failed.len();
    println!("{passed} of {CRITERIA} criteria passed");
    if report.results.len() == CRITERIA && failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
