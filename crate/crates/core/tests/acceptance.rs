//! One line per acceptance criterion. Every criterion must report zero
//! failures; criteria with a runtime limit must also finish within it.

use std::process::ExitCode;

use softsheaf::suite::{run_criterion, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let mut failed = Vec::new();
    for &(id, _, _) in CRITERIA.iter() {
        let r = run_criterion(id, &cfg).expect("criterion runs");
        println!("{r}");
        if !r.passed() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", CRITERIA.len(), CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
