//! Acceptance suite: runs every verification criterion on the full grids and
//! prints one PASS/FAIL line per criterion.
//!
//! Criterion 11 is a known failure: at some grid points the mode of the double
//! nearest `p` differs from the mode of the rational `p`, and some near-ties
//! fall inside the floating tie tolerance (see the README). It is still run
//! and reported. The process exits non-zero if any other criterion fails, or
//! if the known failure changes character (a mismatch with another cause).

use std::process::ExitCode;

use riffshuffle::verify::{self, VerifyConfig};

const KNOWN_FAILURES: &[usize] = &[11];

fn main() -> ExitCode {
    let cfg = VerifyConfig::full();
    println!("running {} acceptance criteria", verify::CRITERIA.len());
    let (mut failed, mut unexpected) = (0, 0);
    for (id, _) in verify::CRITERIA {
        let outcome = verify::run_criterion(id, &cfg);
        println!("{outcome} ({} ms)", outcome.elapsed_ms);
        if !outcome.passed {
            failed += 1;
            let explained = KNOWN_FAILURES.contains(&id) && outcome.detail.contains(", 0 other");
            if explained {
                println!("       known failure, every mismatch attributed");
            } else {
                unexpected += 1;
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({unexpected} unexpected)",
        verify::CRITERIA.len() - failed
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
