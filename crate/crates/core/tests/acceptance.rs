//! Runs every acceptance criterion and prints one line per check.
//!
//! Checks listed in `KNOWN_UNATTAINABLE` are expected to fail: the statement
//! they test does not hold, see the README. The target fails if any other
//! check fails, or if a known failure starts passing.

use std::process::ExitCode;
use std::time::Instant;

use kloost_core::harness::acceptance::{run_criterion, Suite};

fn main() -> ExitCode {
    // `cargo test` passes filter arguments; honour a numeric one
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let start = Instant::now();
    let mut unexpected = Vec::new();
    let mut total = 0;
    let mut passed = 0;
    for &n in Suite::All.criteria() {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        for check in run_criterion(n) {
            total += 1;
            passed += usize::from(check.passed);
            let known = check.known_unattainable();
            let note = if known { "  [expected failure]" } else { "" };
            println!("{check}{note}");
            if check.passed == known {
                unexpected.push(check.id.clone());
            }
        }
    }
    println!(
        "acceptance: {passed}/{total} checks passed in {:.1?}",
        start.elapsed()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
