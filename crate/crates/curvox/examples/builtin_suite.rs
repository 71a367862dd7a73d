//! Runs the built-in 12-cell suite and prints the CSV report with timing.
//!
//! ```sh
//! cargo run --release --example builtin_suite
//! ```

use curvox::{builtin_suite, emit_report_csv, run_suite};
use std::io::stdout;

fn main() {
    let rows = run_suite(&builtin_suite());
    emit_report_csv(&rows, &mut stdout().lock(), true).unwrap();
    if rows.iter().any(|r| !r.is_ok()) {
        std::process::exit(1);
    }
}
