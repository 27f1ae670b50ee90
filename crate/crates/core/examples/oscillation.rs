//! The analytic oscillation table as CSV on stdout.

use emso_core::experiments::{oscillation_rows, oscillation_table, write_csv};

fn main() -> emso_core::Result<()> {
    let rows = oscillation_table(0.5, 5..=16)?;
    for r in &rows {
        eprintln!(
            "i = {:>2}: first-moment sum {:.4} at n = {}, E X(i,i,i) = {:.4} at n = {} (asymptotic {:.4})",
            r.i,
            r.first_moment_sum.to_f64(),
            r.n_small,
            r.diag_expectation.to_f64(),
            r.n_large,
            r.diag_asymptotic
        );
    }
    write_csv(std::io::stdout().lock(), &oscillation_rows(0.5, &rows))
}
