//! Seeded Monte Carlo estimates next to their exact values, saved as a run.

use emso_core::experiments::{
    estimate_expectation, estimate_probability, write_run, CsvRow, ProbabilityMode, RunManifest,
};

fn main() -> emso_core::Result<()> {
    let (n, p, trials, seed) = (6, 0.5, 50_000, 42);
    let ex = estimate_expectation(n, p, 2, 1, 1, trials, seed)?;
    println!(
        "E X(2,1,1): {:.5} [{:.5}, {:.5}], exact {:.5}",
        ex.estimate,
        ex.ci_lo,
        ex.ci_hi,
        ex.analytic.unwrap_or(f64::NAN)
    );
    let pr = estimate_probability(5, p, 20_000, seed, ProbabilityMode::Union)?;
    println!(
        "P(some tuple) at n=5: {:.5} [{:.5}, {:.5}], exact {:.5}",
        pr.estimate,
        pr.ci_lo,
        pr.ci_hi,
        pr.analytic.unwrap_or(f64::NAN)
    );

    let mut manifest = RunManifest::new("example-expectation", "expectation", n, p, trials, seed);
    (manifest.k, manifest.l, manifest.m) = (Some(2), Some(1), Some(1));
    let rows = [CsvRow::from_result("expectation", &manifest, &ex)];
    let dir = std::env::temp_dir().join("emso-example-runs");
    let (csv, json) = write_run(&dir, &manifest, &rows)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}
