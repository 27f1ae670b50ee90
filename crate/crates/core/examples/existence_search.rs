//! Exact existence search on a small graph, heuristic search on a large one.

use emso_core::graph::{sample_gnp, Seed};
use emso_core::witness::{exists_special, Existence, SearchBudget};

fn report(label: &str, e: &Existence) {
    match e {
        Existence::Found(t) => println!("{label}: witness {t}"),
        Existence::Absent => println!("{label}: no special tuple"),
        Existence::Unknown => println!("{label}: unknown (heuristic gave up)"),
    }
}

fn main() -> emso_core::Result<()> {
    for seed in 0..4 {
        let g = sample_gnp(14, 0.5, Seed::new(seed))?;
        report(&format!("n=14 seed={seed} exact"), &exists_special(&g, &SearchBudget::default())?);
    }

    let g = sample_gnp(80, 0.5, Seed::new(1))?;
    match exists_special(&g, &SearchBudget::default()) {
        Err(e) => println!("n=80 exact: refused ({e})"),
        Ok(e) => report("n=80 exact", &e),
    }
    report("n=80 heuristic", &exists_special(&g, &SearchBudget::heuristic(11))?);
    Ok(())
}
