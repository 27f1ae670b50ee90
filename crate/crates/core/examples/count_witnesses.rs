//! Count special tuples of every size in one sampled graph.

use emso_core::graph::{sample_gnp, Seed};
use emso_core::witness::{count_profile, count_special};

fn main() -> emso_core::Result<()> {
    // Take the first seed whose graph has at least one special tuple.
    let (seed, g, profile) = (0..)
        .map(|s| {
            let g = sample_gnp(10, 0.5, Seed::new(s)).expect("valid parameters");
            let prof = count_profile(&g).expect("n within profile range");
            (s, g, prof)
        })
        .find(|(_, _, prof)| prof.total() > 0)
        .expect("some seed works");
    println!("seed {seed}: n = {}, total special tuples = {}", g.n(), profile.total());
    for ((k, l, m), c) in profile.nonzero() {
        println!("  X({k},{l},{m}) = {c}");
    }
    // Single-size counting uses a separate search and agrees.
    assert_eq!(count_special(&g, 1, 1, 1)?, profile.get(1, 1, 1));
    Ok(())
}
