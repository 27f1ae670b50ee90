//! Union bound on the probability of a special tuple along the sparse sequence.

use emso_core::analytic::{first_moment_sum, seq_small, Params};

fn main() -> emso_core::Result<()> {
    for i in 5..=14 {
        let n = seq_small(0.5, i)?;
        let fm = first_moment_sum(&Params::new(n, 0.5)?)?;
        println!(
            "i = {i:>2}  n = {n:>9}  sum = {:.6}  window {} ({} terms, boundary max {:.1e})",
            fm.total.to_f64(),
            fm.window,
            fm.terms,
            fm.boundary_max.to_f64()
        );
    }
    Ok(())
}
