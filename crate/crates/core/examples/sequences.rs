//! The two index sequences and where they leave the 64-bit range.

use emso_core::analytic::{k_star_exact, max_feasible_index, seq_large, seq_small, Params, Sequence};

fn main() -> emso_core::Result<()> {
    let p = 0.5;
    println!("{:>3} {:>22} {:>8} {:>22} {:>8}", "i", "small", "k*", "large", "k*");
    for i in 2..=20 {
        let (a, b) = (seq_small(p, i)?, seq_large(p, i)?);
        let ka = k_star_exact(&Params::new(a, p)?)?.k_star;
        let kb = k_star_exact(&Params::new(b, p)?)?.k_star;
        println!("{i:>3} {a:>22} {ka:>8.4} {b:>22} {kb:>8.4}");
    }
    for q in [0.3, 0.5, 0.7] {
        println!(
            "p = {q}: last index in range is {} (small), {} (large)",
            max_feasible_index(q, Sequence::Small)?,
            max_feasible_index(q, Sequence::Large)?
        );
    }
    Ok(())
}
