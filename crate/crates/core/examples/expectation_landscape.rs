//! The log-expectation surface around its maximum.

use emso_core::analytic::{expected_count, f_value, g_value, hessian_f, k_star_asymptotic, k_star_exact, Params};

fn main() -> emso_core::Result<()> {
    for n in [1_000u64, 1_000_000, 1_000_000_000] {
        let prm = Params::new(n, 0.5)?;
        let ks = k_star_exact(&prm)?;
        let h = hessian_f(&prm, [ks.k_star; 3])?;
        println!(
            "n = {n:>10}: k* = {:.5} (asymptotic {:.5}), f(A) = {:.4}, minors {:.3e} {:.3e} {:.3e}, {:?}",
            ks.k_star,
            k_star_asymptotic(&prm)?,
            f_value(&prm, [ks.k_star; 3])?,
            h.minors[0],
            h.minors[1],
            h.minors[2],
            h.verdict
        );
    }

    let prm = Params::new(2_000, 0.5)?;
    println!("\n ln E X(k,k,k) versus f + g at n = 2000");
    for k in 2..=14u64 {
        let x = [k as f64; 3];
        let e = expected_count(&prm, k, k, k)?;
        println!("  k = {k:>2}: {:>10.4}  <=  {:>10.4}", e.logmag(), f_value(&prm, x)? + g_value(&prm, x)?);
    }
    Ok(())
}
