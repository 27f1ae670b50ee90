//! Exact moments by enumerating every graph on a handful of vertices.

use emso_core::analytic::{expected_count, paley_zygmund, Params};
use emso_core::oracle::{exact_union_probability, OracleTable};

fn main() -> emso_core::Result<()> {
    let table = OracleTable::build(6)?;
    let p = 0.5;
    let prm = Params::new(6, p)?;
    println!("{:>9} {:>12} {:>12} {:>10} {:>10}", "(k,l,m)", "E X", "closed form", "P(X>0)", "PZ bound");
    for &(k, l, m) in table.points() {
        let mo = table.moments(p, k, l, m)?;
        let closed = expected_count(&prm, k as u64, l as u64, m as u64)?.to_f64();
        let pz = if mo.e_x > 0.0 { paley_zygmund(mo.e_x, mo.e_x2, 0.0)? } else { 0.0 };
        println!("{:>9} {:>12.8} {:>12.8} {:>10.6} {:>10.6}", format!("({k},{l},{m})"), mo.e_x, closed, mo.p_positive, pz);
    }
    let all = table.moments_all(p)?;
    println!("P(some special tuple) at n = 6: {:.6}", all.p_positive);
    println!("P(some special tuple) at n = 5: {:.6}", exact_union_probability(5, p)?);
    Ok(())
}
