//! Overlap accounting between two tuples and the second-moment bounds.

use emso_core::analytic::{
    joint_domination_probability, lemma2_bound, lemma3_bound, lemma4_vertex_bound, r0_of, s1_sum, s3_exponents,
};
use emso_core::witness::{cross_pair_count, overlap, KTuple, OverlapPattern};

fn main() -> emso_core::Result<()> {
    let x: KTuple = "X1=1,2,3;x1=1;X2=4,5,6;x2=4;X3=7,8,9;x3=7".parse()?;
    let y: KTuple = "X1=2,3,10;x1=10;X2=4,11,12;x2=11;X3=13,14,15;x3=13".parse()?;
    let pat = overlap(&x, &y);
    println!("overlap matrix {:?}, r = {}", pat.rij(), pat.r());
    println!("pairs newly forced empty: {}", cross_pair_count(&pat, 3)?);
    println!("bound on P(no extra edges): {:.4e}", lemma2_bound(0.5, 3, pat.r() as u64)?.to_f64());
    println!(
        "joint domination {:.6} <= ceiling {:.6}",
        joint_domination_probability(&pat, 0.5, 3)?,
        lemma4_vertex_bound(0.5, 3)?
    );

    let (k, r0) = (200, 6);
    let split = OverlapPattern::from_matrix([[70, 70, 58], [0, 3, 0], [0, 0, 0]]);
    if let Some(s) = split.concentrated_row(k, r0) {
        println!("row {s} is concentrated; penalised bound ln = {:.1}", lemma3_bound(0.5, k as u64, &split, r0 as u64)?.logmag());
    }

    let r0 = r0_of(0.5)?;
    for k in [100u64, 200, 400] {
        println!("k = {k}: ln S1 bound = {:.2}", s1_sum(0.5, k)?.logmag());
    }
    for k in [10u64, 25, 40] {
        let s3 = s3_exponents(0.5, k, 3 * k - r0, r0)?;
        println!("k = {k}: ln S3 count factor = {:.2}", s3.count_factor.logmag());
    }
    Ok(())
}
