use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::check_probability;

/// The two index sequences along which the property oscillates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sequence {
    /// `⌊i · q^{−(i+½)}⌋`, where the first moment sum vanishes.
    Small,
    /// `⌊i · q^{−i}⌋`, where the diagonal expectation diverges.
    Large,
}

impl std::str::FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Sequence::Small),
            "large" => Ok(Sequence::Large),
            other => Err(Error::invalid(format!("unknown sequence {other:?} (expected small or large)"))),
        }
    }
}

/// `1 − p` as an exact fraction `a/b` of the binary value of `p`.
fn q_fraction(p: f64) -> Result<(BigInt, BigInt)> {
    check_probability(p)?;
    let p = BigRational::from_float(p).ok_or_else(|| Error::invalid("p is not finite"))?;
    let q = BigRational::one() - p;
    Ok((q.numer().clone(), q.denom().clone()))
}

fn check_index(i: u64) -> Result<u32> {
    if i == 0 {
        return Err(Error::invalid("sequence index must be at least 1"));
    }
    u32::try_from(i).map_err(|_| Error::invalid("sequence index too large"))
}

fn to_u64(v: BigInt, what: &str, i: u64) -> Result<u64> {
    v.to_u64()
        .ok_or_else(|| Error::Numeric(format!("{what} sequence at i = {i} exceeds the 64-bit integer range")))
}

/// `⌊i · (1/(1−p))^{i+½}⌋`, computed exactly.
///
/// With `1 − p = a/b` the value is `√(i² b^{2i+1} / a^{2i+1})`, and the
/// floor of a square root equals the integer square root of the floor.
pub fn seq_small(p: f64, i: u64) -> Result<u64> {
    let e = check_index(i)?;
    let (a, b) = q_fraction(p)?;
    let ib = BigInt::from(i);
    let num = &ib * &ib * b.pow(2 * e + 1);
    let den = a.pow(2 * e + 1);
    to_u64((num / den).sqrt(), "small", i)
}

/// `⌊i · (1/(1−p))^i⌋`, computed exactly.
pub fn seq_large(p: f64, i: u64) -> Result<u64> {
    let e = check_index(i)?;
    let (a, b) = q_fraction(p)?;
    let num = BigInt::from(i) * b.pow(e);
    to_u64(num / a.pow(e), "large", i)
}

/// Largest `i` whose sequence term fits in a `u64`.
pub fn max_feasible_index(p: f64, which: Sequence) -> Result<u64> {
    check_probability(p)?;
    let term = |i| match which {
        Sequence::Small => seq_small(p, i),
        Sequence::Large => seq_large(p, i),
    };
    let shift = if which == Sequence::Small { 0.5 } else { 0.0 };
    let ln_b = -(-p).ln_1p();
    let limit = 64.0 * std::f64::consts::LN_2;
    // Floating-point estimate of the last index, then exact adjustment.
    let (mut lo, mut hi) = (1.0f64, 1e7f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid.ln() + (mid + shift) * ln_b <= limit {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > 1e6 {
        return Err(Error::Infeasible(format!("sequence index range for p = {p} is too long to certify")));
    }
    let mut i = (lo.floor() as u64).max(1);
    while i > 1 && term(i).is_err() {
        i -= 1;
    }
    while term(i + 1).is_ok() {
        i += 1;
    }
    Ok(i)
}
