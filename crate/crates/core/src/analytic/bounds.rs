use rayon::prelude::*;
use serde::Serialize;

use super::{f_value, k_star_exact, seq_large, LogReal, Params};
use crate::error::{Error, Result};
use crate::graph::check_probability;
use crate::witness::OverlapPattern;

fn ln_q_of(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok((-p).ln_1p())
}

/// `γ(x) = x + e^{−x} − 1`, using its Taylor series near zero.
pub fn gamma_fn(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        x2 / 2.0 - x2 * x / 6.0 + x2 * x2 / 24.0 - x2 * x2 * x / 120.0
    } else {
        x + (-x).exp_m1()
    }
}

/// `−(ln(1/q)/2) · ln n · Σ (x − k*)²` with `k*` supplied by the caller.
pub fn lemma1_rhs_at(prm: &Params, k_star: f64, point: [u64; 3]) -> Result<f64> {
    prm.check_point(point[0], point[1], point[2])?;
    let devs = point.map(|x| x as f64 - k_star);
    if devs.iter().any(|d| d.abs() < 0.5) {
        return Err(Error::invalid(format!(
            "{point:?} lies within 1/2 of k* = {k_star} in some coordinate"
        )));
    }
    let sq: f64 = devs.iter().map(|d| d * d).sum();
    Ok(prm.ln_q() / 2.0 * (prm.n() as f64).ln() * sq)
}

/// [`lemma1_rhs_at`] with `k*` solved for.
pub fn lemma1_rhs(prm: &Params, point: [u64; 3]) -> Result<f64> {
    let ks = k_star_exact(prm)?.k_star;
    lemma1_rhs_at(prm, ks, point)
}

/// Outcome of checking `f <= relax · rhs` over a lattice.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Scan {
    pub k_star: f64,
    pub relax: f64,
    pub min_deviation: f64,
    pub max_coordinate: u64,
    pub checked: u64,
    pub violations: u64,
    /// Point with the largest `f − relax · rhs`, and that margin.
    pub worst_point: Option<[u64; 3]>,
    pub worst_margin: f64,
}

/// Checks `f(k, l, m) <= relax · rhs(k, l, m)` at every point of `D_n` with
/// all coordinates at most `max_coordinate` and every deviation from `k*`
/// at least `min_deviation`.
pub fn lemma1_scan(prm: &Params, relax: f64, min_deviation: f64, max_coordinate: u64) -> Result<Lemma1Scan> {
    if min_deviation < 0.5 {
        return Err(Error::invalid("deviation threshold must be at least 1/2"));
    }
    let ks = k_star_exact(prm)?.k_star;
    let top = max_coordinate.min(prm.n().saturating_sub(2));
    let admissible = |x: u64| (x as f64 - ks).abs() >= min_deviation;
    let per_k: Vec<(u64, u64, Option<([u64; 3], f64)>)> = (1..=top)
        .into_par_iter()
        .filter(|&k| admissible(k))
        .map(|k| {
            let (mut checked, mut bad) = (0u64, 0u64);
            let mut worst: Option<([u64; 3], f64)> = None;
            for l in (1..=top).filter(|&l| admissible(l)) {
                for m in (1..=top).filter(|&m| admissible(m)) {
                    if k + l + m > prm.n() {
                        break;
                    }
                    let pt = [k, l, m];
                    let f = f_value(prm, pt.map(|v| v as f64)).expect("point in domain");
                    let rhs = lemma1_rhs_at(prm, ks, pt).expect("admissible point");
                    let margin = f - relax * rhs;
                    checked += 1;
                    if margin > 0.0 {
                        bad += 1;
                    }
                    if worst.is_none_or(|(_, w)| margin > w) {
                        worst = Some((pt, margin));
                    }
                }
            }
            (checked, bad, worst)
        })
        .collect();
    let mut scan = Lemma1Scan {
        k_star: ks,
        relax,
        min_deviation,
        max_coordinate: top,
        checked: 0,
        violations: 0,
        worst_point: None,
        worst_margin: f64::NEG_INFINITY,
    };
    for (c, b, w) in per_k {
        scan.checked += c;
        scan.violations += b;
        if let Some((pt, m)) = w {
            if m > scan.worst_margin {
                scan.worst_margin = m;
                scan.worst_point = Some(pt);
            }
        }
    }
    Ok(scan)
}

/// `r₀ = ⌈16 / ln(1/(1−p))⌉`.
pub fn r0_of(p: f64) -> Result<u64> {
    let inv = -ln_q_of(p)?;
    Ok((16.0 / inv).ceil() as u64)
}

/// `q^{3k² − r²/3 − 3}`: the chance that all cross pairs of `Y` not already
/// cross pairs of `X` are non-edges, bounded over patterns with overlap `r`.
pub fn lemma2_bound(p: f64, k: u64, r: u64) -> Result<LogReal> {
    let ln_q = ln_q_of(p)?;
    if k == 0 || r > 3 * k {
        return Err(Error::invalid(format!("need k >= 1 and r <= 3k, got k = {k}, r = {r}")));
    }
    let (k, r) = (k as f64, r as f64);
    Ok(LogReal::from_ln((3.0 * k * k - r * r / 3.0 - 3.0) * ln_q))
}

/// The sharper `q^{3k² − r²/3 − 3 + 4k r₀}`, valid when some set of `Y`
/// overlaps `X` in more than `k − r₀` vertices spread across parts that are
/// each smaller than `k − 6r₀`.
pub fn lemma3_bound(p: f64, k: u64, pattern: &OverlapPattern, r0: u64) -> Result<LogReal> {
    let ln_q = ln_q_of(p)?;
    if 30 * r0 >= k {
        return Err(Error::invalid(format!("need r0 < k/30, got k = {k}, r0 = {r0}")));
    }
    let k32 = u32::try_from(k).map_err(|_| Error::invalid("k too large"))?;
    pattern.check_fits(k32)?;
    if pattern.concentrated_row(k32, r0 as u32).is_none() {
        return Err(Error::invalid("pattern has no row with r_s > k - r0 split into parts below k - 6 r0"));
    }
    let base = lemma2_bound(p, k, pattern.r() as u64)?;
    Ok(base * LogReal::from_ln(4.0 * k as f64 * r0 as f64 * ln_q))
}

/// `1 − 6q^k + 36q^{2k}`.
pub fn lemma4_vertex_bound(p: f64, k: u64) -> Result<f64> {
    let ln_q = ln_q_of(p)?;
    let qk = (k as f64 * ln_q).exp();
    Ok(1.0 - 6.0 * qk + 36.0 * qk * qk)
}

/// Exact probability that a vertex outside both tuples has a neighbour in
/// each of `X1, X2, X3, Y1, Y2, Y3`, by inclusion–exclusion over subsets of
/// the six sets.
pub fn joint_domination_probability(pattern: &OverlapPattern, p: f64, k: u64) -> Result<f64> {
    let ln_q = ln_q_of(p)?;
    let r0 = r0_of(p)?;
    let k32 = u32::try_from(k).map_err(|_| Error::invalid("k too large"))?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    pattern.check_fits(k32)?;
    if pattern.r() as u64 > r0 {
        return Err(Error::invalid(format!("overlap r = {} exceeds r0 = {r0}", pattern.r())));
    }
    let rij = pattern.rij();
    let rows = pattern.row_sums();
    let cols = pattern.col_sums();
    let mut total = 0.0;
    // Bits 0..3 select Y_i, bits 3..6 select X_j.
    for mask in 0u32..64 {
        let in_y = |i: usize| mask >> i & 1 == 1;
        let in_x = |j: usize| mask >> (3 + j) & 1 == 1;
        let mut size = 0u64;
        for i in 0..3 {
            if in_y(i) {
                size += k - rows[i] as u64;
            }
            if in_x(i) {
                size += k - cols[i] as u64;
            }
            for j in 0..3 {
                if in_y(i) || in_x(j) {
                    size += rij[i][j] as u64;
                }
            }
        }
        let term = (size as f64 * ln_q).exp();
        if mask.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

/// `(1 − λ)² (E X)² / E X²`, a lower bound on `P(X > λ E X)`.
pub fn paley_zygmund(ex: f64, ex2: f64, lambda: f64) -> Result<f64> {
    if !(ex >= 0.0 && ex.is_finite()) {
        return Err(Error::invalid("E X must be finite and nonnegative"));
    }
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::invalid("lambda must lie in [0, 1)"));
    }
    if !(ex2 > 0.0 && ex2.is_finite()) {
        return Err(Error::invalid("E X^2 must be finite and positive"));
    }
    if ex2 < ex * ex * (1.0 - 1e-12) {
        return Err(Error::invalid(format!("E X^2 = {ex2} is below (E X)^2 = {}", ex * ex)));
    }
    Ok((1.0 - lambda).powi(2) * ex * ex / ex2)
}

/// `((1−p)^{r − 6/k − r²/(3k)} · e¹⁵)^k` for `r₀ <= r <= 3k − r₀`.
pub fn s1_term_bound(p: f64, k: u64, r: u64) -> Result<LogReal> {
    let ln_q = ln_q_of(p)?;
    let r0 = r0_of(p)?;
    if k == 0 || r < r0 || r + r0 > 3 * k {
        return Err(Error::invalid(format!("r = {r} outside [r0, 3k - r0] = [{r0}, {}]", (3 * k).saturating_sub(r0))));
    }
    let (kf, rf) = (k as f64, r as f64);
    Ok(LogReal::from_ln(kf * ((rf - 6.0 / kf - rf * rf / (3.0 * kf)) * ln_q + 15.0)))
}

/// `Σ_{r = r₀}^{3k − r₀} s1_term_bound(p, k, r)`; zero when the range is empty.
pub fn s1_sum(p: f64, k: u64) -> Result<LogReal> {
    let r0 = r0_of(p)?;
    if 3 * k < 2 * r0 {
        return Ok(LogReal::ZERO);
    }
    let terms = (r0..=3 * k - r0).map(|r| s1_term_bound(p, k, r).map(|t| t.logmag())).collect::<Result<Vec<_>>>()?;
    Ok(LogReal::sum_ln_terms(terms))
}

/// Growth envelope `k³` of the middle part of the second moment.
pub fn s2_envelope(p: f64, k: u64) -> Result<LogReal> {
    check_probability(p)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    Ok(LogReal::from_ln(3.0 * (k as f64).ln()))
}

/// Pieces of the large-overlap estimate at `n = seq_large(p, k)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct S3Exponents {
    pub n: u64,
    /// `2r(3k − r)/3`, a lower bound on `Σᵢ (k − rᵢ)(r − rᵢ)`.
    pub overlap_exponent_lower: f64,
    /// `(3nk · q^{2r/3})^{3k − r}`.
    pub count_factor: LogReal,
}

pub fn s3_exponents(p: f64, k: u64, r: u64, r0: u64) -> Result<S3Exponents> {
    let ln_q = ln_q_of(p)?;
    if k == 0 || r > 3 * k || r + r0 < 3 * k {
        return Err(Error::invalid(format!("r = {r} outside [3k - r0, 3k] for k = {k}, r0 = {r0}")));
    }
    let n = seq_large(p, k)?;
    let (kf, rf) = (k as f64, r as f64);
    let base = 3f64.ln() + (n as f64).ln() + kf.ln() + 2.0 * rf / 3.0 * ln_q;
    Ok(S3Exponents {
        n,
        overlap_exponent_lower: 2.0 * rf * (3.0 * kf - rf) / 3.0,
        count_factor: LogReal::from_ln((3.0 * kf - rf) * base),
    })
}

/// `Σᵢ (k − rᵢ)(r − rᵢ)` with `r = r₁ + r₂ + r₃`.
pub fn large_overlap_exponent(k: u64, rows: [u64; 3]) -> Result<i64> {
    if rows.iter().any(|&x| x > k) {
        return Err(Error::invalid(format!("row sums {rows:?} exceed k = {k}")));
    }
    let r: i64 = rows.iter().map(|&x| x as i64).sum();
    let k = k as i64;
    Ok(rows.iter().map(|&x| (k - x as i64) * (r - x as i64)).sum())
}
