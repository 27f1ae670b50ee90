use serde::Serialize;

use super::{k_star_exact, ln_factorial, ln_falling, ln_one_minus_q_pow, LogReal, Params};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Exact `E X(k, l, m)` in `G(n, p)`:
/// `n!/(k! l! m! (n−s)!) · klm · q^{kl+lm+km−3} · p³ · Π(1 − q^x)^{n−s}`
/// with `q = 1 − p` and `s = k + l + m`.
pub fn expected_count(prm: &Params, k: u64, l: u64, m: u64) -> Result<LogReal> {
    prm.check_point(k, l, m)?;
    let s = k + l + m;
    let outside = (prm.n() - s) as f64;
    let (kf, lf, mf) = (k as f64, l as f64, m as f64);
    let ln_q = prm.ln_q();
    let mut acc = CompensatedSum::new();
    acc.add(ln_falling(prm.n(), s));
    acc.add(-ln_factorial(k));
    acc.add(-ln_factorial(l));
    acc.add(-ln_factorial(m));
    acc.add(kf.ln() + lf.ln() + mf.ln());
    acc.add((kf * lf + lf * mf + kf * mf - 3.0) * ln_q);
    acc.add(3.0 * prm.ln_p());
    if outside > 0.0 {
        for x in [kf, lf, mf] {
            acc.add(outside * ln_one_minus_q_pow(ln_q, x));
        }
    }
    Ok(LogReal::from_ln(acc.value()))
}

/// The exponent `f` of the upper bound `E X <= e^{f+g}`, on the continuous
/// extension to positive reals.
pub fn f_value(prm: &Params, x: [f64; 3]) -> Result<f64> {
    prm.check_real_point(x)?;
    let n = prm.n() as f64;
    let [k, l, m] = x;
    let ln_q = prm.ln_q();
    let mut acc = CompensatedSum::new();
    for v in x {
        acc.add(v * (n / v).ln());
        acc.add(v.ln());
        acc.add(v);
        acc.add(-(n.ln() + v * ln_q).exp());
    }
    acc.add((k * l + k * m + l * m - 3.0) * ln_q);
    acc.add(3.0 * prm.ln_p());
    Ok(acc.value())
}

/// The remainder `g = (k + l + m) Σ q^x`.
pub fn g_value(prm: &Params, x: [f64; 3]) -> Result<f64> {
    prm.check_real_point(x)?;
    let ln_q = prm.ln_q();
    let s: f64 = x.iter().sum();
    Ok(s * x.iter().map(|v| (v * ln_q).exp()).sum::<f64>())
}

/// `∇f`; the `k` component is `ln(n/k) + 1/k + (l+m) ln q − n q^k ln q`.
pub fn grad_f(prm: &Params, x: [f64; 3]) -> Result<[f64; 3]> {
    prm.check_real_point(x)?;
    let n = prm.n() as f64;
    let ln_q = prm.ln_q();
    let total: f64 = x.iter().sum();
    Ok(x.map(|v| (n / v).ln() + 1.0 / v + (total - v) * ln_q - (n.ln() + v * ln_q).exp() * ln_q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    NegativeDefinite,
    PositiveDefinite,
    NotDefinite,
}

/// Second partials of `f` at a point, classified by Sylvester's criterion.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HessianReport {
    pub matrix: [[f64; 3]; 3],
    pub minors: [f64; 3],
    pub verdict: Definiteness,
}

pub fn hessian_f(prm: &Params, x: [f64; 3]) -> Result<HessianReport> {
    prm.check_real_point(x)?;
    let n_ln = (prm.n() as f64).ln();
    let ln_q = prm.ln_q();
    let mut h = [[ln_q; 3]; 3];
    for (i, &v) in x.iter().enumerate() {
        h[i][i] = -1.0 / v - 1.0 / (v * v) - (n_ln + v * ln_q).exp() * ln_q * ln_q;
    }
    let m1 = h[0][0];
    let m2 = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let m3 = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
        + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
    let verdict = if m1 < 0.0 && m2 > 0.0 && m3 < 0.0 {
        Definiteness::NegativeDefinite
    } else if m1 > 0.0 && m2 > 0.0 && m3 > 0.0 {
        Definiteness::PositiveDefinite
    } else {
        Definiteness::NotDefinite
    };
    Ok(HessianReport { matrix: h, minors: [m1, m2, m3], verdict })
}

/// Leading-order `E X(k, k, k)` along `n = ⌊k q^{−k}⌋`:
/// `(p/q)³ k^{3/2} / (2π)^{3/2}`.
pub fn diag_expectation_asymptotic(p: f64, k: u64) -> Result<f64> {
    crate::graph::check_probability(p)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let ratio = p / (1.0 - p);
    Ok(ratio.powi(3) * (k as f64).powf(1.5) / (2.0 * std::f64::consts::PI).powf(1.5))
}

/// Result of [`first_moment_sum`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FirstMomentSum {
    /// `Σ E X(k, l, m)` over `D_n`.
    #[serde(rename = "first_moment_sum")]
    pub total: LogReal,
    /// Final box size `K`; the sum covers `k, l, m <= K`.
    pub window: u64,
    /// Number of lattice points summed.
    pub terms: u64,
    /// Whether the box reached all of `D_n`, making the sum exact.
    pub covers_domain: bool,
    /// Largest term on the outer face of the box.
    pub boundary_max: LogReal,
}

const SHELL_CUTOFF_LN: f64 = -57.564_627_324_851_14; // ln 1e-25
const MAX_BOX_POINTS: u64 = 400_000_000;

/// `Σ_{(k,l,m) ∈ D_n} E X(k, l, m)`.
///
/// Sums over the box `k, l, m <= K` starting from `K = ⌈4k*⌉` and doubling
/// until every term on the outer face is below `10⁻²⁵` or the box covers
/// `D_n`. Terms are accumulated largest first, so the result is independent
/// of traversal order.
pub fn first_moment_sum(prm: &Params) -> Result<FirstMomentSum> {
    let n = prm.n();
    if n < 3 {
        return Err(Error::invalid("first moment sum needs n >= 3"));
    }
    let top = n - 2;
    let start = k_star_exact(prm).map(|r| r.k_star).unwrap_or(1.0);
    let mut window = ((4.0 * start).ceil() as u64).clamp(1, top);
    loop {
        let points = window.saturating_mul(window).saturating_mul(window);
        if points > MAX_BOX_POINTS {
            return Err(Error::Numeric(format!(
                "first moment window reached K = {window} without the boundary terms dropping below 1e-25"
            )));
        }
        let (terms, boundary) = box_terms(prm, window);
        let covers = window == top;
        if covers || boundary < SHELL_CUTOFF_LN {
            let count = terms.len() as u64;
            return Ok(FirstMomentSum {
                total: LogReal::sum_ln_terms(terms),
                window,
                terms: count,
                covers_domain: covers,
                boundary_max: LogReal::from_ln(boundary),
            });
        }
        window = window.saturating_mul(2).min(top);
    }
}

/// Logs of every term in the box, in lattice order, plus the largest log on
/// the face `max(k, l, m) = K`.
fn box_terms(prm: &Params, big_k: u64) -> (Vec<f64>, f64) {
    let n = prm.n();
    let kk = big_k as usize;
    let ln_q = prm.ln_q();
    let s_max = (3 * big_k).min(n) as usize;
    // falling[s] = ln(n!/(n−s)!)
    let mut falling = Vec::with_capacity(s_max + 1);
    let mut acc = CompensatedSum::new();
    falling.push(0.0);
    for j in 0..s_max as u64 {
        acc.add(((n - j) as f64).ln());
        falling.push(acc.value());
    }
    // single[x] = ln x − ln x!, dom[x] = ln(1 − q^x)
    let single: Vec<f64> = (0..=kk).map(|x| (x as f64).ln() - ln_factorial(x as u64)).collect();
    let dom: Vec<f64> = (0..=kk).map(|x| ln_one_minus_q_pow(ln_q, x as f64)).collect();
    let base = 3.0 * prm.ln_p() - 3.0 * ln_q;

    let mut out = Vec::new();
    let mut boundary = f64::NEG_INFINITY;
    for k in 1..=kk {
        for l in 1..=kk {
            if k + l + 1 > n as usize {
                break;
            }
            for m in 1..=kk {
                let s = k + l + m;
                if s > n as usize {
                    break;
                }
                let (kf, lf, mf) = (k as f64, l as f64, m as f64);
                let outside = (n - s as u64) as f64;
                let mut t = falling[s] + single[k] + single[l] + single[m];
                t += (kf * lf + lf * mf + kf * mf) * ln_q + base;
                if outside > 0.0 {
                    t += outside * (dom[k] + dom[l] + dom[m]);
                }
                if k == kk || l == kk || m == kk {
                    boundary = boundary.max(t);
                }
                out.push(t);
            }
        }
    }
    (out, boundary)
}
