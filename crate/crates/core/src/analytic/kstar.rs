use serde::Serialize;

use super::{f_value, Params};
use crate::error::{Error, Result};

/// Root of the diagonal stationarity equation, with solver diagnostics.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KStar {
    pub k_star: f64,
    /// `|φ(k*)|` for the equation solved.
    pub residual: f64,
    pub bisection_steps: u32,
    pub newton_steps: u32,
}

const BRACKET_WIDTH: f64 = 1e-8;
const MAX_NEWTON: u32 = 5;
const RESIDUAL_TOL: f64 = 1e-10;

/// `φ(k) = ln(n/k) + 2k ln q + 1/k − n q^k ln q`, the common value of the
/// partials of `f` at `(k, k, k)`. It is strictly decreasing in `k`.
pub fn k_star_equation(prm: &Params, k: f64) -> f64 {
    let n = prm.n() as f64;
    let ln_q = prm.ln_q();
    (n / k).ln() + 2.0 * k * ln_q + 1.0 / k - (n.ln() + k * ln_q).exp() * ln_q
}

fn k_star_slope(prm: &Params, k: f64) -> f64 {
    let n = prm.n() as f64;
    let ln_q = prm.ln_q();
    -1.0 / k - 1.0 / (k * k) + 2.0 * ln_q - (n.ln() + k * ln_q).exp() * ln_q * ln_q
}

/// Solves `φ(k) = 0` on `[1, n]`: bisection down to width `10⁻⁸`, then at
/// most five Newton steps.
pub fn k_star_exact(prm: &Params) -> Result<KStar> {
    if prm.n() < 3 {
        return Err(Error::invalid("k* needs n >= 3"));
    }
    let (mut lo, mut hi) = (1.0f64, prm.n() as f64);
    let (f_lo, f_hi) = (k_star_equation(prm, lo), k_star_equation(prm, hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::Numeric(format!(
            "no sign change of the k* equation on [1, {}]: φ(1) = {f_lo}, φ(n) = {f_hi}",
            prm.n()
        )));
    }
    let mut bisection_steps = 0;
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if k_star_equation(prm, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        bisection_steps += 1;
    }
    let mut k = 0.5 * (lo + hi);
    let mut res = k_star_equation(prm, k);
    let mut newton_steps = 0;
    while newton_steps < MAX_NEWTON && res != 0.0 {
        let next = k - res / k_star_slope(prm, k);
        if !(next >= lo && next <= hi) {
            break;
        }
        let next_res = k_star_equation(prm, next);
        newton_steps += 1;
        if next_res.abs() >= res.abs() {
            break;
        }
        k = next;
        res = next_res;
    }
    if res.abs() > RESIDUAL_TOL {
        return Err(Error::Numeric(format!("k* residual {res:e} above {RESIDUAL_TOL:e}")));
    }
    Ok(KStar { k_star: k, residual: res.abs(), bisection_steps, newton_steps })
}

/// Leading term `(ln n − ln ln n + ln ln(1/q)) / ln(1/q)`.
pub fn k_star_asymptotic(prm: &Params) -> Result<f64> {
    let n = prm.n() as f64;
    if n <= std::f64::consts::E {
        return Err(Error::invalid("asymptotic k* needs n > e"));
    }
    let inv = -prm.ln_q();
    Ok((n.ln() - n.ln().ln() + inv.ln()) / inv)
}

/// `f(k*, k*, k*)`.
pub fn f_at_optimum(prm: &Params) -> Result<f64> {
    let k = k_star_exact(prm)?.k_star;
    f_value(prm, [k; 3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::grad_f;

    #[test]
    fn root_at_n11() {
        let prm = Params::new(11, 0.5).unwrap();
        let r = k_star_exact(&prm).unwrap();
        assert!(r.residual <= 1e-10);
        assert!((r.k_star - 2.4191).abs() < 1e-3, "{}", r.k_star);
        for g in grad_f(&prm, [r.k_star; 3]).unwrap() {
            assert!(g.abs() < 1e-8);
        }
    }

    #[test]
    fn unique_sign_change() {
        for (n, p) in [(11u64, 0.5), (1000, 0.3), (1_000_000, 0.7)] {
            let prm = Params::new(n, p).unwrap();
            let steps = 10_000;
            let mut crossings = 0;
            let mut prev = k_star_equation(&prm, 1.0);
            for s in 1..=steps {
                let k = 1.0 + (n as f64 - 1.0) * s as f64 / steps as f64;
                let cur = k_star_equation(&prm, k);
                if (prev > 0.0) != (cur > 0.0) {
                    crossings += 1;
                }
                prev = cur;
            }
            assert_eq!(crossings, 1, "n = {n}, p = {p}");
        }
    }

    #[test]
    fn small_n_rejected() {
        assert!(k_star_exact(&Params::new(2, 0.5).unwrap()).is_err());
        assert!(k_star_asymptotic(&Params::new(2, 0.5).unwrap()).is_err());
    }

    #[test]
    fn asymptotic_orders() {
        let a = k_star_asymptotic(&Params::new(1000, 0.5).unwrap()).unwrap();
        let b = k_star_asymptotic(&Params::new(100_000, 0.5).unwrap()).unwrap();
        let c = k_star_asymptotic(&Params::new(100_000, 0.7).unwrap()).unwrap();
        assert!(a < b && c < b);
    }
}
