//! Closed forms, bounds and sequences, evaluated in log space.
//!
//! Most functions take a [`Params`] holding a validated `(n, p)`; lattice
//! points `(k, l, m)` are passed separately so that scans do not rebuild it.

mod bounds;
mod expectation;
mod kstar;
mod logreal;
mod sequences;

use std::sync::OnceLock;

use serde::Serialize;

pub use bounds::{
    gamma_fn, joint_domination_probability, large_overlap_exponent, lemma1_rhs, lemma1_rhs_at, lemma1_scan,
    lemma2_bound, lemma3_bound, lemma4_vertex_bound, paley_zygmund, r0_of, s1_sum, s1_term_bound, s2_envelope,
    s3_exponents, Lemma1Scan, S3Exponents,
};
pub use expectation::{
    diag_expectation_asymptotic, expected_count, f_value, first_moment_sum, g_value, grad_f, hessian_f, Definiteness,
    FirstMomentSum, HessianReport,
};
pub use kstar::{f_at_optimum, k_star_asymptotic, k_star_equation, k_star_exact, KStar};
pub use logreal::LogReal;
pub use sequences::{max_feasible_index, seq_large, seq_small, Sequence};

use crate::error::{Error, Result};
use crate::graph::check_probability;
use crate::numeric::CompensatedSum;

/// A validated `(n, p)` pair with the logarithms used everywhere below.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Params {
    n: u64,
    p: f64,
    #[serde(skip)]
    ln_p: f64,
    #[serde(skip)]
    ln_q: f64,
}

impl Params {
    pub fn new(n: u64, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        check_probability(p)?;
        Ok(Params { n, p, ln_p: p.ln(), ln_q: (-p).ln_1p() })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// `ln(1 − p)`, which is negative.
    pub fn ln_q(&self) -> f64 {
        self.ln_q
    }

    pub fn ln_p(&self) -> f64 {
        self.ln_p
    }

    /// Fails unless `k, l, m >= 1` and `k + l + m <= n`.
    pub fn check_point(&self, k: u64, l: u64, m: u64) -> Result<()> {
        let s = k.checked_add(l).and_then(|s| s.checked_add(m));
        match s {
            Some(s) if k >= 1 && l >= 1 && m >= 1 && s <= self.n => Ok(()),
            _ => Err(Error::invalid(format!("({k},{l},{m}) is outside D_{}", self.n))),
        }
    }

    fn check_real_point(&self, x: [f64; 3]) -> Result<()> {
        if x.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::invalid(format!("coordinates must be positive, got {x:?}")))
        }
    }
}

const FACTORIAL_TABLE: usize = 1024;

fn factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut acc = CompensatedSum::new();
        let mut out = vec![0.0; FACTORIAL_TABLE + 1];
        for (x, slot) in out.iter_mut().enumerate().skip(2) {
            acc.add((x as f64).ln());
            *slot = acc.value();
        }
        out
    })
}

/// `ln x!`: tabulated sums up to 1024, log-gamma above.
pub fn ln_factorial(x: u64) -> f64 {
    if (x as usize) <= FACTORIAL_TABLE {
        factorial_table()[x as usize]
    } else {
        statrs::function::gamma::ln_gamma(x as f64 + 1.0)
    }
}

/// `ln(n! / (n − s)!)`.
///
/// Summed term by term for modest `s`: differencing two log-gammas near
/// `10¹³` loses most of the digits that matter here.
pub fn ln_falling(n: u64, s: u64) -> f64 {
    assert!(s <= n, "falling factorial with s > n");
    if s <= 4096 {
        (0..s).map(|j| ((n - j) as f64).ln()).collect::<CompensatedSum>().value()
    } else {
        ln_factorial(n) - ln_factorial(n - s)
    }
}

/// `ln(1 − (1−p)^x)` given `ln(1−p)`.
pub(crate) fn ln_one_minus_q_pow(ln_q: f64, x: f64) -> f64 {
    let t = x * ln_q;
    if t > -std::f64::consts::LN_2 {
        (-t.exp_m1()).ln()
    } else {
        (-t.exp()).ln_1p()
    }
}
