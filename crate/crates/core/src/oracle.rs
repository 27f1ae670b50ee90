//! Exact moments at tiny `n` by enumerating every labeled graph.
//!
//! Each graph contributes `p^e (1−p)^{N−e}` where `e` is its edge count, so
//! the enumeration only needs integer totals per edge count. An
//! [`OracleTable`] stores those totals once; evaluating at any `p` is then a
//! short polynomial sum.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::Params;
use crate::error::{Error, Result};
use crate::graph::{check_probability, Graph};
use crate::numeric::CompensatedSum;
use crate::witness::{count_profile, exists_special, SearchBudget};

pub const ORACLE_MAX_N: usize = 6;
pub const UNION_MAX_N: usize = 5;

const CHUNKS: u64 = 256;

/// Integer totals over all graphs with `e` edges, indexed by `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Coefficients {
    sum_x: Vec<u64>,
    sum_x2: Vec<u128>,
    positive: Vec<u64>,
}

impl Coefficients {
    fn new(pairs: usize) -> Self {
        Coefficients { sum_x: vec![0; pairs + 1], sum_x2: vec![0; pairs + 1], positive: vec![0; pairs + 1] }
    }

    fn record(&mut self, edges: usize, x: u64) {
        self.sum_x[edges] += x;
        self.sum_x2[edges] += x as u128 * x as u128;
        if x > 0 {
            self.positive[edges] += 1;
        }
    }

    fn merge(&mut self, other: &Coefficients) {
        for e in 0..self.sum_x.len() {
            self.sum_x[e] += other.sum_x[e];
            self.sum_x2[e] += other.sum_x2[e];
            self.positive[e] += other.positive[e];
        }
    }
}

/// `Σ_e c_e p^e (1−p)^{N−e}`.
fn weigh(coeffs: impl Iterator<Item = f64>, pairs: usize, prm: &Params) -> f64 {
    coeffs
        .enumerate()
        .filter(|(_, c)| *c != 0.0)
        .map(|(e, c)| c * (e as f64 * prm.ln_p() + (pairs - e) as f64 * prm.ln_q()).exp())
        .collect::<CompensatedSum>()
        .value()
}

/// Which index sets a set of moments sums over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// `X(k, l, m)` for one fixed triple.
    Single,
    /// `Σ_{(k,l,m) ∈ D_n} X(k, l, m)`.
    All,
}

/// Exact `E X`, `E X²` and `P(X > 0)` at one `(n, p)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExactMoments {
    pub n: usize,
    pub p: f64,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub m: Option<usize>,
    pub scope: Scope,
    pub e_x: f64,
    pub e_x2: f64,
    pub p_positive: f64,
}

/// Per-edge-count totals of `X(k, l, m)` for every point of `D_n`, and of
/// their sum, over all `2^{C(n,2)}` graphs on `n` vertices.
#[derive(Clone, Debug)]
pub struct OracleTable {
    n: usize,
    pairs: usize,
    points: Vec<(usize, usize, usize)>,
    per_point: Vec<Coefficients>,
    all: Coefficients,
}

impl OracleTable {
    pub fn build(n: usize) -> Result<Self> {
        if n == 0 || n > ORACLE_MAX_N {
            return Err(Error::Infeasible(format!("exact enumeration supports 1 <= n <= {ORACLE_MAX_N}, got {n}")));
        }
        let pairs = n * (n - 1) / 2;
        let mut points = Vec::new();
        for k in 1..=n {
            for l in 1..=n {
                for m in 1..=n {
                    if k + l + m <= n {
                        points.push((k, l, m));
                    }
                }
            }
        }
        let total: u64 = 1 << pairs;
        let chunk = total.div_ceil(CHUNKS).max(1);
        let partials: Vec<(Vec<Coefficients>, Coefficients)> = (0..total.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut per = vec![Coefficients::new(pairs); points.len()];
                let mut all = Coefficients::new(pairs);
                for mask in c * chunk..((c + 1) * chunk).min(total) {
                    let g = Graph::from_pair_mask(n, mask);
                    let edges = mask.count_ones() as usize;
                    let profile = count_profile(&g).expect("n within profile range");
                    for (slot, &(k, l, m)) in per.iter_mut().zip(&points) {
                        slot.record(edges, profile.get(k, l, m));
                    }
                    all.record(edges, profile.total());
                }
                (per, all)
            })
            .collect();
        let mut per_point = vec![Coefficients::new(pairs); points.len()];
        let mut all = Coefficients::new(pairs);
        for (per, a) in &partials {
            for (dst, src) in per_point.iter_mut().zip(per) {
                dst.merge(src);
            }
            all.merge(a);
        }
        Ok(OracleTable { n, pairs, points, per_point, all })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Points of `D_n` in lexicographic order.
    pub fn points(&self) -> &[(usize, usize, usize)] {
        &self.points
    }

    fn evaluate(&self, c: &Coefficients, prm: &Params) -> (f64, f64, f64) {
        let e_x = weigh(c.sum_x.iter().map(|&v| v as f64), self.pairs, prm);
        let e_x2 = weigh(c.sum_x2.iter().map(|&v| v as f64), self.pairs, prm);
        let pos = weigh(c.positive.iter().map(|&v| v as f64), self.pairs, prm);
        (e_x, e_x2, pos)
    }

    pub fn moments(&self, p: f64, k: usize, l: usize, m: usize) -> Result<ExactMoments> {
        let prm = Params::new(self.n as u64, p)?;
        let idx = self
            .points
            .iter()
            .position(|&pt| pt == (k, l, m))
            .ok_or_else(|| Error::invalid(format!("({k},{l},{m}) is outside D_{}", self.n)))?;
        let (e_x, e_x2, p_positive) = self.evaluate(&self.per_point[idx], &prm);
        Ok(ExactMoments { n: self.n, p, k: Some(k), l: Some(l), m: Some(m), scope: Scope::Single, e_x, e_x2, p_positive })
    }

    /// Moments of the total count over all of `D_n`; `p_positive` is then the
    /// probability that some special tuple exists.
    pub fn moments_all(&self, p: f64) -> Result<ExactMoments> {
        let prm = Params::new(self.n as u64, p)?;
        let (e_x, e_x2, p_positive) = self.evaluate(&self.all, &prm);
        Ok(ExactMoments { n: self.n, p, k: None, l: None, m: None, scope: Scope::All, e_x, e_x2, p_positive })
    }
}

/// Exact moments of `X(k, l, m)` in `G(n, p)`, `n <= 6`.
pub fn exact_moments(n: usize, p: f64, k: usize, l: usize, m: usize) -> Result<ExactMoments> {
    check_probability(p)?;
    OracleTable::build(n)?.moments(p, k, l, m)
}

/// Exact probability that `G(n, p)` contains a special tuple of any size,
/// found by running the exact existence search on every graph, `n <= 5`.
pub fn exact_union_probability(n: usize, p: f64) -> Result<f64> {
    let prm = Params::new(n as u64, p)?;
    if n > UNION_MAX_N {
        return Err(Error::Infeasible(format!("exact union probability supports n <= {UNION_MAX_N}, got {n}")));
    }
    let pairs = n * (n - 1) / 2;
    let budget = SearchBudget::default();
    let mut hits = vec![0u64; pairs + 1];
    for mask in 0..1u64 << pairs {
        let g = Graph::from_pair_mask(n, mask);
        if exists_special(&g, &budget)?.is_found() {
            hits[mask.count_ones() as usize] += 1;
        }
    }
    Ok(weigh(hits.into_iter().map(|v| v as f64), pairs, &prm))
}
