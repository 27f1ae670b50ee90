//! Triangle-rooted backtracking for counting and finding special tuples.
//!
//! The three distinguished vertices are pairwise adjacent, so every tuple is
//! rooted at an ordered triangle `(x1, x2, x3)`. The remaining vertices are
//! assigned, in ascending order, to `X1`, `X2`, `X3` or to the outside. A
//! vertex may join `Xi` only while it has no neighbor in any other set, and
//! an outside vertex must keep, for every `i`, a neighbor either in `Xi` or
//! among the unassigned vertices still eligible for `Xi`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bits::{rows_u64, rows_wide, Bits};
use super::{is_special, KTuple};
use crate::error::{Error, Result};
use crate::graph::{Graph, Seed, VertexSet};

/// Largest raw enumeration size `C(n,k)·C(n−k,l)·C(n−k−l,m)` that
/// `count_special` accepts.
pub const COUNT_ENUMERATION_LIMIT: f64 = 1e9;

/// Largest graph for which `count_profile` will tabulate every size triple.
pub const PROFILE_MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Exact mode refuses graphs with more vertices than this.
    pub max_n: usize,
    /// Backtracking nodes allowed across all triangles in exact mode.
    pub node_limit: u64,
    pub mode: SearchMode,
    /// Random restarts in heuristic mode.
    pub restarts: u32,
    /// Master seed for heuristic restarts (restart `r` uses stream `r`).
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_n: 24, node_limit: 100_000_000, mode: SearchMode::Exact, restarts: 1000, seed: 0 }
    }
}

impl SearchBudget {
    pub fn heuristic(seed: u64) -> Self {
        SearchBudget { mode: SearchMode::Heuristic, seed, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Existence {
    Found(KTuple),
    Absent,
    /// Heuristic search gave up without a witness.
    Unknown,
}

impl Existence {
    pub fn is_found(&self) -> bool {
        matches!(self, Existence::Found(_))
    }
}

/// Counts of special tuples for every size triple `(k, l, m)` of one graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountProfile {
    n: usize,
    counts: Vec<u64>,
}

impl CountProfile {
    fn new(n: usize) -> Self {
        CountProfile { n, counts: vec![0; (n + 1).pow(3)] }
    }

    #[inline]
    fn slot(&self, k: usize, l: usize, m: usize) -> usize {
        (k * (self.n + 1) + l) * (self.n + 1) + m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, l: usize, m: usize) -> u64 {
        if k > self.n || l > self.n || m > self.n {
            return 0;
        }
        self.counts[self.slot(k, l, m)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Nonzero entries as `((k, l, m), count)`, in ascending `(k, l, m)`.
    pub fn nonzero(&self) -> impl Iterator<Item = ((usize, usize, usize), u64)> + '_ {
        let d = self.n + 1;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(s, &c)| ((s / (d * d), s / d % d, s % d), c))
    }
}

/// Raw size of the ordered set-triple space that exact counting is
/// guarded by: `C(n,k)·C(n−k,l)·C(n−k−l,m)`.
pub fn enumeration_size(n: usize, k: usize, l: usize, m: usize) -> f64 {
    let ln_choose = |a: usize, b: usize| {
        crate::analytic::ln_factorial(a as u64)
            - crate::analytic::ln_factorial(b as u64)
            - crate::analytic::ln_factorial((a - b) as u64)
    };
    (ln_choose(n, k) + ln_choose(n - k, l) + ln_choose(n - k - l, m)).exp()
}

struct State<B> {
    members: [B; 3],
    sizes: [usize; 3],
    forbid: [B; 3],
    remaining: B,
    pending: B,
}

impl<B: Bits> Clone for State<B> {
    fn clone(&self) -> Self {
        State {
            members: self.members.clone(),
            sizes: self.sizes,
            forbid: self.forbid.clone(),
            remaining: self.remaining.clone(),
            pending: self.pending.clone(),
        }
    }
}

#[derive(PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

struct Engine<'a, B> {
    rows: &'a [B],
    n: usize,
    caps: [usize; 3],
    exact_sizes: bool,
    nodes: u64,
    node_limit: u64,
}

impl<'a, B: Bits> Engine<'a, B> {
    fn new(rows: &'a [B], caps: Option<[usize; 3]>, node_limit: u64) -> Self {
        Engine {
            rows,
            n: rows.len(),
            caps: caps.unwrap_or([usize::MAX; 3]),
            exact_sizes: caps.is_some(),
            nodes: 0,
            node_limit,
        }
    }

    fn root(&self, tri: [usize; 3]) -> State<B> {
        let mut remaining = B::empty(self.n);
        for v in 0..self.n {
            remaining.insert(v);
        }
        let mut members = [B::empty(self.n), B::empty(self.n), B::empty(self.n)];
        for (i, &x) in tri.iter().enumerate() {
            members[i].insert(x);
            remaining.remove(x);
        }
        let forbid = [0, 1, 2].map(|i| {
            let mut f = B::empty(self.n);
            for (j, &x) in tri.iter().enumerate() {
                if j != i {
                    f.union_with(&self.rows[x]);
                }
            }
            f
        });
        State { members, sizes: [1; 3], forbid, remaining, pending: B::empty(self.n) }
    }

    /// Drops dominated vertices from `pending` and reports whether the
    /// partial assignment can still be completed.
    fn viable(&self, st: &mut State<B>) -> bool {
        let pools = [0, 1, 2].map(|i| {
            if st.sizes[i] < self.caps[i] {
                st.remaining.minus(&st.forbid[i])
            } else {
                B::empty(self.n)
            }
        });
        if self.exact_sizes {
            let mut deficit = 0;
            for i in 0..3 {
                let need = self.caps[i] - st.sizes[i];
                if need > pools[i].count() {
                    return false;
                }
                deficit += need;
            }
            if deficit > st.remaining.count() {
                return false;
            }
        }
        for u in st.pending.members() {
            let row = &self.rows[u];
            let mut dominated = true;
            for i in 0..3 {
                if row.intersects(&st.members[i]) {
                    continue;
                }
                dominated = false;
                if !row.intersects(&pools[i]) {
                    return false;
                }
            }
            if dominated {
                st.pending.remove(u);
            }
        }
        true
    }

    fn descend<F>(&mut self, order: &[usize], mut st: State<B>, leaf: &mut F) -> std::result::Result<Flow, u64>
    where
        F: FnMut(&State<B>) -> Flow,
    {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(self.nodes);
        }
        if !self.viable(&mut st) {
            return Ok(Flow::Continue);
        }
        let Some((&v, rest)) = order.split_first() else {
            let sizes_ok = !self.exact_sizes || st.sizes == self.caps;
            return Ok(if st.pending.is_empty() && sizes_ok { leaf(&st) } else { Flow::Continue });
        };
        st.remaining.remove(v);
        let row = &self.rows[v];

        let mut outside = st.clone();
        if !(0..3).all(|i| row.intersects(&outside.members[i])) {
            outside.pending.insert(v);
        }
        if self.descend(rest, outside, leaf)? == Flow::Stop {
            return Ok(Flow::Stop);
        }
        for i in 0..3 {
            if st.sizes[i] >= self.caps[i] || st.forbid[i].contains(v) {
                continue;
            }
            let mut next = st.clone();
            next.members[i].insert(v);
            next.sizes[i] += 1;
            for j in (0..3).filter(|&j| j != i) {
                next.forbid[j].union_with(row);
            }
            if self.descend(rest, next, leaf)? == Flow::Stop {
                return Ok(Flow::Stop);
            }
        }
        Ok(Flow::Continue)
    }
}

/// Ordered triangles `(a, b, c)`, ascending lexicographic.
fn ordered_triangles(g: &Graph) -> Vec<[usize; 3]> {
    let n = g.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in g.neighbors(a).iter() {
            for c in g.neighbors(a).iter() {
                if c != b && g.adjacent(b, c) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn order_without(n: usize, tri: [usize; 3]) -> Vec<usize> {
    (0..n).filter(|v| !tri.contains(v)).collect()
}

fn count_sized<B: Bits + Send + Sync>(g: &Graph, rows: &[B], caps: [usize; 3], parallel: bool) -> u64 {
    let per_triangle = |tri: [usize; 3]| -> u64 {
        let mut engine = Engine::new(rows, Some(caps), u64::MAX);
        let mut count = 0u64;
        let order = order_without(g.n(), tri);
        let root = engine.root(tri);
        let _ = engine.descend(&order, root, &mut |_| {
            count += 1;
            Flow::Continue
        });
        count
    };
    let tris = ordered_triangles(g);
    if parallel {
        tris.into_par_iter().map(per_triangle).sum()
    } else {
        tris.into_iter().map(per_triangle).sum()
    }
}

/// Number of ordered special tuples with `|X1| = k`, `|X2| = l`, `|X3| = m`.
pub fn count_special(g: &Graph, k: usize, l: usize, m: usize) -> Result<u64> {
    count_special_with(g, k, l, m, true)
}

pub(crate) fn count_special_with(g: &Graph, k: usize, l: usize, m: usize, parallel: bool) -> Result<u64> {
    let n = g.n();
    if k == 0 || l == 0 || m == 0 || k + l + m > n {
        return Err(Error::invalid(format!("need k, l, m >= 1 and k + l + m <= n, got ({k}, {l}, {m}) with n = {n}")));
    }
    let size = enumeration_size(n, k, l, m);
    if size > COUNT_ENUMERATION_LIMIT {
        return Err(Error::Infeasible(format!(
            "exact count over {size:.3e} set triples exceeds the limit of {COUNT_ENUMERATION_LIMIT:e}"
        )));
    }
    let caps = [k, l, m];
    Ok(if n <= 64 {
        count_sized(g, &rows_u64(g), caps, parallel)
    } else {
        count_sized(g, &rows_wide(g), caps, parallel)
    })
}

/// Counts for every size triple at once; limited to `n <= PROFILE_MAX_N`.
pub fn count_profile(g: &Graph) -> Result<CountProfile> {
    let n = g.n();
    if n > PROFILE_MAX_N {
        return Err(Error::Infeasible(format!("count profile needs n <= {PROFILE_MAX_N}, got {n}")));
    }
    let rows = rows_u64(g);
    let mut profile = CountProfile::new(n);
    let mut engine = Engine::new(&rows, None, u64::MAX);
    for tri in ordered_triangles(g) {
        let order = order_without(n, tri);
        let root = engine.root(tri);
        let _ = engine.descend(&order, root, &mut |st: &State<u64>| {
            let s = profile.slot(st.sizes[0], st.sizes[1], st.sizes[2]);
            profile.counts[s] += 1;
            Flow::Continue
        });
    }
    Ok(profile)
}

/// Decides whether `g` has a special tuple of any sizes.
///
/// Exact mode answers `Found` or `Absent`, or fails with
/// `Error::BudgetExceeded`. Heuristic mode answers `Found` or `Unknown`.
pub fn exists_special(g: &Graph, budget: &SearchBudget) -> Result<Existence> {
    match budget.mode {
        SearchMode::Exact => {
            if g.n() > budget.max_n {
                return Err(Error::Infeasible(format!(
                    "exact search limited to n <= {}, got n = {}; use heuristic mode",
                    budget.max_n,
                    g.n()
                )));
            }
            if g.n() <= 64 {
                exists_exact(g, &rows_u64(g), budget.node_limit)
            } else {
                exists_exact(g, &rows_wide(g), budget.node_limit)
            }
        }
        SearchMode::Heuristic => Ok(exists_heuristic(g, budget)),
    }
}

fn exists_exact<B: Bits>(g: &Graph, rows: &[B], node_limit: u64) -> Result<Existence> {
    let mut engine = Engine::new(rows, None, node_limit);
    for tri in ordered_triangles(g) {
        let order = order_without(g.n(), tri);
        let root = engine.root(tri);
        let mut found = None;
        let flow = engine
            .descend(&order, root, &mut |st: &State<B>| {
                found = Some(st.members.clone().map(|m| m.members()));
                Flow::Stop
            })
            .map_err(|nodes| Error::BudgetExceeded { nodes })?;
        if flow == Flow::Stop {
            let sets = found.expect("stop implies a recorded witness");
            return Ok(Existence::Found(KTuple::new(sets, tri)?));
        }
    }
    Ok(Existence::Absent)
}

fn random_triangle(g: &Graph, rng: &mut impl Rng) -> Option<[usize; 3]> {
    let n = g.n();
    for _ in 0..64 {
        let a = rng.gen_range(0..n);
        let na: Vec<usize> = g.neighbors(a).iter().collect();
        let Some(&b) = na.choose(rng) else { continue };
        let common: Vec<usize> = na.iter().copied().filter(|&c| c != b && g.adjacent(b, c)).collect();
        if let Some(&c) = common.choose(rng) {
            return Some([a, b, c]);
        }
    }
    None
}

fn exists_heuristic(g: &Graph, budget: &SearchBudget) -> Existence {
    let n = g.n();
    let seed = Seed::new(budget.seed);
    for restart in 0..budget.restarts {
        let mut rng = seed.with_stream(restart as u64).rng();
        let Some(tri) = random_triangle(g, &mut rng) else { continue };
        let mut members = tri.map(|x| VertexSet::from_vertices(n, [x]));
        let mut forbid = [0, 1, 2].map(|i| {
            let mut f = VertexSet::empty(n);
            for (j, &x) in tri.iter().enumerate() {
                if j != i {
                    f.union_with(g.neighbors(x));
                }
            }
            f
        });
        let mut order: Vec<usize> = order_without(n, tri);
        order.shuffle(&mut rng);

        let join = |v: usize, members: &mut [VertexSet; 3], forbid: &mut [VertexSet; 3], rng: &mut _| {
            let row = g.neighbors(v);
            let eligible: Vec<usize> = (0..3).filter(|&i| !forbid[i].contains(v)).collect();
            let lacking: Vec<usize> = eligible.iter().copied().filter(|&i| !row.intersects(&members[i])).collect();
            let pick = lacking.choose(rng).or_else(|| eligible.choose(rng)).copied();
            if let Some(i) = pick {
                members[i].insert(v);
                for j in (0..3).filter(|&j| j != i) {
                    forbid[j].union_with(row);
                }
                true
            } else {
                false
            }
        };

        let mut outside = Vec::new();
        for &v in &order {
            let row = g.neighbors(v);
            if (0..3).all(|i| row.intersects(&members[i])) || !join(v, &mut members, &mut forbid, &mut rng) {
                outside.push(v);
            }
        }
        for _ in 0..3 {
            let before = outside.len();
            outside.retain(|&v| {
                let row = g.neighbors(v);
                (0..3).all(|i| row.intersects(&members[i])) || !join(v, &mut members, &mut forbid, &mut rng)
            });
            if outside.len() == before {
                break;
            }
        }
        let sets = members.clone().map(|m| m.iter().collect::<Vec<_>>());
        if let Ok(t) = KTuple::new(sets, tri) {
            if is_special(g, &t).unwrap_or(false) {
                return Existence::Found(t);
            }
        }
    }
    Existence::Unknown
}
