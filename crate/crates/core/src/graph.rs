//! Labeled simple graphs with packed bit-row adjacency, seeded G(n,p)
//! sampling and the edge-list text format.
//!
//! Vertices are `0..n` internally. Every external representation (edge
//! lists, tuple syntax) is 1-based.

use std::fmt::Write as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A fixed-universe set of vertices stored as packed `u64` words.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { n, words: vec![0; words_for(n)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_vertices(n: usize, vs: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < self.n);
        self.words[v / WORD] |= 1 << (v % WORD);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.words[v / WORD] &= !(1 << (v % WORD));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / WORD] >> (v % WORD) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * WORD + t)
            })
        })
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Master seed plus stream index for the counter-based generator.
///
/// The same `(master, stream)` pair always reproduces the same bit sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(master: u64) -> Self {
        Seed { master, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Seed { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

/// Uniform draw in [0, 1) with 53 bits of mantissa.
#[inline]
pub(crate) fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Labeled undirected simple graph on `n` vertices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    rows: Vec<VertexSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { n, rows: (0..n).map(|_| VertexSet::empty(n)).collect() }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge_unchecked(u, v);
            }
        }
        g
    }

    /// Builds a graph from 0-based edges, rejecting self-loops, duplicates
    /// and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Decodes a bitmask over the pairs `(u, v)`, `u < v`, in ascending
    /// lexicographic order: bit `b` is the `b`-th pair.
    pub fn from_pair_mask(n: usize, mask: u64) -> Self {
        let mut g = Self::empty(n);
        let mut bit = 0;
        for u in 0..n {
            for v in u + 1..n {
                if mask >> bit & 1 == 1 {
                    g.add_edge_unchecked(u, v);
                }
                bit += 1;
            }
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::invalid(format!(
                "vertex out of range: {{{}, {}}} with n = {}",
                u + 1,
                v + 1,
                self.n
            )));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {}", u + 1)));
        }
        if self.rows[u].contains(v) {
            return Err(Error::invalid(format!("duplicate edge {{{}, {}}}", u + 1, v + 1)));
        }
        self.add_edge_unchecked(u, v);
        Ok(())
    }

    #[inline]
    fn add_edge_unchecked(&mut self, u: usize, v: usize) {
        self.rows[u].insert(v);
        self.rows[v].insert(u);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Symmetric adjacency lookup. Rejects `u == v` and out-of-range vertices.
    pub fn has_edge(&self, u: usize, v: usize) -> Result<bool> {
        if u >= self.n || v >= self.n {
            return Err(Error::invalid(format!("vertex out of range (n = {})", self.n)));
        }
        if u == v {
            return Err(Error::invalid("adjacency query needs two distinct vertices"));
        }
        Ok(self.rows[u].contains(v))
    }

    #[inline]
    pub(crate) fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.rows[v]
    }

    /// Edges as 0-based pairs `(u, v)`, `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.rows[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::invalid("permutation length differs from vertex count"));
        }
        let mut seen = vec![false; self.n];
        for &t in perm {
            if t >= self.n || std::mem::replace(&mut seen[t], true) {
                return Err(Error::invalid("not a permutation"));
            }
        }
        let mut g = Self::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge_unchecked(perm[u], perm[v]);
        }
        Ok(g)
    }
}

/// Samples G(n,p): each pair `u < v` is drawn in ascending lexicographic
/// order from the stream selected by `seed`.
pub fn sample_gnp(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    check_probability(p)?;
    let mut rng = seed.rng();
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if unit_f64(&mut rng) < p {
                g.add_edge_unchecked(u, v);
            }
        }
    }
    Ok(g)
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("p must lie strictly inside (0, 1), got {p}")))
    }
}

/// Parses the edge-list format: a header `n m` followed by `m` lines `u v`
/// with 1-based vertices. Edge order and endpoint order are free.
pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let (n, m) = parse_pair(header).map_err(|msg| Error::Parse { line: hline, msg: format!("malformed header: {msg}") })?;
    let mut g = Graph::empty(n);
    let mut seen = 0;
    for (line, body) in lines {
        let (u, v) = parse_pair(body).map_err(|msg| Error::Parse { line, msg })?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(Error::Parse { line, msg: format!("vertex out of range 1..={n}") });
        }
        if u == v {
            return Err(Error::Parse { line, msg: format!("self-loop at vertex {u}") });
        }
        if g.adjacent(u - 1, v - 1) {
            return Err(Error::Parse { line, msg: format!("duplicate edge {{{u}, {v}}}") });
        }
        g.add_edge_unchecked(u - 1, v - 1);
        seen += 1;
    }
    if seen != m {
        return Err(Error::Parse { line: hline, msg: format!("header announces {m} edges, found {seen}") });
    }
    Ok(g)
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let mut it = s.split_whitespace();
    let a = it.next().ok_or("expected two integers")?;
    let b = it.next().ok_or("expected two integers")?;
    if it.next().is_some() {
        return Err("trailing tokens".into());
    }
    let a = a.parse().map_err(|_| format!("not an integer: {a:?}"))?;
    let b = b.parse().map_err(|_| format!("not an integer: {b:?}"))?;
    Ok((a, b))
}

/// Canonical edge-list text: edges sorted, `u < v`, 1-based.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}
