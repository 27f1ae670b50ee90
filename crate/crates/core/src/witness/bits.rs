use crate::graph::{Graph, VertexSet};

/// Set operations needed by the tuple search. `u64` serves graphs with at
/// most 64 vertices; wider graphs fall back to `VertexSet`.
pub(crate) trait Bits: Clone {
    fn empty(n: usize) -> Self;
    fn insert(&mut self, v: usize);
    fn remove(&mut self, v: usize);
    fn contains(&self, v: usize) -> bool;
    fn intersects(&self, other: &Self) -> bool;
    fn union_with(&mut self, other: &Self);
    fn minus(&self, other: &Self) -> Self;
    fn is_empty(&self) -> bool;
    fn count(&self) -> usize;
    fn members(&self) -> Vec<usize>;
}

impl Bits for u64 {
    #[inline]
    fn empty(_: usize) -> Self {
        0
    }
    #[inline]
    fn insert(&mut self, v: usize) {
        *self |= 1 << v;
    }
    #[inline]
    fn remove(&mut self, v: usize) {
        *self &= !(1 << v);
    }
    #[inline]
    fn contains(&self, v: usize) -> bool {
        *self >> v & 1 == 1
    }
    #[inline]
    fn intersects(&self, other: &Self) -> bool {
        self & other != 0
    }
    #[inline]
    fn union_with(&mut self, other: &Self) {
        *self |= other;
    }
    #[inline]
    fn minus(&self, other: &Self) -> Self {
        self & !other
    }
    #[inline]
    fn is_empty(&self) -> bool {
        *self == 0
    }
    #[inline]
    fn count(&self) -> usize {
        self.count_ones() as usize
    }
    fn members(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count());
        let mut w = *self;
        while w != 0 {
            out.push(w.trailing_zeros() as usize);
            w &= w - 1;
        }
        out
    }
}

impl Bits for VertexSet {
    fn empty(n: usize) -> Self {
        VertexSet::empty(n)
    }
    fn insert(&mut self, v: usize) {
        VertexSet::insert(self, v);
    }
    fn remove(&mut self, v: usize) {
        VertexSet::remove(self, v);
    }
    fn contains(&self, v: usize) -> bool {
        VertexSet::contains(self, v)
    }
    fn intersects(&self, other: &Self) -> bool {
        VertexSet::intersects(self, other)
    }
    fn union_with(&mut self, other: &Self) {
        VertexSet::union_with(self, other);
    }
    fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }
    fn is_empty(&self) -> bool {
        VertexSet::is_empty(self)
    }
    fn count(&self) -> usize {
        self.len()
    }
    fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub(crate) fn rows_u64(g: &Graph) -> Vec<u64> {
    debug_assert!(g.n() <= 64);
    (0..g.n()).map(|v| g.neighbors(v).words().first().copied().unwrap_or(0)).collect()
}

pub(crate) fn rows_wide(g: &Graph) -> Vec<VertexSet> {
    (0..g.n()).map(|v| g.neighbors(v).clone()).collect()
}
