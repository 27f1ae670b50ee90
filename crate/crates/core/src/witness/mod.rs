//! The special-tuple property: a tuple `(X1,x1,X2,x2,X3,x3)` of disjoint
//! vertex sets with distinguished members such that every vertex outside
//! `X1 ∪ X2 ∪ X3` has a neighbor in each `Xi`, and the only edges between
//! two different sets are the three edges `xi ~ xj`.

mod bits;
mod overlap;
mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub use overlap::{cross_pair_count, overlap, OverlapPattern, Realization};
pub use search::{
    count_profile, count_special, enumeration_size, exists_special, CountProfile, Existence, SearchBudget,
    SearchMode, COUNT_ENUMERATION_LIMIT, PROFILE_MAX_N,
};
pub(crate) use search::count_special_with;

/// Three disjoint vertex sets with one distinguished member each.
///
/// Vertices are 0-based; the `Display`/`FromStr` syntax is 1-based:
/// `X1=1,2;x1=1;X2=3;x2=3;X3=4;x3=4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KTuple {
    sets: [Vec<usize>; 3],
    reps: [usize; 3],
}

impl KTuple {
    /// Validates disjointness, non-emptiness and `reps[i] ∈ sets[i]`.
    /// Sets are stored sorted; repeated vertices inside one set are an error.
    pub fn new(sets: [Vec<usize>; 3], reps: [usize; 3]) -> Result<Self> {
        let mut sets = sets;
        for (i, s) in sets.iter_mut().enumerate() {
            if s.is_empty() {
                return Err(Error::invalid(format!("X{} is empty", i + 1)));
            }
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("X{} lists a vertex twice", i + 1)));
            }
            if s.binary_search(&reps[i]).is_err() {
                return Err(Error::invalid(format!("x{} is not a member of X{}", i + 1, i + 1)));
            }
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if sets[i].iter().any(|v| sets[j].binary_search(v).is_ok()) {
                    return Err(Error::invalid(format!("X{} and X{} overlap", i + 1, j + 1)));
                }
            }
        }
        Ok(KTuple { sets, reps })
    }

    pub fn set(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    pub fn rep(&self, i: usize) -> usize {
        self.reps[i]
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.sets[0].len(), self.sets[1].len(), self.sets[2].len()]
    }

    pub fn max_vertex(&self) -> usize {
        self.sets.iter().flat_map(|s| s.last()).copied().max().unwrap_or(0)
    }

    /// Index of the set containing `v`, if any.
    pub fn role_of(&self, v: usize) -> Option<usize> {
        (0..3).find(|&i| self.sets[i].binary_search(&v).is_ok())
    }

    /// Same tuple with the roles of the sets permuted: set `i` of the result
    /// is set `order[i]` of `self`.
    pub fn permute_roles(&self, order: [usize; 3]) -> KTuple {
        KTuple {
            sets: order.map(|i| self.sets[i].clone()),
            reps: order.map(|i| self.reps[i]),
        }
    }

    /// Same tuple after renaming vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> KTuple {
        let sets = self.sets.clone().map(|s| {
            let mut s: Vec<usize> = s.into_iter().map(|v| perm[v]).collect();
            s.sort_unstable();
            s
        });
        KTuple { sets, reps: self.reps.map(|v| perm[v]) }
    }
}

impl fmt::Display for KTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..3 {
            if i > 0 {
                f.write_str(";")?;
            }
            let members: Vec<String> = self.sets[i].iter().map(|v| (v + 1).to_string()).collect();
            write!(f, "X{}={};x{}={}", i + 1, members.join(","), i + 1, self.reps[i] + 1)?;
        }
        Ok(())
    }
}

impl FromStr for KTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sets: [Option<Vec<usize>>; 3] = [None, None, None];
        let mut reps: [Option<usize>; 3] = [None, None, None];
        let vertex = |tok: &str| -> Result<usize> {
            match tok.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::invalid(format!("bad vertex label {tok:?} (labels are 1-based)"))),
            }
        };
        for field in s.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got {field:?}")))?;
            let key = key.trim();
            let idx = match key.get(1..) {
                Some("1") => 0,
                Some("2") => 1,
                Some("3") => 2,
                _ => return Err(Error::invalid(format!("unknown tuple key {key:?}"))),
            };
            let slot_taken = match key.as_bytes()[0] {
                b'X' => sets[idx]
                    .replace(value.split(',').map(vertex).collect::<Result<Vec<_>>>()?)
                    .is_some(),
                b'x' => reps[idx].replace(vertex(value)?).is_some(),
                _ => return Err(Error::invalid(format!("unknown tuple key {key:?}"))),
            };
            if slot_taken {
                return Err(Error::invalid(format!("tuple key {key:?} given twice")));
            }
        }
        let missing = |what: &str, i: usize| Error::invalid(format!("tuple is missing {what}{}", i + 1));
        let mut out_sets: [Vec<usize>; 3] = Default::default();
        let mut out_reps = [0; 3];
        for i in 0..3 {
            out_sets[i] = sets[i].take().ok_or_else(|| missing("X", i))?;
            out_reps[i] = reps[i].ok_or_else(|| missing("x", i))?;
        }
        KTuple::new(out_sets, out_reps)
    }
}

impl Serialize for KTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Decides whether `t` is special in `g`.
pub fn is_special(g: &Graph, t: &KTuple) -> Result<bool> {
    if t.max_vertex() >= g.n() {
        return Err(Error::invalid(format!(
            "tuple mentions vertex {} but the graph has {} vertices",
            t.max_vertex() + 1,
            g.n()
        )));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            for &u in t.set(i) {
                for &v in t.set(j) {
                    let designated = u == t.rep(i) && v == t.rep(j);
                    if g.adjacent(u, v) != designated {
                        return Ok(false);
                    }
                }
            }
        }
    }
    for v in 0..g.n() {
        if t.role_of(v).is_some() {
            continue;
        }
        let row = g.neighbors(v);
        if !(0..3).all(|i| t.set(i).iter().any(|&u| row.contains(u))) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singletons() -> KTuple {
        "X1=1;x1=1;X2=2;x2=2;X3=3;x3=3".parse().unwrap()
    }

    #[test]
    fn triangle_is_special() {
        assert!(is_special(&Graph::complete(3), &singletons()).unwrap());
    }

    #[test]
    fn missing_designated_edge() {
        let g = Graph::from_edges(3, &[(1, 2), (0, 2)]).unwrap();
        assert!(!is_special(&g, &singletons()).unwrap());
    }

    #[test]
    fn complete_graph_domination() {
        assert!(is_special(&Graph::complete(4), &singletons()).unwrap());
    }

    #[test]
    fn extra_cross_edge_breaks_property() {
        // X1 = {1, 4}; 4 ~ 2 is a second edge between X1 and X2.
        let t: KTuple = "X1=1,4;x1=1;X2=2;x2=2;X3=3;x3=3".parse().unwrap();
        let mut g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(is_special(&g, &t).unwrap());
        g.add_edge(3, 1).unwrap();
        assert!(!is_special(&g, &t).unwrap());
    }

    #[test]
    fn undominated_outside_vertex() {
        let mut g = Graph::complete(3);
        g = Graph::from_edges(4, &g.edges().chain([(3, 0), (3, 1)]).collect::<Vec<_>>()).unwrap();
        assert!(!is_special(&g, &singletons()).unwrap());
    }

    #[test]
    fn tuple_syntax_round_trip() {
        let t: KTuple = "X1=2,1;x1=1;X2=3;x2=3;X3=4,6;x3=6".parse().unwrap();
        assert_eq!(t.to_string(), "X1=1,2;x1=1;X2=3;x2=3;X3=4,6;x3=6");
        assert_eq!(t.to_string().parse::<KTuple>().unwrap(), t);
    }

    #[test]
    fn invalid_tuples() {
        for s in [
            "X1=1,2;x1=3;X2=4;x2=4;X3=5;x3=5",
            "X1=1,2;x1=1;X2=2;x2=2;X3=5;x3=5",
            "X1=1;x1=1;X2=2;x2=2",
            "X1=0;x1=0;X2=2;x2=2;X3=3;x3=3",
            "X1=1;x1=1;X2=2;x2=2;X3=3;x3=3;X1=4",
            "X1=1,1;x1=1;X2=2;x2=2;X3=3;x3=3",
            "Y1=1;x1=1;X2=2;x2=2;X3=3;x3=3",
        ] {
            assert!(s.parse::<KTuple>().is_err(), "{s}");
        }
        let t: KTuple = "X1=1;x1=1;X2=2;x2=2;X3=9;x3=9".parse().unwrap();
        assert!(is_special(&Graph::complete(4), &t).is_err());
    }
}
