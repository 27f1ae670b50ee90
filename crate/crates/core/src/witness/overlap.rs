use serde::Serialize;

use super::KTuple;
use crate::error::{Error, Result};

/// Intersection statistics of two tuples `X` and `Y`.
///
/// `rij[i][j] = |Y_i ∩ X_j|`. Row sums are `r_1..r_3` (`|Y_i ∩ X|`), column
/// sums are `r_4..r_6` (`|X_j ∩ Y|`) and `r` is the grand total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OverlapPattern {
    r: u32,
    #[serde(rename = "r_i")]
    r_values: [u32; 6],
    rij: [[u32; 3]; 3],
}

impl OverlapPattern {
    pub fn from_matrix(rij: [[u32; 3]; 3]) -> Self {
        let rows = rij.map(|row| row.iter().sum::<u32>());
        let cols = [0, 1, 2].map(|j| rij.iter().map(|row| row[j]).sum::<u32>());
        OverlapPattern {
            r: rows.iter().sum(),
            r_values: [rows[0], rows[1], rows[2], cols[0], cols[1], cols[2]],
            rij,
        }
    }

    pub fn zero() -> Self {
        Self::from_matrix([[0; 3]; 3])
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `r_1..r_6` as a 0-based array.
    pub fn r_values(&self) -> [u32; 6] {
        self.r_values
    }

    pub fn row_sums(&self) -> [u32; 3] {
        [self.r_values[0], self.r_values[1], self.r_values[2]]
    }

    pub fn col_sums(&self) -> [u32; 3] {
        [self.r_values[3], self.r_values[4], self.r_values[5]]
    }

    pub fn rij(&self) -> [[u32; 3]; 3] {
        self.rij
    }

    /// Whether the pattern can arise from two tuples whose sets all have size `k`.
    pub fn fits(&self, k: u32) -> bool {
        self.r_values.iter().all(|&s| s <= k)
    }

    pub(crate) fn check_fits(&self, k: u32) -> Result<()> {
        if self.fits(k) {
            Ok(())
        } else {
            Err(Error::invalid(format!("overlap pattern {:?} cannot come from two {k}-tuples", self.rij)))
        }
    }

    /// A row `s` with `r_s > k − r0` whose entries all stay below `k − 6·r0`:
    /// one set of `Y` mostly inside `X` but split across several `X_j`.
    pub fn concentrated_row(&self, k: u32, r0: u32) -> Option<usize> {
        let (k, r0) = (k as i64, r0 as i64);
        (0..3).find(|&s| {
            self.r_values[s] as i64 > k - r0 && self.rij[s].iter().all(|&e| (e as i64) < k - 6 * r0)
        })
    }

    /// Concrete sets realizing this pattern with all sets of size `k`.
    ///
    /// Shared vertices come first (cell by cell, row-major), then the
    /// private parts of `X1..X3`, then those of `Y1..Y3`. Each distinguished
    /// vertex is the smallest member of its set.
    pub fn realize(&self, k: u32) -> Result<Realization> {
        self.check_fits(k)?;
        let k = k as usize;
        let mut next = 0usize;
        let mut take = |count: usize| {
            let out: Vec<usize> = (next..next + count).collect();
            next += count;
            out
        };
        let mut x: [Vec<usize>; 3] = Default::default();
        let mut y: [Vec<usize>; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                let shared = take(self.rij[i][j] as usize);
                y[i].extend(&shared);
                x[j].extend(&shared);
            }
        }
        let cols = self.col_sums();
        let rows = self.row_sums();
        for j in 0..3 {
            x[j].extend(take(k - cols[j] as usize));
        }
        for i in 0..3 {
            y[i].extend(take(k - rows[i] as usize));
        }
        let reps = |sets: &[Vec<usize>; 3]| [0, 1, 2].map(|i| *sets[i].iter().min().expect("k >= 1"));
        let (xr, yr) = (reps(&x), reps(&y));
        Ok(Realization { n: next, x: KTuple::new(x, xr)?, y: KTuple::new(y, yr)? })
    }
}

/// Two tuples over vertices `0..n` built from an overlap pattern.
#[derive(Clone, Debug)]
pub struct Realization {
    pub n: usize,
    pub x: KTuple,
    pub y: KTuple,
}

/// Overlap pattern of `y` relative to `x`: entry `(i, j)` is `|Y_i ∩ X_j|`.
pub fn overlap(x: &KTuple, y: &KTuple) -> OverlapPattern {
    let mut rij = [[0u32; 3]; 3];
    for (i, row) in rij.iter_mut().enumerate() {
        for &v in y.set(i) {
            if let Some(j) = x.role_of(v) {
                row[j] += 1;
            }
        }
    }
    OverlapPattern::from_matrix(rij)
}

/// Number of vertex pairs lying in two different sets of `Y` but not in two
/// different sets of `X`, for two `k`-tuples with the given pattern:
/// `3k² − ½ Σ_{i,j} r_ij Σ_{i'≠i, j'≠j} r_i'j'`.
pub fn cross_pair_count(pattern: &OverlapPattern, k: u32) -> Result<i64> {
    pattern.check_fits(k)?;
    let rij = pattern.rij();
    let mut doubled = 0i64;
    for i in 0..3 {
        for j in 0..3 {
            let mut others = 0i64;
            for (ii, row) in rij.iter().enumerate() {
                for (jj, &e) in row.iter().enumerate() {
                    if ii != i && jj != j {
                        others += e as i64;
                    }
                }
            }
            doubled += rij[i][j] as i64 * others;
        }
    }
    let k = k as i64;
    Ok(3 * k * k - doubled / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(s: &str) -> KTuple {
        s.parse().unwrap()
    }

    #[test]
    fn self_overlap_is_diagonal() {
        let t = tuple("X1=1,2;x1=1;X2=3;x2=3;X3=4,5,6;x3=4");
        let p = overlap(&t, &t);
        assert_eq!(p.r(), 6);
        assert_eq!(p.rij(), [[2, 0, 0], [0, 1, 0], [0, 0, 3]]);
    }

    #[test]
    fn disjoint_tuples_have_zero_overlap() {
        let a = tuple("X1=1;x1=1;X2=2;x2=2;X3=3;x3=3");
        let b = tuple("X1=4;x1=4;X2=5;x2=5;X3=6;x3=6");
        assert_eq!(overlap(&a, &b), OverlapPattern::zero());
    }

    #[test]
    fn cross_pairs_extremes() {
        for k in 1..10u32 {
            let kk = 3 * (k as i64).pow(2);
            assert_eq!(cross_pair_count(&OverlapPattern::zero(), k).unwrap(), kk);
            let same = OverlapPattern::from_matrix([[k, 0, 0], [0, k, 0], [0, 0, k]]);
            assert_eq!(cross_pair_count(&same, k).unwrap(), 0);
        }
    }

    #[test]
    fn inconsistent_pattern_rejected() {
        let p = OverlapPattern::from_matrix([[2, 2, 0], [0, 0, 0], [0, 0, 0]]);
        assert!(cross_pair_count(&p, 3).is_err());
        assert!(p.realize(3).is_err());
    }

    #[test]
    fn realization_reproduces_pattern() {
        let p = OverlapPattern::from_matrix([[1, 2, 0], [0, 0, 3], [1, 0, 1]]);
        let real = p.realize(4).unwrap();
        assert_eq!(overlap(&real.x, &real.y), p);
        assert_eq!(real.x.sizes(), [4; 3]);
        assert_eq!(real.y.sizes(), [4; 3]);
    }

    #[test]
    fn concentrated_row_detection() {
        // k = 200, r0 = 6: row needs sum > 194 and every entry < 164.
        let p = OverlapPattern::from_matrix([[100, 95, 0], [0, 0, 0], [0, 0, 0]]);
        assert_eq!(p.concentrated_row(200, 6), Some(0));
        let q = OverlapPattern::from_matrix([[190, 5, 0], [0, 0, 0], [0, 0, 0]]);
        assert_eq!(q.concentrated_row(200, 6), None);
    }
}
