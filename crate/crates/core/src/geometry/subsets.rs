//! Lexicographic enumeration of linearly independent row subsets.
//!
//! A depth-first walk over combinations keeps an orthonormal basis of the
//! rows chosen so far, so independence of each extension costs one
//! projection. The walk is split by first index across threads and the
//! per-branch results are returned in order.

use rayon::prelude::*;

use super::linalg::{rowspace_of, spectral_norm};
use crate::error::{Error, Result};
use crate::system::{dot, FiniteSystem, IndexSubset};

/// `C(m, r)`, saturating at `u128::MAX`.
pub fn binomial(m: usize, r: usize) -> u128 {
    if r > m {
        return 0;
    }
    let r = r.min(m - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = match acc.checked_mul((m - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub(crate) fn check_cap(count: u128, cap: u128) -> Result<()> {
    if count > cap {
        Err(Error::SizeLimit { count, cap })
    } else {
        Ok(())
    }
}

struct Walker<'a> {
    rows: &'a [Vec<f64>],
    r: usize,
    tol: f64,
}

impl Walker<'_> {
    /// Orthogonalizes `v` against `basis` (two passes), returning the residual.
    fn residual(&self, basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        let mut res = v.to_vec();
        for _ in 0..2 {
            for q in basis {
                let c = dot(q, &res);
                for (x, qi) in res.iter_mut().zip(q) {
                    *x -= c * qi;
                }
            }
        }
        res
    }

    fn walk<A>(
        &self,
        chosen: &mut Vec<usize>,
        basis: &mut Vec<Vec<f64>>,
        acc: A,
        step: &(impl Fn(A, &[usize]) -> A + Sync),
    ) -> A {
        if chosen.len() == self.r {
            return step(acc, chosen);
        }
        let m = self.rows.len();
        let start = chosen.last().map_or(0, |&i| i + 1);
        let last = m - (self.r - chosen.len());
        let mut acc = acc;
        for j in start..=last {
            let res = self.residual(basis, &self.rows[j]);
            let norm = dot(&res, &res).sqrt();
            if norm <= self.tol {
                continue;
            }
            chosen.push(j);
            basis.push(res.into_iter().map(|x| x / norm).collect());
            acc = self.walk(chosen, basis, acc, step);
            chosen.pop();
            basis.pop();
        }
        acc
    }
}

/// Folds `step` over every independent `r`-subset of `rows`, one accumulator
/// per first index, returned in lexicographic order.
pub(crate) fn fold_independent<A, I, S>(
    rows: &[Vec<f64>],
    n: usize,
    r: usize,
    tol_rank: f64,
    init: I,
    step: S,
) -> Vec<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(A, &[usize]) -> A + Sync,
{
    if r == 0 {
        return vec![step(init(), &[])];
    }
    let walker = Walker {
        rows,
        r,
        tol: tol_rank * spectral_norm(rows, n),
    };
    let m = rows.len();
    if r > m {
        return Vec::new();
    }
    (0..=m - r)
        .into_par_iter()
        .map(|i| {
            let norm = dot(&rows[i], &rows[i]).sqrt();
            if norm <= walker.tol {
                return init();
            }
            let mut chosen = vec![i];
            let mut basis = vec![rows[i].iter().map(|x| x / norm).collect()];
            walker.walk(&mut chosen, &mut basis, init(), &step)
        })
        .collect()
}

/// All `J` with `|J| = rank A` and `{a_t, t ∈ J}` linearly independent.
pub fn enumerate_independent_subsets(sys: &FiniteSystem, tol_rank: f64, cap: u128) -> Result<Vec<IndexSubset>> {
    let rows: Vec<Vec<f64>> = sys.rows().iter().map(|r| r.a.clone()).collect();
    let (r, _) = rowspace_of(&rows, sys.dim(), tol_rank);
    check_cap(binomial(rows.len(), r), cap)?;
    let groups = fold_independent(&rows, sys.dim(), r, tol_rank, Vec::new, |mut acc, j| {
        acc.push(IndexSubset::new(j.to_vec()));
        acc
    });
    Ok(groups.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormKind;

    fn subsets(rows: Vec<Vec<f64>>) -> Vec<Vec<usize>> {
        let sys = FiniteSystem::from_rows(rows, NormKind::L2).unwrap();
        enumerate_independent_subsets(&sys, 1e-10, 10_000_000)
            .unwrap()
            .into_iter()
            .map(|s| s.indices().to_vec())
            .collect()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(3145, 2), 4_943_940);
    }

    #[test]
    fn box_pairs() {
        // oracle: all 6 pairs, keep those with nonzero determinant
        let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let mut oracle = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let det: f64 = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0];
                if det.abs() > 0.0 {
                    oracle.push(vec![i, j]);
                }
            }
        }
        assert_eq!(oracle.len(), 4);
        assert_eq!(subsets(rows), oracle);
    }

    #[test]
    fn rank_one_cases() {
        assert_eq!(subsets(vec![vec![1.0]]), vec![vec![0]]);
        assert_eq!(subsets(vec![vec![1.0, 0.0], vec![2.0, 0.0]]), vec![vec![0], vec![1]]);
    }

    #[test]
    fn zero_rows_are_skipped() {
        assert_eq!(
            subsets(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]),
            vec![vec![1, 2]]
        );
        assert_eq!(subsets(vec![vec![0.0, 0.0]]), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn cap_is_enforced() {
        let sys = FiniteSystem::from_rows(
            (0..30).map(|i| vec![1.0, i as f64, (i * i) as f64]).collect(),
            NormKind::L2,
        )
        .unwrap();
        assert!(matches!(
            enumerate_independent_subsets(&sys, 1e-10, 100),
            Err(Error::SizeLimit { count: 4060, cap: 100 })
        ));
    }
}
