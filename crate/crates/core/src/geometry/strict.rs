//! Consistency of `a_t'd = 1 (t ∈ D), a_t'd < 1 (t ∈ T∖D)`.

use super::linalg::least_squares;
use super::lp::{solve_lp, LpProblem, LpStatus};
use crate::error::Result;
use crate::system::{FiniteSystem, IndexSubset};

/// A vector `d` solving the strict system, or `None` when it is inconsistent.
///
/// Strictness means an LP slack larger than `tol_strict`.
pub fn strict_system_witness(
    sys: &FiniteSystem,
    tx: &IndexSubset,
    d: &IndexSubset,
    tol_strict: f64,
) -> Result<Option<Vec<f64>>> {
    debug_assert!(d.is_subset_of(tx));
    let n = sys.dim();
    let rest: Vec<usize> = tx.indices().iter().copied().filter(|&i| !d.contains(i)).collect();

    if rest.is_empty() {
        if d.is_empty() {
            return Ok(Some(vec![0.0; n]));
        }
        let block: Vec<Vec<f64>> = d.indices().iter().map(|&i| sys.row(i).to_vec()).collect();
        let (y, res) = least_squares(&block, n, &vec![1.0; d.len()]);
        return Ok((res < tol_strict).then_some(y));
    }

    Ok(match slack_lp(sys, tx, d)? {
        Some((s, w)) if s > tol_strict => Some(w),
        _ => None,
    })
}

/// The optimal slack `s` of the strict-system LP, `None` when the equality block is inconsistent.
pub fn strict_system_slack(sys: &FiniteSystem, tx: &IndexSubset, d: &IndexSubset) -> Result<Option<f64>> {
    Ok(slack_lp(sys, tx, d)?.map(|(s, _)| s))
}

/// `max s  s.t.  a_t'd = 1 (t ∈ D),  a_t'd + s ≤ 1 (t ∈ T∖D),  s ≤ 1`.
fn slack_lp(sys: &FiniteSystem, tx: &IndexSubset, d: &IndexSubset) -> Result<Option<(f64, Vec<f64>)>> {
    let n = sys.dim();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LpProblem::new(n + 1).maximize(obj).upper_bound(n, 1.0);
    for &i in d.indices() {
        let mut row = sys.row(i).to_vec();
        row.push(0.0);
        lp = lp.eq(row, 1.0);
    }
    for &i in tx.indices().iter().filter(|&&i| !d.contains(i)) {
        let mut row = sys.row(i).to_vec();
        row.push(1.0);
        lp = lp.le(row, 1.0);
    }
    let sol = solve_lp(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => Some((sol.value, sol.point[..n].to_vec())),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormKind;
    use crate::system::dot;

    fn active_rows() -> FiniteSystem {
        // zero row, x1 ≤ 1, −x1 − x2 ≤ 1
        FiniteSystem::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![-1.0, -1.0]], NormKind::L2).unwrap()
    }

    #[test]
    fn both_nonzero_gradients() {
        let sys = active_rows();
        let tx = IndexSubset::new(vec![0, 1, 2]);
        let d = strict_system_witness(&sys, &tx, &IndexSubset::new(vec![1, 2]), 1e-8)
            .unwrap()
            .unwrap();
        assert!((dot(sys.row(1), &d) - 1.0).abs() < 1e-8);
        assert!((dot(sys.row(2), &d) - 1.0).abs() < 1e-8);
        assert!((d[0] - 1.0).abs() < 1e-8 && (d[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn zero_row_cannot_be_in_d() {
        let sys = active_rows();
        let tx = IndexSubset::new(vec![0, 1, 2]);
        assert!(strict_system_witness(&sys, &tx, &IndexSubset::new(vec![0]), 1e-8)
            .unwrap()
            .is_none());
    }

    #[test]
    fn vacuous_system() {
        let sys = active_rows();
        let w = strict_system_witness(&sys, &IndexSubset::empty(), &IndexSubset::empty(), 1e-8);
        assert_eq!(w.unwrap(), Some(vec![0.0, 0.0]));
    }

    #[test]
    fn witness_respects_strict_margin() {
        let sys = active_rows();
        let tx = IndexSubset::new(vec![0, 1, 2]);
        for d in [vec![1], vec![2]] {
            let dd = IndexSubset::new(d);
            let w = strict_system_witness(&sys, &tx, &dd, 1e-8).unwrap().unwrap();
            for &i in tx.indices() {
                let v = dot(sys.row(i), &w);
                if dd.contains(i) {
                    assert!((v - 1.0).abs() < 1e-8);
                } else {
                    assert!(v <= 1.0 - 0.5e-8);
                }
            }
        }
    }

    #[test]
    fn equality_block_only() {
        let sys = active_rows();
        let tx = IndexSubset::new(vec![1, 2]);
        assert!(strict_system_witness(&sys, &tx, &tx, 1e-8).unwrap().is_some());
        let tx0 = IndexSubset::new(vec![0]);
        assert!(strict_system_witness(&sys, &tx0, &tx0, 1e-8).unwrap().is_none());
    }
}
