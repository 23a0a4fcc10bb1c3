//! Rank, row space and small dense solves.

use nalgebra::{DMatrix, DVector};

use crate::system::FiniteSystem;

pub(crate) fn row_matrix(rows: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j])
}

/// Numerical rank and an orthonormal basis (`n × r`) of `span{a_t}`.
pub fn rank_and_rowspace(sys: &FiniteSystem, tol_rank: f64) -> (usize, DMatrix<f64>) {
    let rows: Vec<Vec<f64>> = sys.rows().iter().map(|r| r.a.clone()).collect();
    rowspace_of(&rows, sys.dim(), tol_rank)
}

pub(crate) fn rowspace_of(rows: &[Vec<f64>], n: usize, tol_rank: f64) -> (usize, DMatrix<f64>) {
    if rows.is_empty() {
        return (0, DMatrix::zeros(n, 0));
    }
    let a = row_matrix(rows, n);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V'");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return (0, DMatrix::zeros(n, 0));
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > tol_rank * smax)
        .collect();
    let mut basis = DMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        for j in 0..n {
            basis[(j, c)] = v_t[(k, j)];
        }
    }
    (keep.len(), basis)
}

/// Largest singular value of the row matrix.
pub(crate) fn spectral_norm(rows: &[Vec<f64>], n: usize) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    row_matrix(rows, n)
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Solves the square system `M y = rhs`, `None` when singular.
pub(crate) fn solve_square(m: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = m.len();
    let mat = row_matrix(m, k);
    let v = DVector::from_column_slice(rhs);
    mat.lu()
        .solve(&v)
        .filter(|y| y.iter().all(|x| x.is_finite()))
        .map(|y| y.iter().copied().collect())
}

/// Least-squares solution of `M y = rhs` and its residual norm.
pub(crate) fn least_squares(m: &[Vec<f64>], n: usize, rhs: &[f64]) -> (Vec<f64>, f64) {
    let mat = row_matrix(m, n);
    let v = DVector::from_column_slice(rhs);
    let svd = mat.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let y = svd
        .solve(&v, 1e-12 * smax.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DVector::zeros(n));
    let res = (&mat * &y - v).norm();
    (y.iter().copied().collect(), res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormKind;

    fn sys(rows: Vec<Vec<f64>>) -> FiniteSystem {
        FiniteSystem::from_rows(rows, NormKind::L2).unwrap()
    }

    #[test]
    fn box_has_full_rank() {
        let s = sys(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]);
        assert_eq!(rank_and_rowspace(&s, 1e-10).0, 2);
    }

    #[test]
    fn collinear_rows_span_one_axis() {
        let s = sys(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]);
        let (r, q) = rank_and_rowspace(&s, 1e-10);
        assert_eq!(r, 1);
        assert!((q[(0, 0)].abs() - 1.0).abs() < 1e-12);
        assert!(q[(1, 0)].abs() < 1e-12);
    }

    #[test]
    fn zero_rows_have_rank_zero() {
        let s = sys(vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        let (r, q) = rank_and_rowspace(&s, 1e-10);
        assert_eq!(r, 0);
        assert_eq!(q.ncols(), 0);
    }

    #[test]
    fn square_and_least_squares_solves() {
        let y = solve_square(&[vec![2.0, 0.0], vec![0.0, 4.0]], &[2.0, 2.0]).unwrap();
        assert_eq!(y, vec![1.0, 0.5]);
        assert!(solve_square(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 2.0]).is_none());
        let (_, res) = least_squares(&[vec![0.0, 0.0]], 2, &[1.0]);
        assert!((res - 1.0).abs() < 1e-12);
    }
}
