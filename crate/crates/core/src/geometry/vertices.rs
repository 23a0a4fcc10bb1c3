//! Extreme points of `F(b) ∩ span{a_t}`.

use super::linalg::{rowspace_of, solve_square};
use super::projection::feasible_point;
use super::subsets::{binomial, check_cap, fold_independent};
use crate::error::{Error, Result};
use crate::norm::NormKind;
use crate::system::{dot, FiniteSystem, Rhs};

const DEDUP_TOL: f64 = 1e-7;
const FEAS_TOL: f64 = 1e-9;

/// The finite set of extreme points of `F(b)` intersected with the row space.
///
/// Coordinates are reduced to an orthonormal row-space basis `Q`, where the
/// polyhedron is pointed; every `r`-subset with an invertible reduced block
/// gives a candidate basic solution.
pub fn enumerate_vertices(sys: &FiniteSystem, b: &Rhs, tol_rank: f64, cap: u128) -> Result<Vec<Vec<f64>>> {
    if b.len() != sys.len() {
        return Err(Error::DimensionMismatch {
            expected: sys.len(),
            found: b.len(),
        });
    }
    if feasible_point(sys, b)?.is_none() {
        return Err(Error::Infeasible);
    }
    let n = sys.dim();
    let rows: Vec<Vec<f64>> = sys.rows().iter().map(|r| r.a.clone()).collect();
    let (r, q) = rowspace_of(&rows, n, tol_rank);
    if r == 0 {
        return Ok(vec![vec![0.0; n]]);
    }
    check_cap(binomial(rows.len(), r), cap)?;

    // reduced rows c_t = Q'a_t
    let reduced: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| (0..r).map(|c| (0..n).map(|j| q[(j, c)] * a[j]).sum()).collect())
        .collect();
    let scale = 1.0_f64.max(b.sup_norm());

    let groups = fold_independent(&reduced, r, r, tol_rank, Vec::new, |mut acc, j| {
        let block: Vec<Vec<f64>> = j.iter().map(|&i| reduced[i].clone()).collect();
        let rhs: Vec<f64> = j.iter().map(|&i| b[i]).collect();
        if let Some(y) = solve_square(&block, &rhs) {
            let tol = FEAS_TOL * scale.max(NormKind::LInf.norm(&y));
            if reduced.iter().zip(b.values()).all(|(c, bt)| dot(c, &y) - bt <= tol) {
                acc.push(y);
            }
        }
        acc
    });

    let mut unique: Vec<Vec<f64>> = Vec::new();
    for y in groups.into_iter().flatten() {
        let tol = DEDUP_TOL * 1.0_f64.max(NormKind::L2.norm(&y));
        if !unique.iter().any(|u| NormKind::L2.distance(u, &y) < tol) {
            unique.push(y);
        }
    }
    Ok(unique
        .into_iter()
        .map(|y| (0..n).map(|j| (0..r).map(|c| q[(j, c)] * y[c]).sum()).collect())
        .collect())
}
