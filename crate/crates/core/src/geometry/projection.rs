//! Distance from a point to `{z : a_t'z ≤ b_t}`.

use nalgebra::{DMatrix, DVector};

use super::lp::{solve_lp, LpProblem, LpStatus};
use crate::error::{Error, Result};
use crate::modulus::ModulusValue;
use crate::norm::NormKind;
use crate::system::{dot, residual, FiniteSystem, Rhs};

const FEAS_TOL: f64 = 1e-9;

/// A feasible point of `F(b)`, or `None` if it is empty.
pub fn feasible_point(sys: &FiniteSystem, b: &Rhs) -> Result<Option<Vec<f64>>> {
    let n = sys.dim();
    let mut lp = LpProblem::new(n);
    for (i, row) in sys.rows().iter().enumerate() {
        lp = lp.le(row.a.clone(), b[i]);
    }
    let sol = solve_lp(&lp)?;
    Ok(match sol.status {
        LpStatus::Infeasible => None,
        _ => Some(sol.point),
    })
}

/// Reusable projector onto a fixed polyhedron. Caches a feasible start.
#[derive(Debug, Clone)]
pub struct PolyhedronProjector<'a> {
    sys: &'a FiniteSystem,
    b: &'a Rhs,
    start: Option<Vec<f64>>,
}

impl<'a> PolyhedronProjector<'a> {
    pub fn new(sys: &'a FiniteSystem, b: &'a Rhs) -> Result<Self> {
        if b.len() != sys.len() {
            return Err(Error::DimensionMismatch {
                expected: sys.len(),
                found: b.len(),
            });
        }
        let start = feasible_point(sys, b)?;
        Ok(PolyhedronProjector { sys, b, start })
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_none()
    }

    /// `(d(x, F(b)), nearest point)` in the system norm.
    pub fn project(&self, x: &[f64]) -> Result<(ModulusValue, Vec<f64>)> {
        let Some(start) = &self.start else {
            return Ok((ModulusValue::Infinite, Vec::new()));
        };
        if residual(self.sys, self.b, x)? <= 0.0 {
            return Ok((ModulusValue::ZERO, x.to_vec()));
        }
        let z = match self.sys.norm() {
            NormKind::L2 => self.project_l2(x, start)?,
            norm => self.project_lp(x, norm)?,
        };
        Ok((ModulusValue::finite(self.sys.norm().distance(x, &z)), z))
    }

    fn scale(&self, x: &[f64]) -> f64 {
        1.0_f64.max(self.b.sup_norm()).max(NormKind::LInf.norm(x))
    }

    /// Dual active-set method for `min ½‖z − x‖²`: start from `x`, add the most
    /// violated constraint and keep stationarity `z − x + Σ μ_i a_i = 0` with
    /// `μ ≥ 0` along the way. The working set stays linearly independent, so
    /// degenerate vertices cannot make it cycle.
    fn project_l2(&self, x: &[f64], _start: &[f64]) -> Result<Vec<f64>> {
        let sys = self.sys;
        let m = sys.len();
        let n = sys.dim();
        let tol = FEAS_TOL * self.scale(x);
        let mut z = x.to_vec();
        let mut work: Vec<usize> = Vec::new();
        let mut mu: Vec<f64> = Vec::new();
        let max_iter = 50 * (m + n) + 1000;

        let mut iter = 0;
        loop {
            let worst = (0..m)
                .filter(|&i| !work.contains(&i))
                .map(|i| {
                    (
                        i,
                        (dot(sys.row(i), &z) - self.b[i]) / NormKind::L2.norm(sys.row(i)).max(f64::MIN_POSITIVE),
                    )
                })
                .filter(|&(_, v)| v > tol)
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
            let Some((p, _)) = worst else {
                return self.verify_kkt(x, z, &work, &mu, tol);
            };
            let ap = sys.row(p);
            let mut u_p = 0.0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NumericalFailure("active-set projection did not converge".into()));
                }
                let r = working_coordinates(sys, &work, ap)?;
                let mut step_dir = ap.to_vec();
                for (k, &i) in work.iter().enumerate() {
                    for (s, a) in step_dir.iter_mut().zip(sys.row(i)) {
                        *s -= r[k] * a;
                    }
                }
                let dir_sq = dot(&step_dir, &step_dir);
                let dependent = dir_sq.sqrt() <= 1e-12 * NormKind::L2.norm(ap);
                // largest dual step keeping every working multiplier nonnegative
                let blocking = (0..work.len())
                    .filter(|&k| r[k] > 1e-14)
                    .map(|k| (k, mu[k] / r[k]))
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                let full = if dependent {
                    f64::INFINITY
                } else {
                    (dot(ap, &z) - self.b[p]) / dir_sq
                };
                let t = match blocking {
                    Some((_, t1)) if t1 < full => t1,
                    _ if full.is_finite() => full,
                    _ => return Err(Error::NumericalFailure("projection onto an empty polyhedron".into())),
                };
                if !dependent {
                    for (zi, s) in z.iter_mut().zip(&step_dir) {
                        *zi -= t * s;
                    }
                }
                for (k, rk) in r.iter().enumerate() {
                    mu[k] = (mu[k] - t * rk).max(0.0);
                }
                u_p += t;
                match blocking {
                    Some((k, t1)) if t1 < full => {
                        work.remove(k);
                        mu.remove(k);
                    }
                    _ => {
                        work.push(p);
                        mu.push(u_p);
                        break;
                    }
                }
            }
        }
    }

    fn verify_kkt(&self, x: &[f64], z: Vec<f64>, work: &[usize], mu: &[f64], tol: f64) -> Result<Vec<f64>> {
        let viol = residual(self.sys, self.b, &z)?;
        if viol > tol {
            return Err(Error::NumericalFailure(format!("projection infeasible by {viol:e}")));
        }
        // stationarity: z − x + Σ μ_i a_i = 0
        let mut g: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
        for (k, &i) in work.iter().enumerate() {
            for (gj, aj) in g.iter_mut().zip(self.sys.row(i)) {
                *gj += mu[k] * aj;
            }
        }
        if NormKind::L2.norm(&g) > 1e-7 * self.scale(x) {
            return Err(Error::NumericalFailure("projection KKT check failed".into()));
        }
        Ok(z)
    }

    fn project_lp(&self, x: &[f64], norm: NormKind) -> Result<Vec<f64>> {
        let sys = self.sys;
        let n = sys.dim();
        // variables: z (n), then u (n) for L1 or t (1) for L∞
        let extra = if norm == NormKind::L1 { n } else { 1 };
        let nv = n + extra;
        let mut c = vec![0.0; nv];
        c[n..].iter_mut().for_each(|v| *v = -1.0);
        let mut lp = LpProblem::new(nv).maximize(c).nonnegative(n..nv);
        for (i, row) in sys.rows().iter().enumerate() {
            let mut r = row.a.clone();
            r.resize(nv, 0.0);
            lp = lp.le(r, self.b[i]);
        }
        for j in 0..n {
            let bound = if norm == NormKind::L1 { n + j } else { n };
            let mut pos = vec![0.0; nv];
            pos[j] = 1.0;
            pos[bound] = -1.0;
            let mut neg = vec![0.0; nv];
            neg[j] = -1.0;
            neg[bound] = -1.0;
            lp = lp.le(pos, x[j]).le(neg, -x[j]);
        }
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::NumericalFailure(format!(
                "projection LP ended with status {:?}",
                sol.status
            )));
        }
        Ok(sol.point[..n].to_vec())
    }
}

/// Coefficients of the least-squares expansion of `v` in the working rows.
fn working_coordinates(sys: &FiniteSystem, work: &[usize], v: &[f64]) -> Result<Vec<f64>> {
    if work.is_empty() {
        return Ok(Vec::new());
    }
    let k = work.len();
    let n = sys.dim();
    let a = DMatrix::from_fn(k, n, |r, c| sys.row(work[r])[c]);
    let gram = &a * a.transpose();
    let rhs = &a * DVector::from_column_slice(v);
    gram.clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .or_else(|| gram.lu().solve(&rhs))
        .map(|r| r.iter().copied().collect())
        .ok_or_else(|| Error::NumericalFailure("singular working set".into()))
}

/// `(d(x, F(b)), nearest point)`; `+∞` when `F(b) = ∅`.
pub fn project_to_polyhedron(sys: &FiniteSystem, b: &Rhs, x: &[f64]) -> Result<(ModulusValue, Vec<f64>)> {
    PolyhedronProjector::new(sys, b)?.project(x)
}
