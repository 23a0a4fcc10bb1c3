//! Dual-norm distance from the origin to the convex hull of a finite point set.

use nalgebra::{DMatrix, DVector};

use super::lp::{solve_lp, LpProblem, LpStatus};
use crate::error::{Error, Result};
use crate::modulus::ModulusValue;
use crate::norm::NormKind;
use crate::system::dot;

/// Relative threshold under which a hull distance is reported as exactly zero.
pub const ZERO_DISTANCE_REL: f64 = 1e-10;

const WOLFE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HullDistanceResult {
    /// `min_{λ∈Δ} ‖Σ λ_t a_t‖_*`, `+∞` for an empty point set.
    pub distance: ModulusValue,
    /// Simplex weights indexed like the input points.
    pub weights: Vec<f64>,
    /// `Σ λ_t a_t`.
    pub point: Vec<f64>,
}

impl HullDistanceResult {
    pub fn is_zero(&self) -> bool {
        self.distance == ModulusValue::ZERO
    }

    /// `d_*(0, conv S)⁻¹`.
    pub fn inverse(&self) -> ModulusValue {
        self.distance.reciprocal()
    }
}

/// Minimum of the dual of `norm` over `conv(points)`.
///
/// L2 uses Wolfe's minimum-norm-point method; the polyhedral duals are LPs.
pub fn dual_distance_to_hull(points: &[Vec<f64>], norm: NormKind) -> Result<HullDistanceResult> {
    if points.is_empty() {
        return Ok(HullDistanceResult {
            distance: ModulusValue::Infinite,
            weights: Vec::new(),
            point: Vec::new(),
        });
    }
    let n = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let dual = norm.dual();
    let weights = match (dual, points.len()) {
        (_, 1) => vec![1.0],
        (NormKind::L2, 2) => segment_weights(&points[0], &points[1]),
        (NormKind::L2, _) => wolfe(points)?,
        _ => polyhedral_weights(points, dual)?,
    };
    let point = combine(points, &weights);
    let scale = points.iter().map(|p| dual.norm(p)).fold(0.0, f64::max);
    let d = dual.norm(&point);
    let distance = if d <= ZERO_DISTANCE_REL * scale {
        ModulusValue::ZERO
    } else {
        ModulusValue::finite(d)
    };
    Ok(HullDistanceResult {
        distance,
        weights,
        point,
    })
}

/// Feasibility LP for `0 ∈ conv(points)`.
pub fn hull_contains_origin(points: &[Vec<f64>]) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    let k = points.len();
    let n = points[0].len();
    let mut lp = LpProblem::new(k).nonnegative(0..k).eq(vec![1.0; k], 1.0);
    for i in 0..n {
        lp = lp.eq(points.iter().map(|p| p[i]).collect(), 0.0);
    }
    Ok(solve_lp(&lp)?.status == LpStatus::Optimal)
}

pub(crate) fn combine(points: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let n = points[0].len();
    let mut out = vec![0.0; n];
    for (p, &w) in points.iter().zip(weights) {
        if w != 0.0 {
            for (o, v) in out.iter_mut().zip(p) {
                *o += w * v;
            }
        }
    }
    out
}

fn segment_weights(p: &[f64], q: &[f64]) -> Vec<f64> {
    // minimize ‖q + s(p − q)‖ over s ∈ [0, 1]
    let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    let dd = dot(&diff, &diff);
    let s = if dd == 0.0 {
        1.0
    } else {
        (-dot(q, &diff) / dd).clamp(0.0, 1.0)
    };
    vec![s, 1.0 - s]
}

fn polyhedral_weights(points: &[Vec<f64>], dual: NormKind) -> Result<Vec<f64>> {
    let k = points.len();
    let n = points[0].len();
    // variables: λ (k) then either one bound t (L∞) or n bounds u (L1)
    let extra = if dual == NormKind::LInf { 1 } else { n };
    let nv = k + extra;
    let mut c = vec![0.0; nv];
    c[k..].iter_mut().for_each(|v| *v = -1.0);
    let mut simplex = vec![0.0; nv];
    simplex[..k].iter_mut().for_each(|v| *v = 1.0);
    let mut lp = LpProblem::new(nv).maximize(c).nonnegative(0..nv).eq(simplex, 1.0);
    for i in 0..n {
        let bound = if dual == NormKind::LInf { k } else { k + i };
        let mut pos = vec![0.0; nv];
        for (j, p) in points.iter().enumerate() {
            pos[j] = p[i];
        }
        let mut neg: Vec<f64> = pos.iter().map(|v| -v).collect();
        pos[bound] = -1.0;
        neg[bound] = -1.0;
        lp = lp.le(pos, 0.0).le(neg, 0.0);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure(format!(
            "hull distance LP ended with status {:?}",
            sol.status
        )));
    }
    Ok(normalize(sol.point[..k].to_vec()))
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    w.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Minimizes `‖Σ μ_i p_i‖₂` subject to `Σ μ_i = 1` over the support `s`.
fn affine_minimizer(points: &[Vec<f64>], s: &[usize]) -> Vec<f64> {
    let k = s.len();
    let mut kkt = DMatrix::<f64>::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in a..k {
            let g = dot(&points[s[a]], &points[s[b]]);
            kkt[(a, b)] = g;
            kkt[(b, a)] = g;
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|v| v.iter().all(|x| x.is_finite()))
        .unwrap_or_else(|| {
            kkt.svd(true, true)
                .solve(&rhs, 1e-14)
                .unwrap_or_else(|_| DVector::from_element(k + 1, 1.0 / k as f64))
        });
    sol.iter().take(k).copied().collect()
}

/// Wolfe's minimum-norm-point algorithm over `conv(points)`.
fn wolfe(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = points.len();
    let sq: Vec<f64> = points.iter().map(|p| dot(p, p)).collect();
    let max_sq = sq.iter().copied().fold(0.0, f64::max);
    let start = (0..m).min_by(|&a, &b| sq[a].total_cmp(&sq[b])).expect("nonempty");
    let mut support = vec![start];
    let mut lambda = vec![1.0];
    let mut x = points[start].clone();
    let max_iter = 100 * (m + points[0].len()) + 1000;

    for _ in 0..max_iter {
        let xx = dot(&x, &x);
        if xx <= WOLFE_TOL * WOLFE_TOL * max_sq.max(f64::MIN_POSITIVE) {
            break;
        }
        let (j, xp) = (0..m)
            .map(|j| (j, dot(&x, &points[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if xx - xp <= WOLFE_TOL * max_sq || support.contains(&j) {
            break;
        }
        support.push(j);
        lambda.push(0.0);

        loop {
            let mu = affine_minimizer(points, &support);
            if mu.iter().all(|&v| v > WOLFE_TOL) {
                lambda = mu;
                break;
            }
            let mut theta = 1.0_f64;
            for (l, u) in lambda.iter().zip(&mu) {
                if *u <= WOLFE_TOL && l - u > 0.0 {
                    theta = theta.min(l / (l - u));
                }
            }
            for (l, u) in lambda.iter_mut().zip(&mu) {
                *l += theta * (u - *l);
            }
            let keep: Vec<bool> = lambda.iter().map(|&l| l > WOLFE_TOL).collect();
            if keep.iter().all(|&k| k) {
                // numerical stall: drop the smallest weight
                let drop = (0..lambda.len())
                    .min_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
                    .expect("nonempty");
                support.remove(drop);
                lambda.remove(drop);
            } else {
                let mut idx = 0;
                support.retain(|_| {
                    idx += 1;
                    keep[idx - 1]
                });
                let mut idx = 0;
                lambda.retain(|_| {
                    idx += 1;
                    keep[idx - 1]
                });
            }
            let s: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= s);
            if support.len() == 1 {
                lambda = vec![1.0];
                break;
            }
        }
        let sub: Vec<Vec<f64>> = support.iter().map(|&i| points[i].clone()).collect();
        x = combine(&sub, &lambda);
    }

    let mut weights = vec![0.0; m];
    for (&i, &l) in support.iter().zip(&lambda) {
        weights[i] += l;
    }
    Ok(normalize(weights))
}
