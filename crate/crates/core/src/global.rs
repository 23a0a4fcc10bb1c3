//! Global Hoffman constant of a finite system.
//!
//! The default route maximizes `d_*(0, conv{a_t, t ∈ J})⁻¹` over linearly
//! independent `J` of size `rank A`. The exhaustive route scans every subset
//! and serves as a cross-check. The attaining subset yields a dual vector
//! `y ≥ 0` with `‖A'y‖_* = 1` and `‖y‖₁` equal to the constant.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::dual_distance_to_hull;
use crate::geometry::hull::combine;
use crate::geometry::linalg::rowspace_of;
use crate::geometry::subsets::{binomial, check_cap, fold_independent};
use crate::modulus::ModulusValue;
use crate::norm::NormKind;
use crate::system::{FiniteSystem, IndexSubset, Tolerances};

/// Largest row count accepted by the exhaustive route.
pub const EXHAUSTIVE_MAX_ROWS: usize = 24;

const TIE_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalHoffmanReport {
    pub value: ModulusValue,
    /// Attaining subset; its certificate holds the simplex weights `λ`.
    pub subset: IndexSubset,
    /// Dual vector `y` indexed by row, supported on `subset`.
    pub certificate: Vec<f64>,
    /// Values by route name.
    pub routes: Vec<(String, ModulusValue)>,
}

impl GlobalHoffmanReport {
    /// `(‖A'y‖_*, ‖y‖₁)` for the reported certificate.
    pub fn certificate_norms(&self, sys: &FiniteSystem) -> (f64, f64) {
        certificate_norms(sys, &self.certificate)
    }
}

/// `(‖A'y‖_*, ‖y‖₁)` with the dual of the system norm.
pub fn certificate_norms(sys: &FiniteSystem, y: &[f64]) -> (f64, f64) {
    let mut aty = vec![0.0; sys.dim()];
    for (i, &yi) in y.iter().enumerate() {
        for (v, a) in aty.iter_mut().zip(sys.row(i)) {
            *v += yi * a;
        }
    }
    (sys.norm().dual_norm(&aty), NormKind::L1.norm(y))
}

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    subset: Vec<usize>,
    weights: Vec<f64>,
}

impl Best {
    fn none() -> Self {
        Best {
            value: 0.0,
            subset: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Keeps `self` unless `other` is larger beyond the tie tolerance.
    fn merge(self, other: Best) -> Best {
        if other.value > self.value * (1.0 + TIE_REL) {
            other
        } else {
            self
        }
    }
}

fn rows_of(sys: &FiniteSystem) -> Vec<Vec<f64>> {
    sys.rows().iter().map(|r| r.a.clone()).collect()
}

fn points_of(rows: &[Vec<f64>], subset: &[usize]) -> Vec<Vec<f64>> {
    subset.iter().map(|&i| rows[i].clone()).collect()
}

/// Global constant via linearly independent subsets of size `rank A`.
pub fn hof_global(sys: &FiniteSystem, tol: &Tolerances) -> Result<GlobalHoffmanReport> {
    let rows = rows_of(sys);
    let n = sys.dim();
    let norm = sys.norm();
    let (r, _) = rowspace_of(&rows, n, tol.rank);
    check_cap(binomial(rows.len(), r), tol.subset_cap)?;

    let failure = std::sync::Mutex::new(None::<Error>);
    let groups = fold_independent(&rows, n, r, tol.rank, Best::none, |best, j| {
        if j.is_empty() {
            return best;
        }
        match dual_distance_to_hull(&points_of(&rows, j), norm) {
            Ok(h) if !h.is_zero() => best.merge(Best {
                value: h.distance.value().recip(),
                subset: j.to_vec(),
                weights: h.weights,
            }),
            Ok(_) => best,
            Err(e) => {
                failure.lock().expect("poisoned").get_or_insert(e);
                best
            }
        }
    });
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    let best = groups.into_iter().fold(Best::none(), Best::merge);
    Ok(report_from(sys, best, "independent-subsets"))
}

fn report_from(sys: &FiniteSystem, best: Best, route: &str) -> GlobalHoffmanReport {
    let mut certificate = vec![0.0; sys.len()];
    if best.subset.is_empty() {
        return GlobalHoffmanReport {
            value: ModulusValue::ZERO,
            subset: IndexSubset::empty(),
            certificate,
            routes: vec![(route.to_string(), ModulusValue::ZERO)],
        };
    }
    let rows = rows_of(sys);
    let pts = points_of(&rows, &best.subset);
    let dist = sys.norm().dual_norm(&combine(&pts, &best.weights));
    for (&i, &w) in best.subset.iter().zip(&best.weights) {
        certificate[i] = w / dist;
    }
    let value = ModulusValue::finite(best.value);
    let cert_value = ModulusValue::finite(NormKind::L1.norm(&certificate));
    GlobalHoffmanReport {
        value,
        subset: IndexSubset::new(best.subset).with_certificate(best.weights),
        certificate,
        routes: vec![(route.to_string(), value), ("dual-certificate".to_string(), cert_value)],
    }
}

/// Global constant as a maximum over every subset `J` with `0 ∉ conv{a_t, t ∈ J}`.
pub fn hof_global_exhaustive(sys: &FiniteSystem, cap: u128) -> Result<ModulusValue> {
    Ok(hof_global_exhaustive_report(sys, cap)?.value)
}

/// Exhaustive route with its attaining subset.
pub fn hof_global_exhaustive_report(sys: &FiniteSystem, cap: u128) -> Result<GlobalHoffmanReport> {
    let m = sys.len();
    let count = if m >= 128 { u128::MAX } else { 1u128 << m };
    if m > EXHAUSTIVE_MAX_ROWS {
        return Err(Error::SizeLimit {
            count,
            cap: 1u128 << EXHAUSTIVE_MAX_ROWS,
        });
    }
    check_cap(count, cap)?;
    let rows = rows_of(sys);
    let norm = sys.norm();
    let evaluated: Vec<Result<Best>> = (1u64..(1u64 << m))
        .into_par_iter()
        .map(|mask| {
            let subset: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
            let h = dual_distance_to_hull(&points_of(&rows, &subset), norm)?;
            Ok(if h.is_zero() {
                Best::none()
            } else {
                Best {
                    value: h.distance.value().recip(),
                    subset,
                    weights: h.weights,
                }
            })
        })
        .collect();
    // masks are not in lexicographic subset order; sort candidates for the tie-break
    let mut cands = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
    cands.sort_by(|a, b| a.subset.cmp(&b.subset));
    let best = cands.into_iter().fold(Best::none(), Best::merge);
    Ok(report_from(sys, best, "exhaustive"))
}
