//! Calmness modulus of the feasible set mapping at a point of its graph.
//!
//! For finite systems the modulus is the largest `d_*(0, conv{a_t, t ∈ D})⁻¹`
//! over the subsets `D ⊆ T(x̄)` whose strict system
//! `a_t'd = 1 (t ∈ D), a_t'd < 1 (t ∈ T(x̄)∖D)` is consistent.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dual_distance_to_hull, strict_system_witness};
use crate::modulus::ModulusValue;
use crate::sampling::{subdifferential_sup, OutsideOracle, SamplingTrace};
use crate::system::{active_set, FiniteSystem, IndexSubset, Rhs, Tolerances};

/// Largest number of nonzero active rows whose subsets are enumerated.
pub const MAX_ACTIVE_ROWS: usize = 24;

/// The subsets `D ⊆ T(x̄)` with a consistent strict system.
#[derive(Debug, Clone, PartialEq)]
pub struct DFamily {
    pub point: Vec<f64>,
    pub active: IndexSubset,
    /// Lexicographically ordered; each carries its witness `d` as certificate.
    pub members: Vec<IndexSubset>,
}

impl DFamily {
    pub fn contains(&self, d: &IndexSubset) -> bool {
        self.members.iter().any(|m| m.indices() == d.indices())
    }

    pub fn nonempty_members(&self) -> impl Iterator<Item = &IndexSubset> {
        self.members.iter().filter(|m| !m.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalmnessReport {
    pub value: ModulusValue,
    pub attaining: IndexSubset,
    pub family: DFamily,
    /// One vertex list per nonempty member; the union of their hulls is the end set.
    pub end_set: Vec<Vec<Vec<f64>>>,
}

pub fn d_family(sys: &FiniteSystem, b: &Rhs, x: &[f64], tol: &Tolerances) -> Result<DFamily> {
    let active = active_set(sys, b, x, tol.active)?;
    // zero rows can never satisfy a_t'd = 1
    let candidates: Vec<usize> = active
        .indices()
        .iter()
        .copied()
        .filter(|&i| !sys.rows()[i].is_zero())
        .collect();
    let k = candidates.len();
    if k > MAX_ACTIVE_ROWS {
        return Err(Error::SizeLimit {
            count: 1u128 << k.min(127),
            cap: 1u128 << MAX_ACTIVE_ROWS,
        });
    }
    let tested: Vec<Option<IndexSubset>> = (0u64..(1u64 << k))
        .into_par_iter()
        .map(|mask| -> Result<Option<IndexSubset>> {
            let d = IndexSubset::new(
                (0..k)
                    .filter(|&j| mask & (1 << j) != 0)
                    .map(|j| candidates[j])
                    .collect(),
            );
            Ok(strict_system_witness(sys, &active, &d, tol.strict)?.map(|w| d.with_certificate(w)))
        })
        .collect::<Result<_>>()?;
    let mut members: Vec<IndexSubset> = tested.into_iter().flatten().collect();
    members.sort_by(|a, b| a.indices().cmp(b.indices()));
    Ok(DFamily {
        point: x.to_vec(),
        active,
        members,
    })
}

/// `max_{D ∈ D(x̄)} d_*(0, conv{a_t, t ∈ D})⁻¹`, with `D = ∅` contributing 0.
pub fn clm_at(sys: &FiniteSystem, b: &Rhs, x: &[f64], tol: &Tolerances) -> Result<CalmnessReport> {
    let family = d_family(sys, b, x, tol)?;
    let mut value = ModulusValue::ZERO;
    let mut attaining = IndexSubset::empty();
    for d in family.nonempty_members() {
        let h = dual_distance_to_hull(&d.points(sys), sys.norm())?;
        let v = h.inverse();
        if v > value && !v.approx_eq(value, 1e-12) {
            value = v;
            attaining = IndexSubset::new(d.indices().to_vec()).with_certificate(h.weights);
        }
    }
    let end_set = family.nonempty_members().map(|d| d.points(sys)).collect();
    Ok(CalmnessReport {
        value,
        attaining,
        family,
        end_set,
    })
}

/// Hulls `conv{a_t, t ∈ D}` over the nonempty members of the family.
pub fn end_set_finite(sys: &FiniteSystem, b: &Rhs, x: &[f64], tol: &Tolerances) -> Result<Vec<Vec<Vec<f64>>>> {
    let family = d_family(sys, b, x, tol)?;
    Ok(family.nonempty_members().map(|d| d.points(sys)).collect())
}

/// Running supremum of `d_*(0, ∂f(x))⁻¹` along samples approaching `x̄` from outside.
///
/// The result never claims convergence; divergence is read off the trace.
pub fn clm_sampling<O: OutsideOracle>(oracle: &O, samples: &[Vec<f64>], tol_active: f64) -> Result<SamplingTrace> {
    subdifferential_sup(oracle, samples, tol_active)
}
