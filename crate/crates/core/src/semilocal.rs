//! Semi-local Hoffman modulus `Hof F(b̄)` and its sampling cross-checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::calmness::{clm_at, CalmnessReport};
use crate::error::{Error, Result};
use crate::geometry::{enumerate_vertices, PolyhedronProjector};
use crate::modulus::ModulusValue;
use crate::norm::NormKind;
use crate::sampling::{subdifferential_sup, FiniteOracle, SamplingTrace};
use crate::system::{residual, rhs_distance, FiniteSystem, Rhs, Tolerances};

const CHAIN_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SemiLocalReport {
    pub value: ModulusValue,
    /// Extreme points of `F(b̄) ∩ span{a_t}` with their calmness reports.
    pub candidates: Vec<(Vec<f64>, CalmnessReport)>,
    pub attaining_point: Vec<f64>,
    /// Lower bounds from sampling routes, by name.
    pub sampling: Vec<(String, ModulusValue)>,
}

/// `max_{x ∈ E(b̄)} clm F(b̄, x)`.
pub fn hof_at(sys: &FiniteSystem, b: &Rhs, tol: &Tolerances) -> Result<SemiLocalReport> {
    let vertices = enumerate_vertices(sys, b, tol.rank, tol.subset_cap)?;
    // vertices sit on their facets only up to round-off
    let vertex_tol = Tolerances {
        active: tol.active.max(1e-9),
        ..*tol
    };
    let candidates: Vec<(Vec<f64>, CalmnessReport)> = vertices
        .into_par_iter()
        .map(|v| clm_at(sys, b, &v, &vertex_tol).map(|r| (v, r)))
        .collect::<Result<_>>()?;
    let mut value = ModulusValue::ZERO;
    let mut attaining_point = candidates[0].0.clone();
    for (v, rep) in &candidates {
        if rep.value > value && !rep.value.approx_eq(value, 1e-12) {
            value = rep.value;
            attaining_point = v.clone();
        }
    }
    Ok(SemiLocalReport {
        value,
        candidates,
        attaining_point,
        sampling: Vec::new(),
    })
}

/// Running maximum of `d_*(0, ∂f_b̄(x))⁻¹` over samples with `f_b̄(x) > 0`.
pub fn hof_at_sampling(sys: &FiniteSystem, b: &Rhs, samples: &[Vec<f64>], tol_active: f64) -> Result<SamplingTrace> {
    subdifferential_sup(&FiniteOracle { sys, b }, samples, tol_active)
}

/// Running maximum of `d(x, F(b̄)) / d(b̄, F⁻¹(x))` over infeasible samples.
pub fn mc_ratio_sup(sys: &FiniteSystem, b: &Rhs, samples: &[Vec<f64>]) -> Result<ModulusValue> {
    let proj = PolyhedronProjector::new(sys, b)?;
    let ratios: Vec<ModulusValue> = samples
        .par_iter()
        .map(|x| -> Result<ModulusValue> {
            let den = rhs_distance(sys, b, x)?;
            if den == ModulusValue::ZERO {
                return Ok(ModulusValue::ZERO);
            }
            let (num, _) = proj.project(x)?;
            Ok(ModulusValue::ratio(num.value(), den.value()))
        })
        .collect::<Result<_>>()?;
    Ok(ModulusValue::sup(ratios))
}

/// Cross-entropy refinement of an outside sample for `mc_ratio_sup`.
///
/// Each round perturbs the `elite` best points found so far by a uniform
/// offset of relative size `0.5·0.7^round` times their distance to `F(b̄)`.
/// Returns `initial` followed by every refined point.
pub fn refine_ratio_samples(
    sys: &FiniteSystem,
    b: &Rhs,
    initial: Vec<Vec<f64>>,
    rounds: usize,
    per_round: usize,
    elite: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let proj = PolyhedronProjector::new(sys, b)?;
    let score = |x: &Vec<f64>| -> Result<(f64, f64)> {
        let den = rhs_distance(sys, b, x)?.value();
        let dist = proj.project(x)?.0.value();
        Ok((if den > 0.0 { dist / den } else { 0.0 }, dist))
    };
    let mut scored: Vec<(f64, f64, usize)> = initial
        .par_iter()
        .map(score)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .enumerate()
        .map(|(k, (r, d))| (r, d, k))
        .collect();
    let mut points = initial;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..rounds {
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)));
        scored.truncate(elite.max(1));
        if scored.is_empty() || scored[0].0 == 0.0 {
            break;
        }
        let rel = 0.5 * 0.7f64.powi(round as i32);
        let fresh: Vec<Vec<f64>> = (0..per_round)
            .map(|_| {
                let (_, d, k) = scored[rng.random_range(0..scored.len())];
                points[k]
                    .iter()
                    .map(|v| v + rel * d * rng.random_range(-1.0..=1.0))
                    .collect()
            })
            .collect();
        let fresh_scores = fresh.par_iter().map(score).collect::<Result<Vec<_>>>()?;
        for (x, (r, d)) in fresh.into_iter().zip(fresh_scores) {
            scored.push((r, d, points.len()));
            points.push(x);
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub hof_at: ModulusValue,
    pub max_vertex_clm: ModulusValue,
    pub max_boundary_clm: ModulusValue,
    pub boundary_samples: usize,
    pub mc_ratio: ModulusValue,
    pub interior_samples: usize,
}

/// Checks `clm(x) ≤ Hof F(b̄)` on boundary samples, attainment on `E(b̄)`,
/// `mc_ratio_sup ≤ Hof F(b̄)`, and zero calmness at interior samples.
pub fn chain_check(
    sys: &FiniteSystem,
    b: &Rhs,
    boundary: &[Vec<f64>],
    outside: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<ChainReport> {
    let semi = hof_at(sys, b, tol)?;
    let hof = semi.value;
    let bound = |v: f64| v + CHAIN_SLACK;

    let max_vertex_clm = ModulusValue::sup(semi.candidates.iter().map(|(_, r)| r.value));
    if max_vertex_clm != hof {
        return Err(Error::ChainViolation {
            check: "max over extreme points equals the semi-local modulus",
            lhs: max_vertex_clm.value(),
            rhs: hof.value(),
            sample: semi.attaining_point.clone(),
        });
    }

    let boundary_tol = Tolerances {
        active: tol.active.max(1e-9),
        ..*tol
    };
    let clms: Vec<ModulusValue> = boundary
        .par_iter()
        .map(|x| clm_at(sys, b, x, &boundary_tol).map(|r| r.value))
        .collect::<Result<_>>()?;
    for (x, v) in boundary.iter().zip(&clms) {
        if v.value() > bound(hof.value()) {
            return Err(Error::ChainViolation {
                check: "boundary calmness bounded by the semi-local modulus",
                lhs: v.value(),
                rhs: hof.value(),
                sample: x.clone(),
            });
        }
    }

    let mc_ratio = mc_ratio_sup(sys, b, outside)?;
    if mc_ratio.value() > bound(hof.value()) {
        return Err(Error::ChainViolation {
            check: "sampled ratio bounded by the semi-local modulus",
            lhs: mc_ratio.value(),
            rhs: hof.value(),
            sample: Vec::new(),
        });
    }

    let mut interior_samples = 0;
    for x in outside {
        let margin = 1e-6 * (1.0 + b.sup_norm() + NormKind::LInf.norm(x));
        if residual(sys, b, x)? < -margin {
            interior_samples += 1;
            let v = clm_at(sys, b, x, tol)?.value;
            if v != ModulusValue::ZERO {
                return Err(Error::ChainViolation {
                    check: "interior points have zero calmness",
                    lhs: v.value(),
                    rhs: 0.0,
                    sample: x.clone(),
                });
            }
        }
    }

    Ok(ChainReport {
        hof_at: hof,
        max_vertex_clm,
        max_boundary_clm: ModulusValue::sup(clms),
        boundary_samples: boundary.len(),
        mc_ratio,
        interior_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{BoundarySampler, Sampler};
    use crate::system::fixtures::square;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn refinement_climbs_toward_the_box_value() {
        let (sys, b) = square(NormKind::L2);
        let initial = Sampler::UniformBox {
            center: vec![0.0, 0.0],
            radius: 3.0,
        }
        .draw(50, 3)
        .unwrap();
        let coarse = mc_ratio_sup(&sys, &b, &initial).unwrap().value();
        let refined = refine_ratio_samples(&sys, &b, initial, 12, 100, 5, 3).unwrap();
        assert_eq!(refined.len(), 1250);
        let fine = mc_ratio_sup(&sys, &b, &refined).unwrap().value();
        assert!(
            fine >= coarse && fine > 2f64.sqrt() - 1e-3 && fine <= 2f64.sqrt() + 1e-12,
            "{coarse} {fine}"
        );
        let again = refine_ratio_samples(&sys, &b, refined[..50].to_vec(), 12, 100, 5, 3).unwrap();
        assert_eq!(again, refined);
    }

    #[test]
    fn box_value_at_every_vertex() {
        let (sys, b) = square(NormKind::L2);
        let rep = hof_at(&sys, &b, &tol()).unwrap();
        assert!(rep.value.approx_eq(2f64.sqrt().into(), 1e-12));
        assert_eq!(rep.candidates.len(), 4);
        for (_, c) in &rep.candidates {
            assert!(c.value.approx_eq(rep.value, 1e-12));
        }
    }

    #[test]
    fn half_line_and_slab() {
        let sys = FiniteSystem::from_rows(vec![vec![1.0]], NormKind::L2).unwrap();
        let b = Rhs::new(vec![0.0]).unwrap();
        assert_eq!(hof_at(&sys, &b, &tol()).unwrap().value, ModulusValue::finite(1.0));

        let sys = FiniteSystem::from_rows(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], NormKind::L2).unwrap();
        let b = Rhs::new(vec![1.0, 1.0]).unwrap();
        let rep = hof_at(&sys, &b, &tol()).unwrap();
        assert_eq!(rep.value, ModulusValue::finite(1.0));
        assert_eq!(rep.candidates.len(), 2);
    }

    #[test]
    fn single_outside_sample_ratio() {
        let (sys, b) = square(NormKind::L2);
        let v = mc_ratio_sup(&sys, &b, &[vec![2.0, 2.0]]).unwrap();
        assert!(v.approx_eq(2f64.sqrt().into(), 1e-15));
        assert_eq!(mc_ratio_sup(&sys, &b, &[vec![0.0, 0.5]]).unwrap(), ModulusValue::ZERO);
    }

    #[test]
    fn half_line_sampling_is_exact() {
        let sys = FiniteSystem::from_rows(vec![vec![1.0]], NormKind::L2).unwrap();
        let b = Rhs::new(vec![0.0]).unwrap();
        let t = hof_at_sampling(&sys, &b, &[vec![0.5], vec![3.0]], 1e-9).unwrap();
        assert_eq!(t.estimate, ModulusValue::finite(1.0));
        let t = hof_at_sampling(&sys, &b, &[vec![-0.5]], 1e-9).unwrap();
        assert_eq!(t.estimate, ModulusValue::ZERO);
        assert!(t.require_samples().is_err());
    }

    #[test]
    fn box_chain() {
        let (sys, b) = square(NormKind::L2);
        let bs = BoundarySampler::new(&sys, &b, &tol()).unwrap();
        let boundary = bs.draw(300, 4).unwrap();
        let outside = Sampler::UniformBox {
            center: vec![0.0, 0.0],
            radius: 3.0,
        }
        .draw(2000, 4)
        .unwrap();
        let rep = chain_check(&sys, &b, &boundary, &outside, &tol()).unwrap();
        assert!(rep.max_boundary_clm.approx_eq(2f64.sqrt().into(), 1e-12));
        assert!(rep.interior_samples > 0);
    }

    #[test]
    fn whole_space_has_zero_modulus() {
        let sys = FiniteSystem::from_rows(vec![vec![0.0, 0.0]], NormKind::L2).unwrap();
        let b = Rhs::new(vec![1.0]).unwrap();
        let rep = chain_check(&sys, &b, &[], &[vec![3.0, 3.0]], &tol()).unwrap();
        assert_eq!(rep.hof_at, ModulusValue::ZERO);
    }

    #[test]
    fn duplicate_rows_leave_the_modulus_unchanged() {
        let (sys, b) = square(NormKind::L2);
        let mut rows: Vec<Vec<f64>> = sys.rows().iter().map(|r| r.a.clone()).collect();
        rows.push(rows[2].clone());
        let dup = FiniteSystem::from_rows(rows, NormKind::L2).unwrap();
        let mut bv = b.values().to_vec();
        bv.push(1.0);
        let rep = hof_at(&dup, &Rhs::new(bv).unwrap(), &tol()).unwrap();
        assert!(rep.value.approx_eq(2f64.sqrt().into(), 1e-12));
    }
}
