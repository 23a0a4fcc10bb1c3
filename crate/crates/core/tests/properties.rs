//! Cross-module properties on random systems.

use hoffman_core::calmness::clm_at;
use hoffman_core::continuous::{builtin, GridSpec};
use hoffman_core::geometry::{solve_lp, LpProblem, LpStatus};
use hoffman_core::global::hof_global;
use hoffman_core::sampling::BoundarySampler;
use hoffman_core::semilocal::hof_at;
use hoffman_core::system::{residual, FiniteSystem, Rhs, Row, Tolerances};
use hoffman_core::NormKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::{nested_pair, random_feasible};

/// `p ∈ conv(vs)` by a feasibility LP in the weights.
fn in_hull(p: &[f64], vs: &[Vec<f64>]) -> bool {
    let k = vs.len();
    let mut lp = LpProblem::new(k).eq(vec![1.0; k], 1.0);
    for (j, pj) in p.iter().enumerate() {
        lp = lp.eq(vs.iter().map(|v| v[j]).collect(), *pj);
    }
    for i in 0..k {
        lp = lp.lower_bound(i, 0.0);
    }
    solve_lp(&lp).is_ok_and(|s| s.status == LpStatus::Optimal)
}

#[test]
fn end_sets_grow_along_nested_active_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tol = Tolerances::default();
    let mut cases = 0;
    while cases < 40 {
        let n = rng.random_range(2..=3);
        let m = rng.random_range(n + 1..=n + 4);
        let (sys, b) = random_feasible(&mut rng, n, m, NormKind::ALL[cases % 3]);
        let Some((x1, x2)) = nested_pair(&mut rng, &sys, &b, &tol) else {
            continue;
        };
        cases += 1;
        let small = clm_at(&sys, &b, &x1, &tol).unwrap().end_set;
        let large = clm_at(&sys, &b, &x2, &tol).unwrap().end_set;
        for hull in &small {
            for _ in 0..10 {
                let w: Vec<f64> = hull.iter().map(|_| rng.random_range(0.0..1.0)).collect();
                let total: f64 = w.iter().sum();
                let p: Vec<f64> = (0..n)
                    .map(|j| hull.iter().zip(&w).map(|(v, wi)| v[j] * wi / total).sum())
                    .collect();
                assert!(
                    large.iter().any(|h| in_hull(&p, h)),
                    "case {cases}: {p:?} escapes the larger end set"
                );
            }
        }
    }
}

#[test]
fn semi_local_modulus_dominates_boundary_calmness_in_every_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let tol = Tolerances::default();
    let boundary_tol = Tolerances { active: 1e-9, ..tol };
    for k in 0..30u64 {
        let norm = NormKind::ALL[k as usize % 3];
        let n = rng.random_range(2..=3);
        let m = rng.random_range(n + 1..=n + 4);
        let (sys, b) = random_feasible(&mut rng, n, m, norm);
        let hof = hof_at(&sys, &b, &tol).unwrap().value;
        for x in BoundarySampler::new(&sys, &b, &tol).unwrap().draw(100, k).unwrap() {
            let c = clm_at(&sys, &b, &x, &boundary_tol).unwrap().value;
            assert!(c.value() <= hof.value() + 1e-8, "{norm}: clm {c} > hof {hof} at {x:?}");
        }
    }
}

#[test]
fn slater_point_and_bounded_set_give_a_finite_modulus_below_the_global_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let tol = Tolerances::default();
    for k in 0..30 {
        let n = rng.random_range(2..=3);
        let (base, b) = random_feasible(&mut rng, n, n + 2, NormKind::ALL[k % 3]);
        // a box around the origin keeps F(b) bounded
        let mut rows: Vec<Row> = base.rows().to_vec();
        let mut rhs = b.values().to_vec();
        for j in 0..n {
            for s in [1.0, -1.0] {
                let mut a = vec![0.0; n];
                a[j] = s;
                rows.push(Row::new(format!("box{j}{s}"), a));
                rhs.push(10.0);
            }
        }
        let sys = FiniteSystem::new(n, rows, base.norm()).unwrap();
        let b = Rhs::new(rhs).unwrap();
        let semi = hof_at(&sys, &b, &tol).unwrap().value;
        let global = hof_global(&sys, &tol).unwrap().value;
        assert!(semi.is_finite());
        assert!(semi.value() <= global.value() * (1.0 + 1e-9), "{semi} > {global}");
    }
}

#[test]
fn grid_residual_never_exceeds_the_fine_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for name in ["example-4-3", "example-4-9"] {
        let csys = builtin(name).unwrap();
        for step in [0.3, 0.05] {
            let (sys, b) = csys.discretize(&GridSpec::new(step).unwrap()).unwrap();
            for _ in 0..200 {
                let x: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
                let coarse = residual(&sys, &b, &x).unwrap();
                let fine = csys.residual_on_grid(&x, step / 100.0).unwrap();
                assert!(coarse <= fine + 1e-12, "{name} step {step}: {coarse} > {fine}");
            }
        }
    }
}
