//! Acceptance criteria. Each check prints one `PASS`/`FAIL` line and then
//! asserts; `main` runs every check and fails if any of them did.

use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use hoffman_core::calmness::{clm_at, clm_sampling, d_family};
use hoffman_core::continuous::{builtin, hof_global_grid, GridSpec};
use hoffman_core::geometry::enumerate_vertices;
use hoffman_core::global::{hof_global, hof_global_exhaustive};
use hoffman_core::lab::fixtures::{staircase, step, truncated_halfline};
use hoffman_core::lab::{estimate_moduli, fixture, Schedule};
use hoffman_core::sampling::{BoundarySampler, Sampler};
use hoffman_core::semilocal::{chain_check, hof_at, mc_ratio_sup, refine_ratio_samples};
use hoffman_core::system::{FiniteSystem, Rhs, Tolerances};
use hoffman_core::{ModulusValue, NormKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hoffman_validation::{nested_pair, random_feasible, random_system};

fn verdict(id: u32, title: &str, ok: bool, detail: String) {
    println!("{} [{id}] {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn criterion_1_spiral_calmness_at_the_second_point() {
    let csys = builtin("example-4-3").unwrap();
    let mut details = Vec::new();
    let mut ok = true;
    for step in [0.1, 0.05, 0.01] {
        let start = Instant::now();
        let (sys, b) = csys.discretize(&GridSpec::new(step).unwrap()).unwrap();
        let v = clm_at(&sys, &b, &[1.0, -2.0], &Tolerances::default()).unwrap().value;
        let elapsed = start.elapsed();
        ok &= rel_close(v.value(), 5f64.sqrt(), 1e-6) && elapsed < Duration::from_secs(1);
        details.push(format!("step {step}: {v} in {elapsed:.2?}"));
    }
    verdict(1, "clm at (1,-2) equals sqrt 5", ok, details.join(", "));
}

fn criterion_2_spiral_calmness_diverges_at_the_first_point() {
    let csys = builtin("example-4-3").unwrap();
    let oracle = csys.fine_oracle(1e-5);
    let start = Instant::now();
    let estimates: Vec<f64> = [10.0, 1e2, 1e3, 1e4]
        .iter()
        .map(|&r: &f64| {
            let s = 1.0 + 1.0 / r;
            let x = vec![s * (1.0 / r).cos(), s * (1.0 / r).sin()];
            clm_sampling(&oracle, &[x], 1e-9).unwrap().estimate.value()
        })
        .collect();
    let elapsed = start.elapsed();
    let increasing = estimates.windows(2).all(|w| w[1] > w[0]);
    let ok = increasing && estimates[3] >= 5.0 * estimates[1] && elapsed < Duration::from_secs(5);
    verdict(
        2,
        "sampled calmness along x_r grows without bound",
        ok,
        format!("estimates {estimates:?} in {elapsed:.2?}"),
    );
}

/// Not an acceptance criterion: the same divergence seen along
/// `x_r = (1, tan(1/r))`, where the spiral rows rather than row 4 are maximal.
fn supplemental_spiral_calmness_diverges_along_the_tangent() {
    let csys = builtin("example-4-3").unwrap();
    let oracle = csys.fine_oracle(1e-5);
    let estimates: Vec<f64> = [10.0, 1e2, 1e3]
        .iter()
        // the spiral excess is of order r⁻³ here, so the active tolerance must sit well below it
        .map(|&r: &f64| {
            clm_sampling(&oracle, &[vec![1.0, (1.0 / r).tan()]], 1e-14)
                .unwrap()
                .estimate
                .value()
        })
        .collect();
    let ok = estimates.windows(2).all(|w| w[1] > 5.0 * w[0]);
    println!(
        "{} [2*] tangent sequence: {estimates:?}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

fn criterion_3_global_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tol = Tolerances::default();
    let start = Instant::now();
    let mut failures = Vec::new();
    for k in 0..200 {
        let norm = NormKind::ALL[k % 3];
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=10);
        let sys = random_system(&mut rng, n, m, norm);
        let rep = hof_global(&sys, &tol).unwrap();
        let exhaustive = hof_global_exhaustive(&sys, tol.subset_cap).unwrap();
        let (aty, y1) = rep.certificate_norms(&sys);
        let v = rep.value.value();
        if !rel_close(v, exhaustive.value(), 1e-8) || (aty - 1.0).abs() > 1e-8 || (y1 - v).abs() > 1e-6 {
            failures.push(format!(
                "#{k} ({norm}, {m}x{n}): {v} vs {exhaustive}, |A'y|={aty}, |y|={y1}"
            ));
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(60);
    verdict(
        3,
        "independent-subset, exhaustive and certificate routes agree",
        ok,
        format!("200 systems in {elapsed:.2?}, failures {failures:?}"),
    );
}

fn criterion_4_semi_local_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tol = Tolerances::default();
    let mut tight = 0;
    let mut failures = Vec::new();
    for k in 0..100u64 {
        let n = rng.random_range(2..=3);
        let m = rng.random_range(n + 1..=n + 4);
        let (sys, b) = random_feasible(&mut rng, n, m, NormKind::L2);
        let boundary = BoundarySampler::new(&sys, &b, &tol).unwrap().draw(1000, k).unwrap();
        let centers = enumerate_vertices(&sys, &b, tol.rank, tol.subset_cap).unwrap();
        let initial = Sampler::VertexNeighborhoods { centers, radius: 1.0 }
            .draw(2_000, k)
            .unwrap();
        let outside = refine_ratio_samples(&sys, &b, initial, 16, 500, 10, k).unwrap();
        assert_eq!(outside.len(), 10_000);
        match chain_check(&sys, &b, &boundary, &outside, &tol) {
            Ok(rep) => {
                let hof = rep.hof_at.value();
                if hof - rep.mc_ratio.value() <= 0.1 * hof {
                    tight += 1;
                }
            }
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let ok = failures.is_empty() && tight >= 90;
    verdict(
        4,
        "boundary calmness and sampled ratios bounded by the semi-local modulus",
        ok,
        format!("{tight}/100 within 10%, violations {failures:?}"),
    );
}

fn criterion_5_box_benchmark() {
    let sys = FiniteSystem::from_rows(
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        NormKind::L2,
    )
    .unwrap();
    let b = Rhs::new(vec![1.0; 4]).unwrap();
    let tol = Tolerances::default();
    let global = hof_global(&sys, &tol).unwrap().value.value();
    let semi = hof_at(&sys, &b, &tol).unwrap().value.value();
    let samples = Sampler::UniformBox {
        center: vec![0.0, 0.0],
        radius: 3.0,
    }
    .draw(100_000, 1)
    .unwrap();
    let mc = mc_ratio_sup(&sys, &b, &samples).unwrap().value();
    let ok = (global - SQRT_2).abs() <= 1e-9 && (semi - SQRT_2).abs() <= 1e-9 && (1.36..=SQRT_2 + 1e-9).contains(&mc);
    verdict(
        5,
        "box constants",
        ok,
        format!("global {global}, semi-local {semi}, sampled {mc}"),
    );
}

fn criterion_6_monotonicity_along_nested_active_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tol = Tolerances::default();
    let mut cases = 0;
    let mut failures = Vec::new();
    while cases < 100 {
        let n = rng.random_range(2..=3);
        let m = rng.random_range(n + 1..=n + 5);
        let (sys, b) = random_feasible(&mut rng, n, m, NormKind::ALL[cases % 3]);
        let Some((x1, x2)) = nested_pair(&mut rng, &sys, &b, &tol) else {
            continue;
        };
        cases += 1;
        let f1 = d_family(&sys, &b, &x1, &tol).unwrap();
        let f2 = d_family(&sys, &b, &x2, &tol).unwrap();
        let c1 = clm_at(&sys, &b, &x1, &tol).unwrap().value;
        let c2 = clm_at(&sys, &b, &x2, &tol).unwrap().value;
        let nested = f1.active.is_subset_of(&f2.active) && !f1.active.is_empty();
        let included = f1.members.iter().all(|d| f2.contains(d));
        let ordered = c1.value() <= c2.value() * (1.0 + 1e-12);
        if !(nested && included && ordered) {
            failures.push(format!(
                "case {cases}: nested {nested}, included {included}, clm {c1} vs {c2}"
            ));
        }
    }
    verdict(
        6,
        "family inclusion and calmness ordering",
        failures.is_empty(),
        format!("100 pairs, failures {failures:?}"),
    );
}

fn criterion_7_multifunction_fixtures() {
    let schedule = Schedule::default();
    let close = |v: ModulusValue, t: f64| (v.value() - t).abs() <= 0.05;

    let stairs = estimate_moduli(&staircase(1_000_000_000), &schedule).unwrap();
    let stairs_ok = close(stairs.sup_clm.value, 1.0) && stairs.uclm.diverged;

    let st = estimate_moduli(&step(), &schedule).unwrap();
    let step_ok = close(st.uclm.value, 0.0) && !st.uclm.diverged && st.lipusc.diverged;

    let iv = estimate_moduli(&fixture("interval").unwrap().at(vec![-1.0]), &schedule).unwrap();
    let interval_ok = close(iv.lipusc.value, 0.0) && !iv.lipusc.diverged && iv.hof.diverged;

    let left = estimate_moduli(&truncated_halfline().at(vec![-0.5]), &schedule).unwrap();
    let right = estimate_moduli(&truncated_halfline().at(vec![0.5]), &schedule).unwrap();
    let halfline_ok = close(left.hof.value, 1.0) && close(right.hof.value, 0.0);

    let chain_ok = [&stairs, &st, &iv, &left, &right]
        .iter()
        .all(|e| e.check_chain(1e-6).is_ok());
    verdict(
        7,
        "multifunction fixtures separate the moduli",
        stairs_ok && step_ok && interval_ok && halfline_ok && chain_ok,
        format!(
            "staircase sup clm {} uclm diverged {}; step uclm {} lipusc diverged {}; \
             interval lipusc {} hof diverged {}; halfline hof {} / {}; chain {chain_ok}",
            stairs.sup_clm.value,
            stairs.uclm.diverged,
            st.uclm.value,
            st.lipusc.diverged,
            iv.lipusc.value,
            iv.hof.diverged,
            left.hof.value,
            right.hof.value
        ),
    );
}

fn criterion_8_grid_constants_diverge() {
    let csys = builtin("example-4-3").unwrap();
    let tol = Tolerances::default();
    let mut ok = true;
    let mut details = Vec::new();
    for (step, floor) in [(0.1, 10.0), (0.01, 100.0), (0.001, 1000.0)] {
        let start = Instant::now();
        let g = hof_global_grid(&csys, step, &tol).unwrap();
        let elapsed = start.elapsed();
        ok &= g.value.value() >= floor;
        if step == 0.001 {
            ok &= elapsed < Duration::from_secs(30);
        }
        details.push(format!(
            "step {step}: {} rows, value {} in {elapsed:.2?}",
            g.rows, g.value
        ));
    }
    verdict(8, "grid constants grow under refinement", ok, details.join("; "));
}

fn criterion_9_global_constant_attained_at_the_origin() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    for k in 0..50 {
        let norm = NormKind::ALL[k % 3];
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=10);
        let sys = random_system(&mut rng, n, m, norm);
        let rep = hof_global(&sys, &tol).unwrap();
        let bj = Rhs::new((0..m).map(|i| if rep.subset.contains(i) { 0.0 } else { 1.0 }).collect()).unwrap();
        let semi = hof_at(&sys, &bj, &tol).unwrap().value.value();
        let at_origin = clm_at(&sys, &bj, &vec![0.0; n], &tol).unwrap().value.value();
        let v = rep.value.value();
        if !rel_close(semi, v, 1e-8) || !rel_close(at_origin, v, 1e-8) {
            failures.push(format!(
                "#{k} ({norm}, {m}x{n}): global {v}, semi-local {semi}, clm(0) {at_origin}"
            ));
        }
    }
    verdict(
        9,
        "semi-local and calmness moduli at b^J attain the global constant",
        failures.is_empty(),
        format!("50 systems, failures {failures:?}"),
    );
}

fn main() {
    std::panic::set_hook(Box::new(|info| eprintln!("{info}")));
    let checks: [(&str, fn()); 10] = [
        ("criterion 1", criterion_1_spiral_calmness_at_the_second_point),
        ("criterion 2", criterion_2_spiral_calmness_diverges_at_the_first_point),
        (
            "supplemental 2",
            supplemental_spiral_calmness_diverges_along_the_tangent,
        ),
        ("criterion 3", criterion_3_global_routes_agree),
        ("criterion 4", criterion_4_semi_local_chain),
        ("criterion 5", criterion_5_box_benchmark),
        ("criterion 6", criterion_6_monotonicity_along_nested_active_sets),
        ("criterion 7", criterion_7_multifunction_fixtures),
        ("criterion 8", criterion_8_grid_constants_diverge),
        ("criterion 9", criterion_9_global_constant_attained_at_the_origin),
    ];
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, check)| std::panic::catch_unwind(check).is_err())
        .map(|(name, _)| *name)
        .collect();
    println!(
        "acceptance: {} of {} checks passed",
        checks.len() - failed.len(),
        checks.len()
    );
    if !failed.is_empty() {
        eprintln!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}
