//! Random feasible systems and nested point pairs for the acceptance suite.

use hoffman_core::geometry::{enumerate_vertices, solve_lp, LpProblem};
use hoffman_core::system::{active_set, FiniteSystem, Rhs, Tolerances};
use hoffman_core::NormKind;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_system(rng: &mut ChaCha8Rng, n: usize, m: usize, norm: NormKind) -> FiniteSystem {
    let rows = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    FiniteSystem::from_rows(rows, norm).unwrap()
}

/// `b = A x0 + s` with `s > 0`, so `x0` is a Slater point.
pub fn random_feasible(rng: &mut ChaCha8Rng, n: usize, m: usize, norm: NormKind) -> (FiniteSystem, Rhs) {
    let sys = random_system(rng, n, m, norm);
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let b = (0..m).map(|i| sys.dot(i, &x0) + rng.random_range(0.1..=1.0)).collect();
    (sys, Rhs::new(b).unwrap())
}

/// A vertex `x²`, a point `z` on a facet through `x²`, and their midpoint `x¹`,
/// so that `T(x¹) = T(x²) ∩ T(z)`.
pub fn nested_pair(
    rng: &mut ChaCha8Rng,
    sys: &FiniteSystem,
    b: &Rhs,
    tol: &Tolerances,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let vertices = enumerate_vertices(sys, b, tol.rank, tol.subset_cap).ok()?;
    let x2 = vertices[rng.random_range(0..vertices.len())].clone();
    let t2 = active_set(sys, b, &x2, tol.active).ok()?;
    let facet = t2.indices()[rng.random_range(0..t2.len())];
    let n = sys.dim();
    let mut lp = LpProblem::new(n).maximize((0..n).map(|_| rng.random_range(-1.0..=1.0)).collect());
    for i in 0..sys.len() {
        lp = if i == facet {
            lp.eq(sys.row(i).to_vec(), b[i])
        } else {
            lp.le(sys.row(i).to_vec(), b[i])
        };
    }
    for (j, v) in x2.iter().enumerate() {
        lp = lp.lower_bound(j, v - 5.0).upper_bound(j, v + 5.0);
    }
    let z = solve_lp(&lp).ok()?.point;
    let x1 = x2.iter().zip(&z).map(|(a, c)| 0.5 * (a + c)).collect();
    Some((x1, x2))
}
