//! Multifunctions with known moduli on the real line, plus random families.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Multifunction, SampledMultifunction};
use crate::error::{Error, Result};
use crate::geometry::{enumerate_vertices, project_to_polyhedron};
use crate::norm::NormKind;
use crate::system::{FiniteSystem, Rhs, Tolerances};

pub const FIXTURE_NAMES: [&str; 4] = ["staircase", "step", "interval", "truncated-halfline"];

/// Default truncation of the staircase branches.
pub const STAIRCASE_BRANCHES: u64 = 1000;

/// A named fixture at its default nominal parameter.
pub fn fixture(name: &str) -> Result<SampledMultifunction> {
    match name {
        "staircase" => Ok(staircase(STAIRCASE_BRANCHES)),
        "step" => Ok(step()),
        "interval" => Ok(interval()),
        "truncated-halfline" => Ok(truncated_halfline()),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

fn line(name: &str, map: impl Multifunction + 'static, y_bar: f64) -> SampledMultifunction {
    SampledMultifunction::new(name, Arc::new(map), vec![y_bar]).with_norms(NormKind::LInf, NormKind::LInf)
}

fn dist_to_interval(v: f64, lo: f64, hi: f64) -> f64 {
    (lo - v).max(v - hi).max(0.0)
}

/// `M(y) = {h_r(y) : 1 ≤ r ≤ R}` with `h_r(y) = r + y` for `y ≤ 1/r` and slope `r` beyond.
///
/// Every branch is calm with modulus 1 at `ȳ = 0`, but branch `r` leaves
/// `M(0)` with slope `r` after `y = 1/r`. The truncation keeps the uniform
/// calmness modulus finite, of order `ε·R`, while `δ ≥ 1/R`; it grows without
/// bound as `R → ∞`.
#[derive(Debug, Clone, Copy)]
pub struct Staircase {
    pub branches: u64,
}

impl Staircase {
    fn h(r: f64, y: f64) -> f64 {
        if y <= 1.0 / r {
            r + y
        } else {
            r + 1.0 / r + r * (y - 1.0 / r)
        }
    }

    fn branch_count(&self) -> f64 {
        self.branches as f64
    }
}

impl Multifunction for Staircase {
    fn y_dim(&self) -> usize {
        1
    }

    fn x_dim(&self) -> usize {
        1
    }

    fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let y = y[0];
        let big_r = self.branch_count();
        let base = self.branches.min(64) as f64;
        let mut rs: Vec<f64> = (1..=base as u64).map(|r| r as f64).collect();
        if y > 0.0 {
            // branches that have just turned steep at y
            let lo = (1.0 / y).ceil().max(base + 1.0);
            let hi = (1.5 / y).floor().min(big_r);
            if lo <= hi {
                let steps = 64.0f64.min(hi - lo).max(1.0);
                let mut window: Vec<f64> = (0..=steps as usize)
                    .map(|j| (lo + (hi - lo) * j as f64 / steps).round())
                    .collect();
                window.dedup();
                rs.extend(window);
            }
        }
        rs.into_iter().map(|r| vec![Self::h(r, y)]).collect()
    }

    fn distance_to_image(&self, y: &[f64], x: &[f64], _: NormKind) -> f64 {
        let (y, x) = (y[0], x[0]);
        let big_r = self.branch_count();
        let mut best = f64::INFINITY;
        let mut try_r = |r: f64, lo: f64, hi: f64| {
            if lo <= hi {
                let r = r.clamp(lo, hi);
                for k in -2..=2 {
                    let s = r + k as f64;
                    if s >= lo && s <= hi {
                        best = best.min((Self::h(s, y) - x).abs());
                    }
                }
            }
        };
        // flat branches: value r + y
        let flat_hi = if y <= 0.0 { big_r } else { big_r.min((1.0 / y).floor()) };
        try_r((x - y).round(), 1.0, flat_hi);
        if y > 0.0 {
            // steep branches: value r(1 + y) + 1/r − 1
            try_r(((x + 1.0) / (1.0 + y)).round(), (1.0 / y).floor() + 1.0, big_r);
        }
        best
    }
}

pub fn staircase(branches: u64) -> SampledMultifunction {
    assert!(branches >= 1, "the staircase needs at least one branch");
    line("staircase", Staircase { branches }, 0.0)
}

/// `M(y) = {0}` for `y ≤ 0` and `{1}` for `y > 0`.
#[derive(Debug, Clone, Copy)]
pub struct Step;

impl Multifunction for Step {
    fn y_dim(&self) -> usize {
        1
    }

    fn x_dim(&self) -> usize {
        1
    }

    fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        vec![vec![if y[0] <= 0.0 { 0.0 } else { 1.0 }]]
    }

    fn inverse_distance(&self, y: &[f64], x: &[f64], _: NormKind) -> Option<f64> {
        Some(match x[0] {
            0.0 => y[0].max(0.0),
            1.0 => (-y[0]).max(0.0),
            _ => f64::INFINITY,
        })
    }
}

pub fn step() -> SampledMultifunction {
    line("step", Step, 0.0)
}

/// `M(y) = [0, 1]` for `y < 0` and `[0, +∞)` for `y ≥ 0`.
#[derive(Debug, Clone, Copy)]
pub struct Interval;

impl Multifunction for Interval {
    fn y_dim(&self) -> usize {
        1
    }

    fn x_dim(&self) -> usize {
        1
    }

    fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let mut xs = vec![0.0, 0.5, 1.0];
        if y[0] >= 0.0 {
            xs.extend((1..=40).map(|k| 2f64.powi(k)));
        }
        xs.into_iter().map(|v| vec![v]).collect()
    }

    fn distance_to_image(&self, y: &[f64], x: &[f64], _: NormKind) -> f64 {
        let hi = if y[0] < 0.0 { 1.0 } else { f64::INFINITY };
        dist_to_interval(x[0], 0.0, hi)
    }

    fn inverse_distance(&self, y: &[f64], x: &[f64], _: NormKind) -> Option<f64> {
        Some(match x[0] {
            v if v < 0.0 => f64::INFINITY,
            v if v <= 1.0 => 0.0,
            _ => (-y[0]).max(0.0),
        })
    }
}

pub fn interval() -> SampledMultifunction {
    line("interval", Interval, -1.0)
}

/// `M(y) = (−∞, y]` for `y < 0` and `(−∞, 0]` for `y ≥ 0`.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedHalfline;

impl Multifunction for TruncatedHalfline {
    fn y_dim(&self) -> usize {
        1
    }

    fn x_dim(&self) -> usize {
        1
    }

    fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let top = y[0].min(0.0);
        [0.0, 0.5, 1.0, 10.0, 100.0].iter().map(|d| vec![top - d]).collect()
    }

    fn distance_to_image(&self, y: &[f64], x: &[f64], _: NormKind) -> f64 {
        (x[0] - y[0].min(0.0)).max(0.0)
    }

    fn inverse_distance(&self, y: &[f64], x: &[f64], _: NormKind) -> Option<f64> {
        Some(if x[0] > 0.0 {
            f64::INFINITY
        } else {
            (x[0] - y[0]).max(0.0)
        })
    }
}

pub fn truncated_halfline() -> SampledMultifunction {
    line("truncated-halfline", TruncatedHalfline, -0.5)
}

/// `M(y) = {max(0, y − 1)}`: calm with constant 0 near `ȳ = 0`, while the
/// enlargement form needs `κ ≥ ε/(1 + ε)` for every `ε`.
#[derive(Debug, Clone, Copy)]
pub struct ClampedShift;

impl Multifunction for ClampedShift {
    fn y_dim(&self) -> usize {
        1
    }

    fn x_dim(&self) -> usize {
        1
    }

    fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        vec![vec![(y[0] - 1.0).max(0.0)]]
    }

    fn inverse_distance(&self, y: &[f64], x: &[f64], _: NormKind) -> Option<f64> {
        Some(match x[0] {
            v if v < 0.0 => f64::INFINITY,
            0.0 => (y[0] - 1.0).max(0.0),
            v => (y[0] - v - 1.0).abs(),
        })
    }
}

pub fn clamped_shift() -> SampledMultifunction {
    line("clamped-shift", ClampedShift, 0.0)
}

/// `M(y) = {x : (y, x) ∈ P}` for a convex polygon `P` in the plane.
#[derive(Debug, Clone)]
pub struct ConvexGraph {
    /// Hull vertices `(y, x)` in counterclockwise order.
    pub hull: Vec<[f64; 2]>,
}

impl ConvexGraph {
    pub fn from_points(points: &[[f64; 2]]) -> Self {
        ConvexGraph {
            hull: convex_hull(points),
        }
    }

    /// Range of coordinate `1 − c` over `P ∩ {p_c = v}`.
    fn section(&self, c: usize, v: f64) -> Option<(f64, f64)> {
        let o = 1 - c;
        let k = self.hull.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..k {
            let (p, q) = (self.hull[i], self.hull[(i + 1) % k]);
            if (p[c] - v) * (q[c] - v) > 0.0 {
                continue;
            }
            if p[c] == q[c] {
                for w in [p[o], q[o]] {
                    lo = lo.min(w);
                    hi = hi.max(w);
                }
            } else {
                let t = (v - p[c]) / (q[c] - p[c]);
                let w = p[o] + t * (q[o] - p[o]);
                lo = lo.min(w);
                hi = hi.max(w);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    pub fn y_range(&self) -> (f64, f64) {
        let lo = self.hull.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = self.hull.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

impl Multifunction for ConvexGraph {
    fn y_dim(&self) -> usize {
        1
    }

    fn x_dim(&self) -> usize {
        1
    }

    fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        match self.section(0, y[0]) {
            None => Vec::new(),
            Some((lo, hi)) if lo == hi => vec![vec![lo]],
            Some((lo, hi)) => vec![vec![lo], vec![hi]],
        }
    }

    fn distance_to_image(&self, y: &[f64], x: &[f64], _: NormKind) -> f64 {
        self.section(0, y[0])
            .map_or(f64::INFINITY, |(lo, hi)| dist_to_interval(x[0], lo, hi))
    }

    fn inverse_distance(&self, y: &[f64], x: &[f64], _: NormKind) -> Option<f64> {
        Some(
            self.section(1, x[0])
                .map_or(f64::INFINITY, |(lo, hi)| dist_to_interval(y[0], lo, hi)),
        )
    }
}

/// A random polygon with `ȳ` in the middle half of its projection.
pub fn convex_graph(seed: u64) -> SampledMultifunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(3..=9);
    let points: Vec<[f64; 2]> = (0..k)
        .map(|_| [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)])
        .collect();
    let g = ConvexGraph::from_points(&points);
    let (lo, hi) = g.y_range();
    let y_bar = lo + (0.25 + 0.5 * rng.random::<f64>()) * (hi - lo);
    line("convex-graph", g, y_bar)
}

/// Finitely many piecewise affine branches, possibly discontinuous.
#[derive(Debug, Clone)]
pub struct PiecewiseAffine {
    pub branches: Vec<Branch>,
}

/// Sorted breakpoints and one `(slope, intercept)` per piece.
pub type Branch = (Vec<f64>, Vec<(f64, f64)>);

impl Multifunction for PiecewiseAffine {
    fn y_dim(&self) -> usize {
        1
    }

    fn x_dim(&self) -> usize {
        1
    }

    fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let y = y[0];
        self.branches
            .iter()
            .map(|(breaks, pieces)| {
                let (s, c) = pieces[breaks.iter().take_while(|&&b| b < y).count()];
                vec![s * y + c]
            })
            .collect()
    }
}

/// Random branches on `[−1, 1]`; odd seeds put `ȳ` on a breakpoint.
pub fn piecewise_affine(seed: u64) -> SampledMultifunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = rng.random_range(1..=4);
    let branches: Vec<Branch> = (0..nb)
        .map(|_| {
            let mut breaks: Vec<f64> = (0..rng.random_range(0..=3))
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect();
            breaks.sort_by(f64::total_cmp);
            let pieces = (0..=breaks.len())
                .map(|_| (rng.random_range(-3.0..=3.0), rng.random_range(-1.0..=1.0)))
                .collect();
            (breaks, pieces)
        })
        .collect();
    let all_breaks: Vec<f64> = branches.iter().flat_map(|(b, _)| b.iter().copied()).collect();
    let y_bar = if seed % 2 == 1 && !all_breaks.is_empty() {
        all_breaks[rng.random_range(0..all_breaks.len())]
    } else {
        rng.random_range(-0.5..=0.5)
    };
    line("piecewise-affine", PiecewiseAffine { branches }, y_bar)
}

/// The feasible set mapping `b ↦ {x : Ax ≤ b}` of a finite system, sampled
/// through the extreme points of its images.
#[derive(Debug, Clone)]
pub struct FeasibleSetMap {
    pub sys: FiniteSystem,
    pub tol: Tolerances,
}

impl Multifunction for FeasibleSetMap {
    fn y_dim(&self) -> usize {
        self.sys.len()
    }

    fn x_dim(&self) -> usize {
        self.sys.dim()
    }

    fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let Ok(b) = Rhs::new(y.to_vec()) else {
            return Vec::new();
        };
        enumerate_vertices(&self.sys, &b, self.tol.rank, self.tol.subset_cap).unwrap_or_default()
    }

    /// Exact projection; `NaN` if the projection fails, which drops the sample.
    fn distance_to_image(&self, y: &[f64], x: &[f64], _: NormKind) -> f64 {
        let proj = Rhs::new(y.to_vec()).and_then(|b| project_to_polyhedron(&self.sys, &b, x));
        proj.map_or(f64::NAN, |(d, _)| d.value())
    }

    fn inverse_distance(&self, y: &[f64], x: &[f64], y_norm: NormKind) -> Option<f64> {
        let excess: Vec<f64> = (0..self.sys.len())
            .map(|i| (self.sys.dot(i, x) - y[i]).max(0.0))
            .collect();
        Some(y_norm.norm(&excess))
    }
}

pub fn feasible_set_map(sys: FiniteSystem, b: &Rhs) -> SampledMultifunction {
    let x_norm = sys.norm();
    let map = FeasibleSetMap {
        sys,
        tol: Tolerances::default(),
    };
    SampledMultifunction::new("feasible-set", Arc::new(map), b.values().to_vec()).with_norms(NormKind::LInf, x_norm)
}
