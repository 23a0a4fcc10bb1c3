//! Seeded point samplers and outside-point subdifferential estimators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::linalg::rowspace_of;
use crate::geometry::{dual_distance_to_hull, enumerate_vertices, PolyhedronProjector};
use crate::modulus::ModulusValue;
use crate::norm::NormKind;
use crate::system::{argmax_set, dot, residual, FiniteSystem, Rhs, Tolerances};

/// A residual function `f(x) = sup_t (a_t'x − b_t)` together with its argmax gradients.
pub trait OutsideOracle: Sync {
    fn dim(&self) -> usize;
    fn norm(&self) -> NormKind;
    fn residual_at(&self, x: &[f64]) -> Result<f64>;
    /// `{a_t : t ∈ J_b(x)}`.
    fn argmax_gradients(&self, x: &[f64], tol_active: f64) -> Result<Vec<Vec<f64>>>;
}

/// A finite system paired with a right-hand side.
#[derive(Debug, Clone, Copy)]
pub struct FiniteOracle<'a> {
    pub sys: &'a FiniteSystem,
    pub b: &'a Rhs,
}

impl OutsideOracle for FiniteOracle<'_> {
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn norm(&self) -> NormKind {
        self.sys.norm()
    }

    fn residual_at(&self, x: &[f64]) -> Result<f64> {
        residual(self.sys, self.b, x)
    }

    fn argmax_gradients(&self, x: &[f64], tol_active: f64) -> Result<Vec<Vec<f64>>> {
        Ok(argmax_set(self.sys, self.b, x, tol_active)?.points(self.sys))
    }
}

/// Running supremum of `d_*(0, ∂f(x))⁻¹` over sample points with `f(x) > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingTrace {
    pub estimate: ModulusValue,
    /// `(sample index, running maximum)` after each used sample.
    pub running: Vec<(usize, ModulusValue)>,
    pub used: usize,
    pub skipped: usize,
}

impl SamplingTrace {
    /// The estimate, or `EmptySampler` when no sample had positive residual.
    pub fn require_samples(&self) -> Result<ModulusValue> {
        if self.used == 0 {
            Err(Error::EmptySampler)
        } else {
            Ok(self.estimate)
        }
    }
}

/// Evaluates `d_*(0, conv{a_t, t ∈ J_b(x)})⁻¹` at every sample with positive residual.
pub fn subdifferential_sup<O: OutsideOracle>(
    oracle: &O,
    samples: &[Vec<f64>],
    tol_active: f64,
) -> Result<SamplingTrace> {
    let evaluated: Vec<Option<ModulusValue>> = samples
        .par_iter()
        .map(|x| -> Result<Option<ModulusValue>> {
            if oracle.residual_at(x)? <= 0.0 {
                return Ok(None);
            }
            let grads = oracle.argmax_gradients(x, tol_active)?;
            Ok(Some(dual_distance_to_hull(&grads, oracle.norm())?.inverse()))
        })
        .collect::<Result<_>>()?;
    let mut running = Vec::new();
    let mut estimate = ModulusValue::ZERO;
    let mut skipped = 0;
    for (k, v) in evaluated.into_iter().enumerate() {
        match v {
            Some(v) => {
                estimate = estimate.max(v);
                running.push((k, estimate));
            }
            None => skipped += 1,
        }
    }
    Ok(SamplingTrace {
        estimate,
        used: running.len(),
        running,
        skipped,
    })
}

/// Seeded point generators.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    /// Uniform in the sup-norm ball `center + [−radius, radius]^n`.
    UniformBox { center: Vec<f64>, radius: f64 },
    /// A uniformly chosen center plus a uniform sup-norm perturbation.
    VertexNeighborhoods { centers: Vec<Vec<f64>>, radius: f64 },
    /// `center + s·u` with `u` a random L2-unit direction, one point per scale.
    Radial { center: Vec<f64>, scales: Vec<f64> },
    /// A fixed list; `count` is ignored.
    Fixed(Vec<Vec<f64>>),
}

fn unit_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = NormKind::L2.norm(&u);
        if norm > 1e-3 && norm <= 1.0 {
            return u.into_iter().map(|v| v / norm).collect();
        }
    }
}

impl Sampler {
    pub fn draw(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cube = |rng: &mut ChaCha8Rng, c: &[f64], r: f64| -> Vec<f64> {
            c.iter().map(|v| v + rng.random_range(-r..=r)).collect()
        };
        Ok(match self {
            Sampler::UniformBox { center, radius } => (0..count).map(|_| cube(&mut rng, center, *radius)).collect(),
            Sampler::VertexNeighborhoods { centers, radius } => {
                if centers.is_empty() {
                    return Err(Error::EmptySampler);
                }
                (0..count)
                    .map(|_| {
                        let c = &centers[rng.random_range(0..centers.len())];
                        cube(&mut rng, c, *radius)
                    })
                    .collect()
            }
            Sampler::Radial { center, scales } => scales
                .iter()
                .map(|s| {
                    let u = unit_direction(&mut rng, center.len());
                    center.iter().zip(&u).map(|(c, ui)| c + s * ui).collect()
                })
                .collect(),
            Sampler::Fixed(points) => points.clone(),
        })
    }
}

/// Random points on the boundary of a nonempty `F(b)`.
///
/// Each point starts from a convex combination of extreme points, plus a
/// recession direction and a kernel component, and is pushed along a random
/// ray until the first constraint becomes tight.
#[derive(Debug, Clone)]
pub struct BoundarySampler<'a> {
    sys: &'a FiniteSystem,
    b: &'a Rhs,
    vertices: Vec<Vec<f64>>,
    basis: Vec<Vec<f64>>,
}

impl<'a> BoundarySampler<'a> {
    pub fn new(sys: &'a FiniteSystem, b: &'a Rhs, tol: &Tolerances) -> Result<Self> {
        let vertices = enumerate_vertices(sys, b, tol.rank, tol.subset_cap)?;
        let rows: Vec<Vec<f64>> = sys.rows().iter().map(|r| r.a.clone()).collect();
        let (r, q) = rowspace_of(&rows, sys.dim(), tol.rank);
        let basis = (0..r).map(|c| q.column(c).iter().copied().collect()).collect();
        Ok(BoundarySampler {
            sys,
            b,
            vertices,
            basis,
        })
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    fn to_rowspace(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for q in &self.basis {
            let c = dot(q, u);
            for (o, qi) in out.iter_mut().zip(q) {
                *o += c * qi;
            }
        }
        out
    }

    /// `count` boundary points, extreme points first; empty when the boundary
    /// is empty (all rows zero).
    pub fn draw(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if self.basis.is_empty() {
            return Ok(Vec::new());
        }
        let n = self.sys.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zero = Rhs::new(vec![0.0; self.sys.len()])?;
        let l2 = self.sys.with_norm(NormKind::L2);
        let cone = PolyhedronProjector::new(&l2, &zero)?;
        // extreme points lie on the boundary and carry the largest calmness values
        let mut out: Vec<Vec<f64>> = self.vertices.iter().take(count).cloned().collect();
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > 100 * count + 100 {
                return Err(Error::NumericalFailure("boundary sampler stalled".into()));
            }
            let mut w: Vec<f64> = self.vertices.iter().map(|_| rng.random::<f64>()).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
            let mut p = vec![0.0; n];
            for (v, wi) in self.vertices.iter().zip(&w) {
                for (pj, vj) in p.iter_mut().zip(v) {
                    *pj += wi * vj;
                }
            }
            let u = unit_direction(&mut rng, n);
            let (_, d) = cone.project(&self.to_rowspace(&u))?;
            let kernel: Vec<f64> = {
                let k = unit_direction(&mut rng, n);
                let kr = self.to_rowspace(&k);
                k.iter().zip(&kr).map(|(a, b)| a - b).collect()
            };
            let sd = rng.random_range(0.0..2.0);
            let sk = rng.random_range(0.0..2.0);
            for j in 0..n {
                p[j] += sd * d[j] + sk * kernel[j];
            }

            let dir = unit_direction(&mut rng, n);
            for sign in [1.0, -1.0] {
                let dir: Vec<f64> = dir.iter().map(|v| sign * v).collect();
                let mut alpha = f64::INFINITY;
                for (i, row) in self.sys.rows().iter().enumerate() {
                    let ad = dot(&row.a, &dir);
                    if ad > 1e-12 {
                        alpha = alpha.min(((self.b[i] - dot(&row.a, &p)) / ad).max(0.0));
                    }
                }
                if alpha.is_finite() {
                    out.push(p.iter().zip(&dir).map(|(pj, dj)| pj + alpha * dj).collect());
                    break;
                }
            }
        }
        Ok(out)
    }
}
