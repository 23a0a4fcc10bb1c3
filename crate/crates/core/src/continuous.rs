//! Semi-infinite systems indexed by real intervals plus finitely many extra rows.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::global::{hof_global, GlobalHoffmanReport};
use crate::modulus::ModulusValue;
use crate::norm::NormKind;
use crate::sampling::OutsideOracle;
use crate::system::{dot, FiniteSystem, Rhs, Row, Tolerances};

/// Closed-form coefficient families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinFamily {
    /// `a_t = t(cos t, sin t)`, `b_t = t`.
    RadialSpiral,
    /// `a_t = (1 + t cos t, t sin t)`, `b_t = 0`.
    ShiftedSpiral,
}

/// `t ↦ (a_t, b_t)` on one interval.
#[derive(Debug, Clone, PartialEq)]
pub enum SegmentFn {
    Builtin(BuiltinFamily),
    /// Samples `(t, a_t, b_t)` sorted by `t`, linearly interpolated.
    Tabulated(Vec<(f64, Vec<f64>, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub func: SegmentFn,
}

impl Segment {
    pub fn eval(&self, t: f64) -> (Vec<f64>, f64) {
        match &self.func {
            SegmentFn::Builtin(BuiltinFamily::RadialSpiral) => (vec![t * t.cos(), t * t.sin()], t),
            SegmentFn::Builtin(BuiltinFamily::ShiftedSpiral) => (vec![1.0 + t * t.cos(), t * t.sin()], 0.0),
            SegmentFn::Tabulated(samples) => interpolate(samples, t),
        }
    }
}

fn interpolate(samples: &[(f64, Vec<f64>, f64)], t: f64) -> (Vec<f64>, f64) {
    let k = samples.partition_point(|(s, _, _)| *s <= t);
    if k == 0 {
        return (samples[0].1.clone(), samples[0].2);
    }
    if k == samples.len() {
        let last = &samples[k - 1];
        return (last.1.clone(), last.2);
    }
    let (t0, a0, b0) = &samples[k - 1];
    let (t1, a1, b1) = &samples[k];
    let w = (t - t0) / (t1 - t0);
    let a = a0.iter().zip(a1).map(|(p, q)| p + w * (q - p)).collect();
    (a, b0 + w * (b1 - b0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtraRow {
    pub label: String,
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSystem {
    pub n: usize,
    pub segments: Vec<Segment>,
    pub extra: Vec<ExtraRow>,
    pub norm: NormKind,
}

/// Uniform grid with both endpoints always included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub step: f64,
}

impl GridSpec {
    pub fn new(step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidSystem(format!("grid step must be positive, got {step}")));
        }
        Ok(GridSpec { step })
    }

    /// `lo, lo + step, …` strictly below `hi`, then `hi`.
    pub fn nodes(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let t = lo + k as f64 * self.step;
            if t >= hi - 1e-12 * (hi - lo) {
                break;
            }
            out.push(t);
            k += 1;
        }
        out.push(hi);
        out
    }
}

impl ContinuousSystem {
    pub fn new(n: usize, segments: Vec<Segment>, extra: Vec<ExtraRow>, norm: NormKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSystem("dimension must be positive".into()));
        }
        if segments.is_empty() && extra.is_empty() {
            return Err(Error::InvalidSystem("no index set".into()));
        }
        for s in &segments {
            if !(s.lo.is_finite() && s.hi.is_finite() && s.lo < s.hi) {
                return Err(Error::InvalidSystem(format!("bad interval [{}, {}]", s.lo, s.hi)));
            }
            if let SegmentFn::Tabulated(samples) = &s.func {
                if samples.len() < 2 {
                    return Err(Error::InvalidSystem("a tabulated segment needs two samples".into()));
                }
                if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::InvalidSystem("sample abscissae must increase".into()));
                }
                if samples[0].0 > s.lo || samples[samples.len() - 1].0 < s.hi {
                    return Err(Error::InvalidSystem("samples must cover the interval".into()));
                }
                for (t, a, b) in samples {
                    if a.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: a.len(),
                        });
                    }
                    if !t.is_finite() || !b.is_finite() || a.iter().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidSystem("non-finite sample".into()));
                    }
                }
            } else if n != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: n });
            }
        }
        for e in &extra {
            if e.a.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.a.len(),
                });
            }
        }
        Ok(ContinuousSystem {
            n,
            segments,
            extra,
            norm,
        })
    }

    fn check_grid(&self, g: &GridSpec) -> Result<()> {
        for s in &self.segments {
            if g.step > s.hi - s.lo {
                return Err(Error::InvalidSystem(format!(
                    "grid step {} exceeds interval length {}",
                    g.step,
                    s.hi - s.lo
                )));
            }
        }
        Ok(())
    }

    fn node_label(&self, seg: usize, t: f64) -> String {
        if self.segments.len() == 1 {
            format!("t={t}")
        } else {
            format!("s{seg}:t={t}")
        }
    }

    /// The finite subsystem at the grid nodes plus all extra rows.
    pub fn discretize(&self, g: &GridSpec) -> Result<(FiniteSystem, Rhs)> {
        self.check_grid(g)?;
        let mut rows = Vec::new();
        let mut b = Vec::new();
        for (k, s) in self.segments.iter().enumerate() {
            for t in g.nodes(s.lo, s.hi) {
                let (a, bt) = s.eval(t);
                rows.push(Row::new(self.node_label(k, t), a));
                b.push(bt);
            }
        }
        for e in &self.extra {
            rows.push(Row::new(e.label.clone(), e.a.clone()));
            b.push(e.b);
        }
        Ok((FiniteSystem::new(self.n, rows, self.norm)?, Rhs::new(b)?))
    }

    /// `sup_t (a_t'x − b̄_t)` evaluated on a grid of the given step.
    pub fn residual_on_grid(&self, x: &[f64], step: f64) -> Result<f64> {
        Ok(self.argmax_on_grid(x, step, 0.0)?.0)
    }

    /// Maximum slack on the grid and the gradients within `tol` of it.
    fn argmax_on_grid(&self, x: &[f64], step: f64, tol_active: f64) -> Result<(f64, Vec<Vec<f64>>)> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let g = GridSpec::new(step)?;
        let mut slacks: Vec<(f64, Vec<f64>)> = Vec::new();
        for s in &self.segments {
            for t in g.nodes(s.lo, s.hi) {
                let (a, bt) = s.eval(t);
                slacks.push((dot(&a, x) - bt, a));
            }
        }
        for e in &self.extra {
            slacks.push((dot(&e.a, x) - e.b, e.a.clone()));
        }
        let top = slacks.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
        let bmax = slacks.iter().map(|(s, a)| (s - dot(a, x)).abs()).fold(0.0, f64::max);
        let threshold = tol_active * 1.0_f64.max(bmax).max(self.norm.norm(x));
        let grads = slacks
            .into_iter()
            .filter(|(s, _)| top - s <= threshold)
            .map(|(_, a)| a)
            .collect();
        Ok((top, grads))
    }

    /// Outside-point oracle evaluating the supremum on a fine grid.
    pub fn fine_oracle(&self, step: f64) -> FineGridOracle<'_> {
        FineGridOracle { csys: self, step }
    }
}

/// Residual and argmax set of a continuous system on a fine grid.
#[derive(Debug, Clone, Copy)]
pub struct FineGridOracle<'a> {
    csys: &'a ContinuousSystem,
    step: f64,
}

impl OutsideOracle for FineGridOracle<'_> {
    fn dim(&self) -> usize {
        self.csys.n
    }

    fn norm(&self) -> NormKind {
        self.csys.norm
    }

    fn residual_at(&self, x: &[f64]) -> Result<f64> {
        self.csys.residual_on_grid(x, self.step)
    }

    fn argmax_gradients(&self, x: &[f64], tol_active: f64) -> Result<Vec<Vec<f64>>> {
        Ok(self.csys.argmax_on_grid(x, self.step, tol_active)?.1)
    }
}

/// Global constant of the grid discretization; a lower approximation of the
/// continuous supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValue {
    pub step: f64,
    pub rows: usize,
    pub value: ModulusValue,
    pub report: GlobalHoffmanReport,
    pub system: FiniteSystem,
}

pub fn hof_global_grid(csys: &ContinuousSystem, grid_step: f64, tol: &Tolerances) -> Result<GridValue> {
    let (sys, _) = csys.discretize(&GridSpec::new(grid_step)?)?;
    let report = hof_global(&sys, tol)?;
    Ok(GridValue {
        step: grid_step,
        rows: sys.len(),
        value: report.value,
        report,
        system: sys,
    })
}

pub const BUILTIN_NAMES: [&str; 2] = ["example-4-3", "example-4-9"];

/// The two worked semi-infinite systems shipped with the library.
///
/// * `example-4-3`: `t cos t·x1 + t sin t·x2 ≤ t` on `[0, π]`, plus
///   `x1 ≤ 1` (label `4`) and `−x1 − x2 ≤ 1` (label `5`).
/// * `example-4-9`: `(1 + t cos t)x1 + (t sin t)x2 ≤ 0` on `[0, π/2]`.
pub fn builtin(name: &str) -> Result<ContinuousSystem> {
    match name {
        "example-4-3" => ContinuousSystem::new(
            2,
            vec![Segment {
                lo: 0.0,
                hi: PI,
                func: SegmentFn::Builtin(BuiltinFamily::RadialSpiral),
            }],
            vec![
                ExtraRow {
                    label: "4".into(),
                    a: vec![1.0, 0.0],
                    b: 1.0,
                },
                ExtraRow {
                    label: "5".into(),
                    a: vec![-1.0, -1.0],
                    b: 1.0,
                },
            ],
            NormKind::L2,
        ),
        "example-4-9" => ContinuousSystem::new(
            2,
            vec![Segment {
                lo: 0.0,
                hi: FRAC_PI_2,
                func: SegmentFn::Builtin(BuiltinFamily::ShiftedSpiral),
            }],
            Vec::new(),
            NormKind::L2,
        ),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}
