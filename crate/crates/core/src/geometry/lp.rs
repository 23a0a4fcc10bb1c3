//! Dense two-phase primal simplex with Bland's pivoting rule.
//!
//! Problems are stated as
//!
//! ```text
//! maximize  c'z
//! s.t.      e_i'z  = f_i
//!           g_j'z <= h_j
//!           l_k <= z_k <= u_k   (each bound optional)
//! ```
//!
//! and converted internally to `max c'w, Aw = b, w >= 0` with `b >= 0`.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    n: usize,
    pub objective: Vec<f64>,
    pub equalities: Vec<(Vec<f64>, f64)>,
    pub inequalities: Vec<(Vec<f64>, f64)>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub point: Vec<f64>,
    /// Dual values (equalities first, then inequalities) when optimal, a
    /// recession ray when unbounded, Farkas multipliers when infeasible.
    pub certificate: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl LpProblem {
    /// `n` free variables, zero objective, no constraints.
    pub fn new(n: usize) -> Self {
        LpProblem {
            n,
            objective: vec![0.0; n],
            equalities: Vec::new(),
            inequalities: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn maximize(mut self, c: Vec<f64>) -> Self {
        self.objective = c;
        self
    }

    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.equalities.push((row, rhs));
        self
    }

    pub fn le(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.inequalities.push((row, rhs));
        self
    }

    pub fn ge(self, row: Vec<f64>, rhs: f64) -> Self {
        let neg = row.into_iter().map(|v| -v).collect();
        self.le(neg, -rhs)
    }

    pub fn lower_bound(mut self, j: usize, v: f64) -> Self {
        self.lower[j] = Some(v);
        self
    }

    pub fn upper_bound(mut self, j: usize, v: f64) -> Self {
        self.upper[j] = Some(v);
        self
    }

    pub fn nonnegative(mut self, vars: std::ops::Range<usize>) -> Self {
        for j in vars {
            self.lower[j] = Some(0.0);
        }
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad_dim = |len: usize| {
            (len != n).then_some(Error::DimensionMismatch {
                expected: n,
                found: len,
            })
        };
        if let Some(e) = bad_dim(self.objective.len()) {
            return Err(e);
        }
        for (row, rhs) in self.equalities.iter().chain(&self.inequalities) {
            if let Some(e) = bad_dim(row.len()) {
                return Err(e);
            }
            if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSystem("LP data must be finite".into()));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem("LP objective must be finite".into()));
        }
        for j in 0..n {
            if let (Some(l), Some(u)) = (self.lower[j], self.upper[j]) {
                if !(l.is_finite() && u.is_finite()) {
                    return Err(Error::InvalidSystem("LP bounds must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Largest violation of a constraint or bound at `z`.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let dot = |r: &[f64]| r.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
        let mut worst: f64 = 0.0;
        for (row, rhs) in &self.equalities {
            worst = worst.max((dot(row) - rhs).abs());
        }
        for (row, rhs) in &self.inequalities {
            worst = worst.max(dot(row) - rhs);
        }
        for (j, &zj) in z.iter().enumerate() {
            if let Some(l) = self.lower[j] {
                worst = worst.max(l - zj);
            }
            if let Some(u) = self.upper[j] {
                worst = worst.max(zj - u);
            }
        }
        worst
    }
}

/// How an original variable is recovered from standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// z = offset + w_col
    Shift { col: usize, offset: f64 },
    /// z = offset − w_col
    Reflect { col: usize, offset: f64 },
    /// z = w_pos − w_neg
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// true for rows that carry a slack (≤ rows).
    has_slack: Vec<bool>,
    cost: Vec<f64>,
    cost_offset: f64,
    maps: Vec<VarMap>,
    num_struct: usize,
}

fn to_standard(p: &LpProblem) -> StandardForm {
    let mut maps = Vec::with_capacity(p.n);
    let mut ncols = 0;
    for j in 0..p.n {
        let m = match (p.lower[j], p.upper[j]) {
            (Some(l), _) => VarMap::Shift { col: ncols, offset: l },
            (None, Some(u)) => VarMap::Reflect { col: ncols, offset: u },
            (None, None) => {
                ncols += 1;
                VarMap::Split {
                    pos: ncols - 1,
                    neg: ncols,
                }
            }
        };
        ncols += 1;
        maps.push(m);
    }

    let expand = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; ncols];
        let mut b = rhs;
        for (j, &a) in row.iter().enumerate() {
            match maps[j] {
                VarMap::Shift { col, offset } => {
                    out[col] += a;
                    b -= a * offset;
                }
                VarMap::Reflect { col, offset } => {
                    out[col] -= a;
                    b -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    out[pos] += a;
                    out[neg] -= a;
                }
            }
        }
        (out, b)
    };

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut has_slack = Vec::new();
    for (row, b) in &p.equalities {
        let (r, b) = expand(row, *b);
        rows.push(r);
        rhs.push(b);
        has_slack.push(false);
    }
    for (row, b) in &p.inequalities {
        let (r, b) = expand(row, *b);
        rows.push(r);
        rhs.push(b);
        has_slack.push(true);
    }
    for (j, map) in maps.iter().enumerate() {
        if let (Some(l), Some(u)) = (p.lower[j], p.upper[j]) {
            if let VarMap::Shift { col, .. } = *map {
                let mut r = vec![0.0; ncols];
                r[col] = 1.0;
                rows.push(r);
                rhs.push(u - l);
                has_slack.push(true);
            }
        }
    }

    let (cost, neg_offset) = expand(&p.objective, 0.0);
    StandardForm {
        rows,
        rhs,
        has_slack,
        cost,
        cost_offset: -neg_offset,
        maps,
        num_struct: ncols,
    }
}

/// Dense tableau. Column layout: structural | slacks | artificials | rhs.
struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    /// Reduced-cost row `z_j − c_j` followed by the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Column holding the initial identity entry of each row.
    identity_col: Vec<usize>,
    /// Sign applied to each row so that its rhs is nonnegative.
    row_sign: Vec<f64>,
    first_artificial: usize,
    iterations: usize,
    max_iterations: usize,
}

enum PivotOutcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn build(sf: &StandardForm) -> Tableau {
        let m = sf.rows.len();
        let ns = sf.num_struct;
        let nslack = sf.has_slack.iter().filter(|&&s| s).count();
        let mut row_sign = vec![1.0; m];
        let mut needs_art = vec![false; m];
        for i in 0..m {
            if sf.rhs[i] < 0.0 {
                row_sign[i] = -1.0;
            }
            needs_art[i] = !sf.has_slack[i] || row_sign[i] < 0.0;
        }
        let nart = needs_art.iter().filter(|&&a| a).count();
        let width = ns + nslack + nart + 1;
        let first_artificial = ns + nslack;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut identity_col = vec![0; m];
        let mut slack_idx = ns;
        let mut art_idx = first_artificial;
        for i in 0..m {
            let s = row_sign[i];
            let row = &mut data[i * width..(i + 1) * width];
            for (dst, &a) in row.iter_mut().zip(&sf.rows[i]) {
                *dst = s * a;
            }
            row[width - 1] = s * sf.rhs[i];
            if sf.has_slack[i] {
                row[slack_idx] = s;
                if !needs_art[i] {
                    basis[i] = slack_idx;
                    identity_col[i] = slack_idx;
                }
                slack_idx += 1;
            }
            if needs_art[i] {
                row[art_idx] = 1.0;
                basis[i] = art_idx;
                identity_col[i] = art_idx;
                art_idx += 1;
            }
        }
        let max_iterations = 50_000 + 200 * (m + width);
        Tableau {
            m,
            width,
            data,
            obj: vec![0.0; width],
            basis,
            identity_col,
            row_sign,
            first_artificial,
            iterations: 0,
            max_iterations,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    /// Installs the cost vector (indexed by column) and prices out the basis.
    fn set_cost(&mut self, cost: &[f64]) {
        let w = self.width;
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        for (j, &c) in cost.iter().enumerate() {
            self.obj[j] = -c;
        }
        for i in 0..self.m {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    self.obj[j] += cb * self.data[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        for j in 0..w {
            self.data[r * w + j] /= p;
        }
        self.data[r * w + c] = 1.0;
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for (x, &y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[c] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<PivotOutcome> {
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::NumericalFailure(format!(
                    "simplex exceeded {} iterations",
                    self.max_iterations
                )));
            }
            let Some(c) = (0..allowed).find(|&j| self.obj[j] < -COST_EPS) else {
                return Ok(PivotOutcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * lr.abs().max(1.0);
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(PivotOutcome::Unbounded(c));
            };
            self.pivot(r, c);
            self.iterations += 1;
        }
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn expel_artificials(&mut self) {
        for i in 0..self.m {
            if self.basis[i] < self.first_artificial {
                continue;
            }
            let scale = (0..self.first_artificial)
                .map(|j| self.at(i, j).abs())
                .fold(0.0, f64::max);
            if let Some(c) = (0..self.first_artificial).find(|&j| self.at(i, j).abs() > PIVOT_EPS * scale.max(1.0)) {
                self.pivot(i, c);
            }
        }
    }

    /// Row multipliers `c_B B⁻¹` in the original row signs.
    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| {
                let c = self.identity_col[i];
                self.row_sign[i] * (self.obj[c] + cost[c])
            })
            .collect()
    }

    fn primal(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.width - 1];
        for i in 0..self.m {
            w[self.basis[i]] = self.rhs(i);
        }
        w
    }
}

fn recover(maps: &[VarMap], w: &[f64], with_offset: bool) -> Vec<f64> {
    maps.iter()
        .map(|m| match *m {
            VarMap::Shift { col, offset } => w[col] + if with_offset { offset } else { 0.0 },
            VarMap::Reflect { col, offset } => (if with_offset { offset } else { 0.0 }) - w[col],
            VarMap::Split { pos, neg } => w[pos] - w[neg],
        })
        .collect()
}

/// Solves `p`. Deterministic for fixed input.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;
    let sf = to_standard(p);
    let mut tab = Tableau::build(&sf);
    let scale = sf.rhs.iter().fold(1.0_f64, |acc, b| acc.max(b.abs()));

    // Phase 1: maximize −Σ artificials.
    if tab.first_artificial < tab.width - 1 {
        let mut cost = vec![0.0; tab.width - 1];
        for c in cost.iter_mut().skip(tab.first_artificial) {
            *c = -1.0;
        }
        tab.set_cost(&cost);
        tab.optimize(tab.width - 1)?;
        let infeas = -tab.obj[tab.width - 1];
        if infeas > 1e-9 * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                point: Vec::new(),
                certificate: tab.duals(&cost),
            });
        }
        tab.expel_artificials();
    }

    // Phase 2: artificials may not re-enter.
    let mut cost = vec![0.0; tab.width - 1];
    cost[..sf.num_struct].copy_from_slice(&sf.cost);
    tab.set_cost(&cost);
    match tab.optimize(tab.first_artificial)? {
        PivotOutcome::Unbounded(c) => {
            let mut ray = vec![0.0; tab.width - 1];
            ray[c] = 1.0;
            for i in 0..tab.m {
                ray[tab.basis[i]] = -tab.at(i, c);
            }
            Ok(LpSolution {
                status: LpStatus::Unbounded,
                value: f64::INFINITY,
                point: recover(&sf.maps, &tab.primal(), true),
                certificate: recover(&sf.maps, &ray, false),
            })
        }
        PivotOutcome::Optimal => {
            let z = recover(&sf.maps, &tab.primal(), true);
            let violation = p.max_violation(&z);
            let zscale = z.iter().fold(scale, |acc, v| acc.max(v.abs()));
            if violation > 1e-7 * zscale {
                return Err(Error::NumericalFailure(format!(
                    "simplex returned a point violating constraints by {violation:e}"
                )));
            }
            let value = tab.obj[tab.width - 1] + sf.cost_offset;
            let mut duals = tab.duals(&cost);
            duals.truncate(p.equalities.len() + p.inequalities.len());
            Ok(LpSolution {
                status: LpStatus::Optimal,
                value,
                point: z,
                certificate: duals,
            })
        }
    }
}
