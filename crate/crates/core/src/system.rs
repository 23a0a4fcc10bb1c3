//! Finite linear inequality systems `a_t'x ≤ b_t` and their residual functions.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::modulus::ModulusValue;
use crate::norm::NormKind;

/// Numerical thresholds shared by all computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance for active / argmax index detection.
    pub active: f64,
    /// Absolute slack a strict inequality must exceed to count as strict.
    pub strict: f64,
    /// Relative singular-value threshold for numerical rank.
    pub rank: f64,
    /// Cap on the number of enumerated subsets.
    pub subset_cap: u128,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            active: 1e-9,
            strict: 1e-8,
            rank: 1e-10,
            subset_cap: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub a: Vec<f64>,
}

impl Row {
    pub fn new(label: impl Into<String>, a: Vec<f64>) -> Self {
        Row { label: label.into(), a }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&v| v == 0.0)
    }
}

/// The left-hand side `{a_t}` of a finite system together with the norm on `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSystem {
    n: usize,
    rows: Vec<Row>,
    norm: NormKind,
}

impl FiniteSystem {
    pub fn new(n: usize, rows: Vec<Row>, norm: NormKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSystem("dimension must be positive".into()));
        }
        if rows.is_empty() {
            return Err(Error::InvalidSystem("at least one row is required".into()));
        }
        let mut seen = HashSet::with_capacity(rows.len());
        for row in &rows {
            if row.a.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.a.len(),
                });
            }
            if row.a.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSystem(format!(
                    "row `{}` has a non-finite entry",
                    row.label
                )));
            }
            if !seen.insert(row.label.as_str()) {
                return Err(Error::InvalidSystem(format!("duplicate row label `{}`", row.label)));
            }
        }
        Ok(FiniteSystem { n, rows, norm })
    }

    /// Builds a system with labels `1..=m`.
    pub fn from_rows(rows: Vec<Vec<f64>>, norm: NormKind) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, a)| Row::new((i + 1).to_string(), a))
            .collect();
        FiniteSystem::new(n, rows, norm)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i].a
    }

    pub fn label(&self, i: usize) -> &str {
        &self.rows[i].label
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.rows.iter().position(|r| r.label == label)
    }

    pub fn with_norm(&self, norm: NormKind) -> FiniteSystem {
        FiniteSystem { norm, ..self.clone() }
    }

    /// The subsystem formed by `indices` (labels preserved).
    pub fn subsystem(&self, indices: &[usize]) -> Result<FiniteSystem> {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        FiniteSystem::new(self.n, rows, self.norm)
    }

    pub fn dot(&self, i: usize, x: &[f64]) -> f64 {
        dot(&self.rows[i].a, x)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    fn check_rhs(&self, b: &Rhs) -> Result<()> {
        if b.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: b.len(),
            });
        }
        Ok(())
    }

    /// `a_t'x − b_t` for every row.
    pub fn slacks(&self, b: &Rhs, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.check_rhs(b)?;
        Ok(self
            .rows
            .iter()
            .zip(b.values())
            .map(|(row, bt)| dot(&row.a, x) - bt)
            .collect())
    }

    fn scale(&self, b: &Rhs, x: &[f64]) -> f64 {
        1.0_f64.max(b.sup_norm()).max(self.norm.norm(x))
    }
}

/// A right-hand side `b ∈ R^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs(Vec<f64>);

impl Rhs {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem("right-hand side has a non-finite entry".into()));
        }
        Ok(Rhs(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        NormKind::LInf.norm(&self.0)
    }
}

impl std::ops::Index<usize> for Rhs {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A subset of row indices, optionally carrying a witness vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IndexSubset {
    indices: Vec<usize>,
    pub certificate: Option<Vec<f64>>,
}

impl IndexSubset {
    /// Sorts and deduplicates `indices`.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexSubset {
            indices,
            certificate: None,
        }
    }

    pub fn empty() -> Self {
        IndexSubset::default()
    }

    pub fn with_certificate(mut self, certificate: Vec<f64>) -> Self {
        self.certificate = Some(certificate);
        self
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSubset) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn labels<'a>(&self, sys: &'a FiniteSystem) -> Vec<&'a str> {
        self.indices.iter().map(|&i| sys.label(i)).collect()
    }

    pub fn points(&self, sys: &FiniteSystem) -> Vec<Vec<f64>> {
        self.indices.iter().map(|&i| sys.row(i).to_vec()).collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `f_b(x) = max_t (a_t'x − b_t)`.
pub fn residual(sys: &FiniteSystem, b: &Rhs, x: &[f64]) -> Result<f64> {
    Ok(sys.slacks(b, x)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// `[f_b(x)]_+`, the sup-norm distance from `b` to `F⁻¹(x)`.
pub fn rhs_distance(sys: &FiniteSystem, b: &Rhs, x: &[f64]) -> Result<ModulusValue> {
    Ok(ModulusValue::finite(residual(sys, b, x)?.max(0.0)))
}

/// Indices active at a feasible `x`: `|a_t'x − b_t| ≤ tol·max(1, ‖b‖_∞, ‖x‖)`.
pub fn active_set(sys: &FiniteSystem, b: &Rhs, x: &[f64], tol_active: f64) -> Result<IndexSubset> {
    let slacks = sys.slacks(b, x)?;
    let threshold = tol_active * sys.scale(b, x);
    let worst = slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if worst > threshold {
        return Err(Error::InfeasiblePoint {
            residual: worst,
            tolerance: threshold,
        });
    }
    Ok(IndexSubset::new(
        slacks
            .iter()
            .enumerate()
            .filter(|(_, s)| s.abs() <= threshold)
            .map(|(i, _)| i)
            .collect(),
    ))
}

/// `J_b(x)`: indices attaining the residual maximum within tolerance. Never empty.
pub fn argmax_set(sys: &FiniteSystem, b: &Rhs, x: &[f64], tol_active: f64) -> Result<IndexSubset> {
    let slacks = sys.slacks(b, x)?;
    let threshold = tol_active * sys.scale(b, x);
    let top = slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(IndexSubset::new(
        slacks
            .iter()
            .enumerate()
            .filter(|(_, s)| top - **s <= threshold)
            .map(|(i, _)| i)
            .collect(),
    ))
}


#[cfg(test)]
mod tests {
    use super::fixtures::square;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn residual_on_square() {
        let (sys, b) = square(NormKind::L2);
        assert_eq!(residual(&sys, &b, &[2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(residual(&sys, &b, &[0.0, 0.0]).unwrap(), -1.0);
    }

    #[test]
    fn rhs_distance_examples() {
        let (sys, b) = square(NormKind::L2);
        assert_eq!(rhs_distance(&sys, &b, &[2.0, 2.0]).unwrap(), 1.0.into());
        assert_eq!(rhs_distance(&sys, &b, &[0.0, 0.0]).unwrap(), ModulusValue::ZERO);
        let half = FiniteSystem::from_rows(vec![vec![1.0]], NormKind::L2).unwrap();
        let b0 = Rhs::new(vec![0.0]).unwrap();
        assert_eq!(rhs_distance(&half, &b0, &[3.0]).unwrap(), 3.0.into());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let (sys, b) = square(NormKind::L2);
        assert!(matches!(
            residual(&sys, &b, &[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        let short = Rhs::new(vec![1.0]).unwrap();
        assert!(residual(&sys, &short, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn active_set_examples() {
        let (sys, b) = square(NormKind::L2);
        let tol = Tolerances::default().active;
        assert_eq!(active_set(&sys, &b, &[1.0, 1.0], tol).unwrap().indices(), &[0, 2]);
        assert!(active_set(&sys, &b, &[0.0, 0.0], tol).unwrap().is_empty());
        assert!(matches!(
            active_set(&sys, &b, &[2.0, 0.0], tol),
            Err(Error::InfeasiblePoint { .. })
        ));
    }

    #[test]
    fn argmax_set_examples() {
        let (sys, b) = square(NormKind::L2);
        let tol = Tolerances::default().active;
        assert_eq!(argmax_set(&sys, &b, &[2.0, 2.0], tol).unwrap().indices(), &[0, 2]);
        assert_eq!(argmax_set(&sys, &b, &[3.0, 0.0], tol).unwrap().indices(), &[0]);
        let half = FiniteSystem::from_rows(vec![vec![1.0]], NormKind::L2).unwrap();
        let b0 = Rhs::new(vec![0.0]).unwrap();
        assert_eq!(argmax_set(&half, &b0, &[-1.0], tol).unwrap().indices(), &[0]);
    }

    #[test]
    fn construction_invariants() {
        assert!(FiniteSystem::from_rows(vec![], NormKind::L2).is_err());
        assert!(FiniteSystem::from_rows(vec![vec![1.0], vec![f64::NAN]], NormKind::L2).is_err());
        let dup = vec![Row::new("a", vec![1.0]), Row::new("a", vec![2.0])];
        assert!(FiniteSystem::new(1, dup, NormKind::L2).is_err());
        // zero rows are allowed
        assert!(FiniteSystem::from_rows(vec![vec![0.0, 0.0]], NormKind::L2).is_ok());
        assert!(Rhs::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn index_subset_is_sorted() {
        let s = IndexSubset::new(vec![3, 1, 3, 0]);
        assert_eq!(s.indices(), &[0, 1, 3]);
        assert!(s.contains(3) && !s.contains(2));
        assert!(IndexSubset::new(vec![1]).is_subset_of(&s));
    }

    fn small_system() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
        (1usize..4, 1usize..7).prop_flat_map(|(n, m)| {
            (
                prop::collection::vec(prop::collection::vec(-1.0..1.0f64, n), m),
                prop::collection::vec(-1.0..1.0f64, m),
            )
        })
    }

    proptest! {
        #[test]
        fn residual_is_convex(
            (rows, b) in small_system(),
            seed in prop::collection::vec(-3.0..3.0f64, 8),
            lambda in 0.0..1.0f64,
        ) {
            let n = rows[0].len();
            let sys = FiniteSystem::from_rows(rows, NormKind::L2).unwrap();
            let b = Rhs::new(b).unwrap();
            let x = &seed[..n];
            let y = &seed[4..4 + n];
            let z: Vec<f64> = x.iter().zip(y).map(|(p, q)| lambda * p + (1.0 - lambda) * q).collect();
            let fz = residual(&sys, &b, &z).unwrap();
            let bound = lambda * residual(&sys, &b, x).unwrap()
                + (1.0 - lambda) * residual(&sys, &b, y).unwrap();
            prop_assert!(fz <= bound + 1e-12);
        }

        #[test]
        fn feasibility_characterizations_agree(
            (rows, b) in small_system(),
            x in prop::collection::vec(-2.0..2.0f64, 3),
        ) {
            let n = rows[0].len();
            let sys = FiniteSystem::from_rows(rows, NormKind::L2).unwrap();
            let b = Rhs::new(b).unwrap();
            let x = &x[..n];
            let f = residual(&sys, &b, x).unwrap();
            let d = rhs_distance(&sys, &b, x).unwrap();
            prop_assert_eq!(d == ModulusValue::ZERO, f <= 0.0);
        }

        #[test]
        fn argmax_equals_active_on_the_boundary(
            (rows, b) in small_system(),
            x in prop::collection::vec(-2.0..2.0f64, 3),
        ) {
            let n = rows[0].len();
            let sys = FiniteSystem::from_rows(rows, NormKind::L2).unwrap();
            let x = &x[..n];
            // shift b so that x sits exactly on the boundary
            let slack0 = sys.slacks(&Rhs::new(b.clone()).unwrap(), x).unwrap();
            let top = slack0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let shifted: Vec<f64> = b.iter().map(|v| v + top).collect();
            let b = Rhs::new(shifted).unwrap();
            let tol = 1e-9;
            let active = active_set(&sys, &b, x, tol).unwrap();
            let argmax = argmax_set(&sys, &b, x, tol).unwrap();
            prop_assert_eq!(active.indices(), argmax.indices());
        }
    }
}
