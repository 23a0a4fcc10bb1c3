//! Sampled estimators of the calmness, uniform calmness, Lipschitz upper
//! semicontinuity and Hoffman moduli of a generic multifunction `M: Y ⇉ X`.
//!
//! Both spaces are finite-dimensional normed spaces. Every estimate is a
//! supremum of ratios over sampled graph points and hence a lower bound;
//! divergence is declared when the cap is exceeded on two successive levels.

mod estimator;
pub mod fixtures;

use std::fmt;
use std::sync::Arc;

use crate::norm::NormKind;

pub use estimator::{estimate_moduli, LevelEstimate, ModuliEstimates, ModulusEstimate, Schedule};
pub use fixtures::{fixture, FIXTURE_NAMES};

/// A multifunction known through finite samples of its images.
pub trait Multifunction: Send + Sync {
    fn y_dim(&self) -> usize;

    fn x_dim(&self) -> usize;

    /// A finite, deterministic sample of `M(y)`; empty outside the domain.
    fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>>;

    /// `d(x, M(y))`. The default uses the sample returned by `evaluate`.
    fn distance_to_image(&self, y: &[f64], x: &[f64], x_norm: NormKind) -> f64 {
        self.evaluate(y)
            .iter()
            .map(|p| x_norm.distance(p, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// `d(y, M⁻¹(x))`, or `None` when the inverse is not available.
    /// An empty inverse image gives `f64::INFINITY`.
    fn inverse_distance(&self, _y: &[f64], _x: &[f64], _y_norm: NormKind) -> Option<f64> {
        None
    }
}

/// A multifunction together with a nominal parameter `ȳ` and the norms used on `Y` and `X`.
#[derive(Clone)]
pub struct SampledMultifunction {
    pub name: String,
    pub y_bar: Vec<f64>,
    pub y_norm: NormKind,
    pub x_norm: NormKind,
    map: Arc<dyn Multifunction>,
}

impl SampledMultifunction {
    pub fn new(name: impl Into<String>, map: Arc<dyn Multifunction>, y_bar: Vec<f64>) -> Self {
        assert_eq!(y_bar.len(), map.y_dim(), "nominal parameter has the wrong dimension");
        SampledMultifunction {
            name: name.into(),
            y_bar,
            y_norm: NormKind::LInf,
            x_norm: NormKind::L2,
            map,
        }
    }

    /// The same multifunction at another nominal parameter.
    pub fn at(&self, y_bar: Vec<f64>) -> Self {
        assert_eq!(
            y_bar.len(),
            self.map.y_dim(),
            "nominal parameter has the wrong dimension"
        );
        SampledMultifunction { y_bar, ..self.clone() }
    }

    pub fn with_norms(mut self, y_norm: NormKind, x_norm: NormKind) -> Self {
        self.y_norm = y_norm;
        self.x_norm = x_norm;
        self
    }

    pub fn map(&self) -> &dyn Multifunction {
        self.map.as_ref()
    }

    pub fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        self.map.evaluate(y)
    }

    /// `d(x, M(ȳ))`.
    pub fn nominal_distance(&self, x: &[f64]) -> f64 {
        self.map.distance_to_image(&self.y_bar, x, self.x_norm)
    }

    /// `d(ȳ, M⁻¹(x))`.
    pub fn inverse_distance(&self, x: &[f64]) -> Option<f64> {
        self.map.inverse_distance(&self.y_bar, x, self.y_norm)
    }
}

impl fmt::Debug for SampledMultifunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledMultifunction")
            .field("name", &self.name)
            .field("y_bar", &self.y_bar)
            .field("y_norm", &self.y_norm)
            .field("x_norm", &self.x_norm)
            .finish()
    }
}
