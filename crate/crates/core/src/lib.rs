//! Hoffman, calmness and related moduli of the feasible set mapping
//! `b ↦ {x : a_t'x ≤ b_t, t ∈ T}` for finite and grid-discretized
//! semi-infinite linear inequality systems.

pub mod calmness;
pub mod continuous;
pub mod error;
pub mod geometry;
pub mod global;
pub mod lab;
pub mod modulus;
pub mod norm;
pub mod sampling;
pub mod semilocal;
pub mod system;

pub use calmness::{clm_at, clm_sampling, d_family, end_set_finite, CalmnessReport, DFamily};
pub use continuous::{builtin, hof_global_grid, ContinuousSystem, GridSpec};
pub use error::{Error, Result};
pub use global::{hof_global, hof_global_exhaustive, GlobalHoffmanReport};
pub use lab::{estimate_moduli, fixture, ModuliEstimates, SampledMultifunction, Schedule};
pub use modulus::ModulusValue;
pub use norm::NormKind;
pub use sampling::{BoundarySampler, FiniteOracle, OutsideOracle, Sampler, SamplingTrace};
pub use semilocal::{chain_check, hof_at, hof_at_sampling, mc_ratio_sup, ChainReport, SemiLocalReport};
pub use system::{active_set, argmax_set, residual, rhs_distance, FiniteSystem, IndexSubset, Rhs, Row, Tolerances};
