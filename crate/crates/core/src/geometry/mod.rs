//! Numerical kernel: LP, hull distances, strict systems, projection, rank and enumeration.

pub mod hull;
pub mod linalg;
pub mod lp;
pub mod projection;
pub mod strict;
pub mod subsets;
pub mod vertices;

pub use hull::{dual_distance_to_hull, hull_contains_origin, HullDistanceResult};
pub use linalg::rank_and_rowspace;
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus};
pub use projection::{feasible_point, project_to_polyhedron, PolyhedronProjector};
pub use strict::{strict_system_slack, strict_system_witness};
pub use subsets::{binomial, enumerate_independent_subsets};
pub use vertices::enumerate_vertices;
