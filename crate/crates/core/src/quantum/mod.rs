//! Qubit states, operators, the three protocol bases and Born-rule sampling.

pub mod basis;
pub mod linalg;
pub mod measure;

pub use basis::{eve_projectors, make_basis, su2_rotation, Axis, BasisLabel, MeasurementBasis, PerAxis};
pub use linalg::{c, cr, trace_distance, HermitianEigen, Operator, StateVector, C64, NORM_TOL, POSITIVITY_TOL};
pub use measure::{born_probabilities, born_sample, measure_leading, measure_trailing, outcome_sign, sample_weighted};
