//! Exactly-computed left/right quantile functions over a closed class of
//! piecewise distributions, monotone piecewise-affine transformations
//! with explicit one-sided continuity, exact pushforwards, and a
//! diagnostics engine that checks the equivariance identities relating
//! them (and searches for counterexamples when a hypothesis is dropped).

pub mod dataset;
pub mod diagnostics;
pub mod distribution;
pub mod io;
pub mod numeric;
pub mod quantile;
pub mod transform;

pub use dataset::{DataVector, DemoReport, EarthquakeRecord};
pub use diagnostics::{DropHypothesis, TheoremId, TheoremReport};
pub use distribution::{Atom, Distribution, EvaluatedCdf, Segment};
pub use numeric::{ExtendedReal, Rational};
pub use quantile::{ProbabilityLevel, QuantileInterval};
pub use transform::{AffinePiece, Direction, PiecewiseAffineMap};
