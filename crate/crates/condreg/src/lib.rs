//! Conditional sparse regression: fit a sparse linear predictor together
//! with a k-DNF condition selecting the sub-population where it is accurate.

pub mod condition_search;
pub mod conditions;
pub mod dataio;
pub mod driver;
pub mod error;
pub mod lpsolver;
pub mod mat;
pub mod presets;
pub mod scalar;
pub mod sketch;

pub use conditions::{enumerate_terms, Dnf, Literal, Term};
pub use error::{Error, Result};
pub use mat::{BoolMat, RealMat};
pub use scalar::Scalar;

/// Double-precision aliases for the common entry points. The core stays
/// generic over [`Scalar`]; these are the types the binary and most tests
/// work with.
pub type Dataset64 = dataio::Dataset<f64>;
pub type GroundTruth64 = dataio::GroundTruth<f64>;
pub type Coefficients64 = lpsolver::Coefficients<f64>;
pub type FitResult64 = driver::FitResult<f64>;
pub type ReferenceFit64 = driver::ReferenceFit<f64>;
pub type ReferenceClass64 = condition_search::ReferenceClass<f64>;
pub type RcRow64 = driver::RcRow<f64>;
