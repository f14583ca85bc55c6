//! Probability representations of quantum states: operators, measurements,
//! representation metrics and the finite witnesses that separate them from
//! the trace distance.

pub mod antisym;
pub mod error;
pub mod metrics;
pub mod nets;
pub mod operator;
pub mod random;
pub mod scrambling;
pub mod spectral;
pub mod tol;

pub use error::{Error, Result};
pub use operator::{
    born_rule, born_rule_product, gentle_measurement_check, pos_neg_parts, restrict_measurement,
    restrict_state, spectrum, tensor, trace_norm, CMatrix, CVector, DensityMatrix,
    EigenDecomposition, HermitianOperator, Measurement, PovmElement, ProbabilityVector,
    ProductMeasurement, Projector, PureState, Unitary, C64,
};
pub use random::haar_unitary;
pub use tol::{set_tolerances, tolerances, Tolerances};
