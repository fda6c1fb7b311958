//! Charts, metrics, tensor fields and curvature.
//!
//! Components are symbolic [`Expr`](crate::symexpr::Expr)s. Every numeric
//! check goes through exact Taylor jets at sample points, so a metric whose
//! symbolic inverse exceeds the node budget still supports all checks.

mod chart;
mod curvature;
mod metric;
pub mod scalar;
mod tensor;

use thiserror::Error;

use crate::symexpr::{EvalError, ParseError};

pub use chart::{Chart, Point};
pub use curvature::{
    bianchi_residual, christoffels, curvature, curvature_at, is_constant_curvature, is_constant_curvature_with,
    is_einstein, is_einstein_tol, is_einstein_with, ConstantCurvature, CurvatureSet, Einstein, PointCurvature,
    CURVATURE_TOL,
};
pub use metric::{
    signature, signature_at, signature_over_box, LocalJets, MetricField, Signature, SYMBOLIC_NODE_BUDGET,
};
pub use scalar::Mat;
pub use tensor::{
    check_same_chart, covariant_derivative, covariant_derivative_at, lie_derivative_metric, lie_derivative_metric_at,
    max_abs_over_samples, musical, TensorField,
};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("chart error: {0}")]
    Chart(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("degenerate metric at {point:?}: {detail}")]
    Degenerate { point: Vec<f64>, detail: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("objects live on different charts (`{0}` and `{1}`)")]
    ChartMismatch(String, String),
    #[error("symbolic inverse unavailable (node budget exceeded); use the numeric path")]
    SymbolicBudget,
    #[error("slot {slot} out of range for a tensor of rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
}
