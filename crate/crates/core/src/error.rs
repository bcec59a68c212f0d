use thiserror::Error;

use crate::expr::ExprError;

/// Errors raised by the geometric pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("characteristic point at (u, v) = ({u}, {v}): tangent plane is horizontal")]
    CharacteristicPoint { u: f64, v: f64 },
    #[error("degenerate parametrization at (u, v) = ({u}, {v}): f_u and f_v are dependent")]
    DegenerateParametrization { u: f64, v: f64 },
    #[error("curve is not transverse: f3-component {b} vanishes")]
    NonTransverse { b: f64 },
    #[error("{what} = {value} lies outside the existence domain ({lo}, {hi})")]
    DomainViolation { what: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tol:e}")]
    QuadratureNonConvergence { estimate: f64, tol: f64 },
    #[error("vectors live at different base points")]
    MismatchedBase,
    #[error("frame index {0} out of range (expected 1, 2 or 3)")]
    IndexOutOfRange(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
