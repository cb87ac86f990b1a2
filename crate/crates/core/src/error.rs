use thiserror::Error;

pub type Result<T> = std::result::Result<T, ShapeError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("holes of radius {radius} do not fit in cells of side {cell}")]
    HolesOverlap { radius: f64, cell: f64 },

    #[error("degenerate triangle {index} (signed area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh quality: minimum angle {min_angle:.2} deg is below {required:.1} deg")]
    MeshQuality { min_angle: f64, required: f64 },

    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    CgNotConverged { iterations: usize, residual: f64 },

    #[error("eigen iteration stagnated after {iterations} iterations (residual {residual:e})")]
    Stagnation { iterations: usize, residual: f64 },

    #[error(
        "no sign change of the boundary functional on [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})"
    )]
    BracketFailure {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl ShapeError {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            ShapeError::CgNotConverged { .. }
                | ShapeError::Stagnation { .. }
                | ShapeError::BracketFailure { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> ShapeError {
    ShapeError::InvalidParameter(msg.into())
}
