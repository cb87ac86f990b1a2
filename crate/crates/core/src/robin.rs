use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Result, ShapeError};

/// Coefficient of the boundary condition `du/dn + beta u = 0`.
///
/// `Infinite` is the Dirichlet condition `u = 0`. It is kept as its own
/// variant so that exact Dirichlet formulas never see a large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RobinCoefficient {
    Finite(f64),
    Infinite,
}

impl RobinCoefficient {
    pub fn finite(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > 0.0 {
            Ok(RobinCoefficient::Finite(beta))
        } else if beta == f64::INFINITY {
            Ok(RobinCoefficient::Infinite)
        } else {
            Err(invalid(format!(
                "Robin coefficient must be positive, got {beta}"
            )))
        }
    }

    pub fn is_dirichlet(self) -> bool {
        matches!(self, RobinCoefficient::Infinite)
    }

    pub fn value(self) -> Option<f64> {
        match self {
            RobinCoefficient::Finite(b) => Some(b),
            RobinCoefficient::Infinite => None,
        }
    }

    /// `t * beta`; the Dirichlet condition is a fixed point.
    pub fn scaled(self, t: f64) -> Self {
        match self {
            RobinCoefficient::Finite(b) => RobinCoefficient::Finite(t * b),
            RobinCoefficient::Infinite => RobinCoefficient::Infinite,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for RobinCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RobinCoefficient::Finite(b) => write!(f, "{b}"),
            RobinCoefficient::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for RobinCoefficient {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(RobinCoefficient::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| ShapeError::Parse(format!("not a Robin coefficient: {s:?}")))?;
        if v.is_infinite() {
            // "1e999" and friends must go through the literal.
            return Err(ShapeError::Parse(format!(
                "use the literal \"inf\" for the Dirichlet condition, got {s:?}"
            )));
        }
        RobinCoefficient::finite(v)
    }
}
