use std::fmt;

use crate::error::{invalid, Result, ShapeError};
use crate::radial::unit_ball_volume;

/// Symbolic description of a domain.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    Ball {
        radius: f64,
        dim: usize,
    },
    Rectangle {
        width: f64,
        height: f64,
    },
    /// Pairwise disjoint copies; the parts never interact.
    DisjointUnion(Vec<DomainSpec>),
    /// Unit cube minus `n^dim` balls of radius `k n^{-dim/(dim-1)}` centred on
    /// the cells of the lattice of spacing `1/n`.
    PerforatedSquare {
        n: usize,
        k: f64,
        dim: usize,
    },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Ball { radius, dim } => {
                positive("radius", *radius)?;
                if *dim < 2 {
                    return Err(invalid(format!("ball dimension must be >= 2, got {dim}")));
                }
            }
            DomainSpec::Rectangle { width, height } => {
                positive("width", *width)?;
                positive("height", *height)?;
            }
            DomainSpec::DisjointUnion(parts) => {
                let first = parts
                    .first()
                    .ok_or_else(|| invalid("disjoint union must have at least one part"))?;
                for p in parts {
                    p.validate()?;
                    if p.dim() != first.dim() {
                        return Err(invalid("all parts of a union must share the dimension"));
                    }
                }
            }
            DomainSpec::PerforatedSquare { n, k, dim } => {
                hole_radius(*n, *k, *dim)?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Ball { dim, .. } | DomainSpec::PerforatedSquare { dim, .. } => *dim,
            DomainSpec::Rectangle { .. } => 2,
            DomainSpec::DisjointUnion(parts) => parts.first().map_or(2, DomainSpec::dim),
        }
    }

    /// Lebesgue measure of the exact (not discretised) domain.
    pub fn measure(&self) -> f64 {
        match self {
            DomainSpec::Ball { radius, dim } => unit_ball_volume(*dim) * radius.powi(*dim as i32),
            DomainSpec::Rectangle { width, height } => width * height,
            DomainSpec::DisjointUnion(parts) => parts.iter().map(DomainSpec::measure).sum(),
            DomainSpec::PerforatedSquare { n, k, dim } => {
                let r = lattice_hole_radius(*n, *k, *dim);
                1.0 - (*n as f64).powi(*dim as i32) * unit_ball_volume(*dim) * r.powi(*dim as i32)
            }
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Ball { radius, dim } => write!(f, "ball(r={radius};d={dim})"),
            DomainSpec::Rectangle { width, height } => write!(f, "rect({width}x{height})"),
            DomainSpec::DisjointUnion(parts) => {
                f.write_str("union[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("]")
            }
            DomainSpec::PerforatedSquare { n, k, dim } => {
                write!(f, "perforated(N={n};k={k};d={dim})")
            }
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `k n^{-d/(d-1)}` without the separation check.
pub fn lattice_hole_radius(n: usize, k: f64, d: usize) -> f64 {
    let d = d as f64;
    k * (n as f64).powf(-d / (d - 1.0))
}

/// Hole radius of the perforated cube; rejects holes that reach their cell boundary.
pub fn hole_radius(n: usize, k: f64, d: usize) -> Result<f64> {
    if n < 1 {
        return Err(invalid("lattice size N must be >= 1"));
    }
    positive("k", k)?;
    if d < 2 {
        return Err(invalid(format!("dimension must be >= 2, got {d}")));
    }
    let r = lattice_hole_radius(n, k, d);
    let cell = 1.0 / n as f64;
    if 2.0 * r >= cell {
        return Err(ShapeError::HolesOverlap { radius: r, cell });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hole_radius_examples() {
        assert_eq!(hole_radius(1, 0.1, 2).unwrap(), 0.1);
        assert!((hole_radius(4, 1.0, 2).unwrap() - 0.0625).abs() < 1e-16);
        let r = hole_radius(8, 1.0, 3).unwrap();
        // 8^{-3/2} through the logarithm
        let via_log = (-1.5 * 8f64.ln()).exp();
        assert!((r - via_log).abs() < 1e-15);
        assert!((r - 0.044194173824159216).abs() < 1e-15);
    }

    #[test]
    fn hole_radius_rejects_touching_holes() {
        assert!(matches!(
            hole_radius(2, 10.0, 2),
            Err(ShapeError::HolesOverlap { .. })
        ));
        // diameter equal to the cell side is rejected as well
        assert!(hole_radius(2, 1.0, 2).is_err());
        assert!(hole_radius(0, 1.0, 2).is_err());
        assert!(hole_radius(3, -1.0, 2).is_err());
        assert!(hole_radius(3, 1.0, 1).is_err());
    }

    #[test]
    fn measures() {
        let b = DomainSpec::Ball {
            radius: 1.0,
            dim: 2,
        };
        assert!((b.measure() - std::f64::consts::PI).abs() < 1e-15);
        let u = DomainSpec::DisjointUnion(vec![b.clone(), b]);
        assert!((u.measure() - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        let p = DomainSpec::PerforatedSquare {
            n: 4,
            k: 1.0,
            dim: 2,
        };
        assert!((p.measure() - (1.0 - std::f64::consts::PI / 16.0)).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(DomainSpec::DisjointUnion(vec![]).validate().is_err());
        assert!(DomainSpec::Ball {
            radius: 0.0,
            dim: 2
        }
        .validate()
        .is_err());
        let mixed = DomainSpec::DisjointUnion(vec![
            DomainSpec::Ball {
                radius: 1.0,
                dim: 2,
            },
            DomainSpec::Ball {
                radius: 1.0,
                dim: 3,
            },
        ]);
        assert!(mixed.validate().is_err());
        assert!(DomainSpec::Rectangle {
            width: 2.0,
            height: 0.5
        }
        .validate()
        .is_ok());
    }
}
