//! Numerical laboratory for the Robin/Dirichlet principal eigenvalue and the
//! torsional rigidity of planar and radial domains.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: symbolic domains, 2D meshes and their generators.
//! - [`radial`]: closed forms and ODE shooting for balls in any dimension.
//! - [`fem`]: P1 assembly, preconditioned CG and inverse power iteration.
//! - [`functionals`]: the products `lambda * T^q`, union and scaling rules.
//! - [`experiments`]: ball-union families, perforated squares, probes.
//! - [`homog_h1`]: Newtonian energy of shell lattices against the uniform cube.

pub mod error;
pub mod experiments;
pub mod fem;
pub mod functionals;
pub mod geometry;
pub mod homog_h1;
pub mod parallel;
pub mod radial;
pub mod robin;

pub use error::{Result, ShapeError};
pub use robin::RobinCoefficient;
