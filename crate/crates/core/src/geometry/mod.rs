//! Symbolic domains and boundary-conforming triangulations.

mod domain;
mod generators;
mod io;
mod mesh;

pub use domain::{hole_radius, lattice_hole_radius, DomainSpec};
pub use generators::{make_disk_mesh, make_perforated_square_mesh, make_rect_mesh, MIN_ANGLE_DEG};
pub use io::{read_mesh, write_mesh};
pub use mesh::{mesh_stats, refine_uniform, scale_mesh, BoundaryEdge, Mesh, MeshStats, Point};

/// Tag of the outer boundary component. Holes get `OUTER_BOUNDARY + 1 + cell`.
pub const OUTER_BOUNDARY: u32 = 0;
