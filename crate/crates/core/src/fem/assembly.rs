use super::sparse::SparseSymmetric;
use crate::error::{Result, ShapeError};
use crate::geometry::{mesh_stats, Mesh};

/// The P1 quadratic forms of a mesh.
///
/// `a`: stiffness, `m`: mass, `mb`: boundary mass, `b`: loads `int phi_i`.
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub a: SparseSymmetric,
    pub m: SparseSymmetric,
    pub mb: SparseSymmetric,
    pub b: Vec<f64>,
    pub area: f64,
    pub perimeter: f64,
    pub h_max: f64,
    /// `true` for vertices off the boundary (the Dirichlet unknowns).
    pub interior: Vec<bool>,
}

impl AssembledSystem {
    pub fn num_dofs(&self) -> usize {
        self.b.len()
    }

    pub fn num_interior(&self) -> usize {
        self.interior.iter().filter(|&&i| i).count()
    }
}

/// Exact element integrals for piecewise-linear functions.
pub fn assemble(mesh: &Mesh) -> Result<AssembledSystem> {
    let stats = mesh_stats(mesh)?;
    let n = mesh.num_vertices();
    let nt = mesh.triangles().len();
    let mut a_trip = Vec::with_capacity(9 * nt);
    let mut m_trip = Vec::with_capacity(9 * nt);
    let mut b = vec![0.0; n];

    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.triangle_points(t);
        // edge opposite vertex l, as a vector
        let e: [[f64; 2]; 3] = std::array::from_fn(|l| {
            let (q, r) = (p[(l + 1) % 3], p[(l + 2) % 3]);
            [r[0] - q[0], r[1] - q[1]]
        });
        let area = 0.5 * (e[0][0] * e[1][1] - e[0][1] * e[1][0]);
        if !(area > 0.0) {
            return Err(ShapeError::DegenerateTriangle { index: t, area });
        }
        for i in 0..3 {
            b[tri[i]] += area / 3.0;
            for j in 0..3 {
                let k = (e[i][0] * e[j][0] + e[i][1] * e[j][1]) / (4.0 * area);
                a_trip.push((tri[i], tri[j], k));
                let mass = if i == j { area / 6.0 } else { area / 12.0 };
                m_trip.push((tri[i], tri[j], mass));
            }
        }
    }

    let mut mb_trip = Vec::with_capacity(4 * mesh.boundary_edges().len());
    for e in mesh.boundary_edges() {
        let (p, q) = (mesh.vertices()[e.a], mesh.vertices()[e.b]);
        let len = (q[0] - p[0]).hypot(q[1] - p[1]);
        mb_trip.extend([
            (e.a, e.a, len / 3.0),
            (e.b, e.b, len / 3.0),
            (e.a, e.b, len / 6.0),
            (e.b, e.a, len / 6.0),
        ]);
    }

    Ok(AssembledSystem {
        a: SparseSymmetric::from_triplets(n, a_trip)?,
        m: SparseSymmetric::from_triplets(n, m_trip)?,
        mb: SparseSymmetric::from_triplets(n, mb_trip)?,
        b,
        area: stats.area,
        perimeter: stats.perimeter,
        h_max: stats.h_max,
        interior: mesh.boundary_vertex_mask().iter().map(|&on| !on).collect(),
    })
}
