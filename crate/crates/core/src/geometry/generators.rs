use std::collections::HashMap;
use std::f64::consts::PI;

use super::mesh::{signed_area, BoundaryEdge, Mesh, Point};
use super::{hole_radius, OUTER_BOUNDARY};
use crate::error::{invalid, Result, ShapeError};

/// Generated meshes with a smaller minimum angle are rejected.
pub const MIN_ANGLE_DEG: f64 = 20.0;

fn ensure_quality(mesh: Mesh) -> Result<Mesh> {
    let min_angle = mesh.min_angle();
    if min_angle < MIN_ANGLE_DEG {
        return Err(ShapeError::MeshQuality {
            min_angle,
            required: MIN_ANGLE_DEG,
        });
    }
    Ok(mesh)
}

/// Fan-plus-rings triangulation of the regular `n_boundary`-gon inscribed in
/// the disk of the given radius, centred at the origin.
///
/// Ring `i` sits at radius `radius * i / n_rings` and carries roughly
/// `n_boundary * i / n_rings` points; consecutive rings are stitched by
/// merging their angular orderings.
pub fn make_disk_mesh(radius: f64, n_boundary: usize, n_rings: usize) -> Result<Mesh> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    if n_boundary < 8 {
        return Err(invalid(format!(
            "n_boundary must be >= 8, got {n_boundary}"
        )));
    }
    if n_rings < 2 {
        return Err(invalid(format!("n_rings must be >= 2, got {n_rings}")));
    }

    let mut vertices: Vec<Point> = vec![[0.0, 0.0]];
    let mut rings: Vec<Vec<usize>> = Vec::with_capacity(n_rings);
    for i in 1..=n_rings {
        let count = if i == n_rings {
            n_boundary
        } else {
            ((n_boundary * i) as f64 / n_rings as f64).round().max(3.0) as usize
        };
        let rho = radius * i as f64 / n_rings as f64;
        let start = vertices.len();
        for j in 0..count {
            let a = 2.0 * PI * j as f64 / count as f64;
            vertices.push([rho * a.cos(), rho * a.sin()]);
        }
        rings.push((start..start + count).collect());
    }

    let mut triangles = Vec::new();
    let first = &rings[0];
    for j in 0..first.len() {
        triangles.push([0, first[j], first[(j + 1) % first.len()]]);
    }
    for w in rings.windows(2) {
        stitch_rings(&w[0], &w[1], &mut triangles);
    }

    let outer = &rings[n_rings - 1];
    let boundary_edges = (0..outer.len())
        .map(|j| BoundaryEdge {
            a: outer[j],
            b: outer[(j + 1) % outer.len()],
            tag: OUTER_BOUNDARY,
        })
        .collect();
    ensure_quality(Mesh::new(vertices, triangles, boundary_edges)?)
}

/// Triangulates the annulus between two counter-clockwise rings of points,
/// both starting at angle zero.
fn stitch_rings(inner: &[usize], outer: &[usize], triangles: &mut Vec<[usize; 3]>) {
    let (m, n) = (inner.len(), outer.len());
    let (mut i, mut j) = (0, 0);
    while i < m || j < n {
        let next_inner = (i + 1) as f64 / m as f64;
        let next_outer = (j + 1) as f64 / n as f64;
        // ties go to the inner ring: that keeps the new diagonal short
        if j == n || (i < m && next_inner <= next_outer + 1e-12) {
            triangles.push([inner[i % m], outer[j % n], inner[(i + 1) % m]]);
            i += 1;
        } else {
            triangles.push([inner[i % m], outer[j % n], outer[(j + 1) % n]]);
            j += 1;
        }
    }
}

/// Structured `nx x ny` grid on `[0,width] x [0,height]`, each cell split
/// along alternating diagonals.
pub fn make_rect_mesh(width: f64, height: f64, nx: usize, ny: usize) -> Result<Mesh> {
    if !(width.is_finite() && width > 0.0 && height.is_finite() && height > 0.0) {
        return Err(invalid("rectangle sides must be positive"));
    }
    if nx < 1 || ny < 1 {
        return Err(invalid("nx and ny must be >= 1"));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // exact endpoints so that area and perimeter come out exact
            let x = if i == nx {
                width
            } else {
                width * i as f64 / nx as f64
            };
            let y = if j == ny {
                height
            } else {
                height * j as f64 / ny as f64
            };
            vertices.push([x, y]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            } else {
                triangles.push([v00, v10, v01]);
                triangles.push([v10, v11, v01]);
            }
        }
    }
    let mut loop_ids = Vec::with_capacity(2 * (nx + ny));
    loop_ids.extend((0..nx).map(|i| id(i, 0)));
    loop_ids.extend((0..ny).map(|j| id(nx, j)));
    loop_ids.extend((1..=nx).rev().map(|i| id(i, ny)));
    loop_ids.extend((1..=ny).rev().map(|j| id(0, j)));
    let boundary_edges = (0..loop_ids.len())
        .map(|l| BoundaryEdge {
            a: loop_ids[l],
            b: loop_ids[(l + 1) % loop_ids.len()],
            tag: OUTER_BOUNDARY,
        })
        .collect();
    ensure_quality(Mesh::new(vertices, triangles, boundary_edges)?)
}

/// Unit square minus `n x n` disks of radius `k / n^2`, one per lattice cell.
///
/// Every cell is meshed from one template: the hole circle (a regular
/// polygon with `cell_resolution` sides, rounded up to a multiple of 4) is
/// joined to the cell square by transfinite interpolation along straight
/// rays, with layers graded geometrically so elements stay close to
/// isotropic. Hole `c` (row-major cell index) carries tag `1 + c`; the outer
/// square carries [`OUTER_BOUNDARY`].
pub fn make_perforated_square_mesh(n: usize, k: f64, cell_resolution: usize) -> Result<Mesh> {
    let r = hole_radius(n, k, 2)?;
    if cell_resolution < 8 {
        return Err(invalid(format!(
            "cell_resolution must be >= 8, got {cell_resolution}"
        )));
    }
    let nc = cell_resolution.div_ceil(4) * 4;
    let q = nc / 4;
    let h = 1.0 / n as f64;

    // template: circle and square points in cell-local coordinates
    let circle: Vec<Point> = (0..nc)
        .map(|j| {
            let a = 1.25 * PI + 2.0 * PI * j as f64 / nc as f64;
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    // square boundary points as integer lattice offsets (units of h / q) from
    // the cell's lower-left corner, counter-clockwise from that corner
    let square_lattice: Vec<(i64, i64)> = (0..nc)
        .map(|j| {
            let (s, o) = ((j / q) as i64, (j % q) as i64);
            let qi = q as i64;
            match s {
                0 => (o, 0),
                1 => (qi, o),
                2 => (qi - o, qi),
                _ => (0, qi - o),
            }
        })
        .collect();
    let half = 0.5 * h;
    let square: Vec<Point> = square_lattice
        .iter()
        .map(|&(a, b)| {
            [
                a as f64 * h / q as f64 - half,
                b as f64 * h / q as f64 - half,
            ]
        })
        .collect();

    let ratio = half / r;
    let growth = 1.0 + 2.0 * PI / nc as f64;
    let layers = ((ratio.ln() / growth.ln()).ceil() as usize).max(2);
    let grading: Vec<f64> = (0..=layers)
        .map(|l| {
            if l == layers {
                1.0
            } else {
                (ratio.powf(l as f64 / layers as f64) - 1.0) / (ratio - 1.0)
            }
        })
        .collect();

    let mut vertices: Vec<Point> = Vec::new();
    let mut lattice_ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut boundary_edges: Vec<BoundaryEdge> = Vec::new();
    let total = (n * q) as f64;

    for cy in 0..n {
        for cx in 0..n {
            let cell = cy * n + cx;
            let centre = [(cx as f64 + 0.5) * h, (cy as f64 + 0.5) * h];
            // grid[l][j]: global vertex id
            let mut grid: Vec<Vec<usize>> = Vec::with_capacity(layers + 1);
            for &g in &grading[..layers] {
                let row = (0..nc)
                    .map(|j| {
                        let (c, s) = (circle[j], square[j]);
                        vertices.push([
                            centre[0] + c[0] + g * (s[0] - c[0]),
                            centre[1] + c[1] + g * (s[1] - c[1]),
                        ]);
                        vertices.len() - 1
                    })
                    .collect();
                grid.push(row);
            }
            let outer_row = square_lattice
                .iter()
                .map(|&(a, b)| {
                    let key = (cx as i64 * q as i64 + a, cy as i64 * q as i64 + b);
                    *lattice_ids.entry(key).or_insert_with(|| {
                        vertices.push([key.0 as f64 / total, key.1 as f64 / total]);
                        vertices.len() - 1
                    })
                })
                .collect();
            grid.push(outer_row);

            for l in 0..layers {
                for j in 0..nc {
                    let jn = (j + 1) % nc;
                    // counter-clockwise quad
                    let quad = [grid[l][j], grid[l + 1][j], grid[l + 1][jn], grid[l][jn]];
                    split_quad(&vertices, quad, &mut triangles);
                }
            }
            let hole_tag = OUTER_BOUNDARY + 1 + cell as u32;
            for j in 0..nc {
                let jn = (j + 1) % nc;
                boundary_edges.push(BoundaryEdge {
                    a: grid[0][jn],
                    b: grid[0][j],
                    tag: hole_tag,
                });
            }
            for j in 0..nc {
                let side = j / q;
                let on_outer = match side {
                    0 => cy == 0,
                    1 => cx == n - 1,
                    2 => cy == n - 1,
                    _ => cx == 0,
                };
                if on_outer {
                    let jn = (j + 1) % nc;
                    boundary_edges.push(BoundaryEdge {
                        a: grid[layers][j],
                        b: grid[layers][jn],
                        tag: OUTER_BOUNDARY,
                    });
                }
            }
        }
    }
    ensure_quality(Mesh::new(vertices, triangles, boundary_edges)?)
}

/// Splits a counter-clockwise quad along its shorter diagonal.
fn split_quad(vertices: &[Point], quad: [usize; 4], triangles: &mut Vec<[usize; 3]>) {
    let p = |i: usize| vertices[quad[i]];
    let d02 = (p(2)[0] - p(0)[0]).hypot(p(2)[1] - p(0)[1]);
    let d13 = (p(3)[0] - p(1)[0]).hypot(p(3)[1] - p(1)[1]);
    let first = [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]];
    let second = [[quad[0], quad[1], quad[3]], [quad[1], quad[2], quad[3]]];
    let ok = |tris: &[[usize; 3]; 2]| {
        tris.iter()
            .all(|t| signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) > 0.0)
    };
    let pick = if d02 <= d13 {
        if ok(&first) {
            first
        } else {
            second
        }
    } else if ok(&second) {
        second
    } else {
        first
    };
    triangles.extend(pick);
}
