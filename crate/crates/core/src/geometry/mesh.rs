use std::collections::HashMap;

use crate::error::{invalid, Result, ShapeError};

pub type Point = [f64; 2];

/// Directed boundary edge `a -> b`, oriented with the domain on its left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: u32,
}

/// Counter-clockwise triangulation of a planar domain.
///
/// Immutable once built; [`Mesh::new`] checks orientation, boundary closure,
/// edge manifoldness and vertex uniqueness.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshStats {
    pub area: f64,
    pub perimeter: f64,
    pub h_max: f64,
    /// Degrees.
    pub min_angle: f64,
}

pub(crate) fn signed_area(p: Point, q: Point, r: Point) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

fn dist(p: Point, q: Point) -> f64 {
    (q[0] - p[0]).hypot(q[1] - p[1])
}

fn triangle_min_angle(p: Point, q: Point, r: Point) -> f64 {
    let (a, b, c) = (dist(q, r), dist(r, p), dist(p, q));
    let angle = |opp: f64, s1: f64, s2: f64| {
        ((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2))
            .clamp(-1.0, 1.0)
            .acos()
    };
    angle(a, b, c)
        .min(angle(b, c, a))
        .min(angle(c, a, b))
        .to_degrees()
}

impl Mesh {
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let mesh = Mesh {
            vertices,
            triangles,
            boundary_edges,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [i, j, k] = self.triangles[t];
        [self.vertices[i], self.vertices[j], self.vertices[k]]
    }

    /// Flags vertices that lie on some boundary edge.
    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            mask[e.a] = true;
            mask[e.b] = true;
        }
        mask
    }

    /// Distinct boundary tags in increasing order.
    pub fn boundary_tags(&self) -> Vec<u32> {
        let mut tags: Vec<u32> = self.boundary_edges.iter().map(|e| e.tag).collect();
        tags.sort_unstable();
        tags.dedup();
        tags
    }

    fn edge_counts(&self) -> HashMap<(usize, usize), (usize, (usize, usize))> {
        // undirected key -> (multiplicity, last directed occurrence)
        let mut edges = HashMap::with_capacity(self.triangles.len() * 2);
        for t in &self.triangles {
            for l in 0..3 {
                let (a, b) = (t[l], t[(l + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let entry = edges.entry(key).or_insert((0, (a, b)));
                entry.0 += 1;
                entry.1 = (a, b);
            }
        }
        edges
    }

    pub fn num_edges(&self) -> usize {
        self.edge_counts().len()
    }

    /// `V - E + F`; equals `1 - holes` for a connected planar region.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.num_edges() as i64 + self.triangles.len() as i64
    }

    /// Number of closed boundary loops.
    pub fn boundary_loop_count(&self) -> usize {
        let next: HashMap<usize, usize> = self.boundary_edges.iter().map(|e| (e.a, e.b)).collect();
        let mut seen: HashMap<usize, bool> = HashMap::with_capacity(next.len());
        let mut loops = 0;
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        for s in starts {
            if seen.contains_key(&s) {
                continue;
            }
            loops += 1;
            let mut v = s;
            while seen.insert(v, true).is_none() {
                v = next[&v];
            }
        }
        loops
    }

    /// Number of connected components of the vertex-triangle graph.
    pub fn connected_components(&self) -> usize {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for t in &self.triangles {
            for l in 1..3 {
                let (a, b) = (find(&mut parent, t[0]), find(&mut parent, t[l]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        (0..n).filter(|&v| find(&mut parent, v) == v).count()
    }

    fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        if self.triangles.is_empty() {
            return Err(ShapeError::InvalidMesh("no triangles".into()));
        }
        for (i, p) in self.vertices.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(ShapeError::InvalidMesh(format!("vertex {i} is not finite")));
            }
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= nv) {
                return Err(ShapeError::InvalidMesh(format!(
                    "triangle {i} has an out-of-range vertex"
                )));
            }
            let [p, q, r] = self.triangle_points(i);
            let area = signed_area(p, q, r);
            if area == 0.0 || !area.is_finite() {
                return Err(ShapeError::DegenerateTriangle { index: i, area });
            }
            if area < 0.0 {
                return Err(ShapeError::InvalidMesh(format!(
                    "triangle {i} is clockwise"
                )));
            }
        }

        let edges = self.edge_counts();
        let mut open: HashMap<(usize, usize), ()> = HashMap::new();
        for (key, (count, directed)) in &edges {
            match count {
                1 => {
                    open.insert(*directed, ());
                }
                2 => {}
                _ => {
                    return Err(ShapeError::InvalidMesh(format!(
                        "edge {key:?} is shared by {count} triangles"
                    )))
                }
            }
        }
        if open.len() != self.boundary_edges.len() {
            return Err(ShapeError::InvalidMesh(format!(
                "{} open triangle edges but {} boundary edges",
                open.len(),
                self.boundary_edges.len()
            )));
        }
        let mut in_deg = vec![0u32; nv];
        let mut out_deg = vec![0u32; nv];
        for e in &self.boundary_edges {
            if e.a >= nv || e.b >= nv {
                return Err(ShapeError::InvalidMesh("boundary edge out of range".into()));
            }
            if !open.contains_key(&(e.a, e.b)) {
                return Err(ShapeError::InvalidMesh(format!(
                    "boundary edge {}->{} is not an edge of exactly one triangle with that orientation",
                    e.a, e.b
                )));
            }
            out_deg[e.a] += 1;
            in_deg[e.b] += 1;
        }
        if let Some(v) = (0..nv).find(|&v| in_deg[v] != out_deg[v] || out_deg[v] > 1) {
            return Err(ShapeError::InvalidMesh(format!(
                "boundary is not a union of simple loops at vertex {v}"
            )));
        }

        self.check_duplicates()
    }

    fn check_duplicates(&self) -> Result<()> {
        let h = self.h_max();
        let tol = 1e-12 * h;
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| self.vertices[a][0].total_cmp(&self.vertices[b][0]));
        for (i, &a) in order.iter().enumerate() {
            let pa = self.vertices[a];
            for &b in &order[i + 1..] {
                let pb = self.vertices[b];
                if pb[0] - pa[0] > tol {
                    break;
                }
                if (pb[1] - pa[1]).abs() <= tol {
                    return Err(ShapeError::InvalidMesh(format!(
                        "vertices {a} and {b} coincide"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn h_max(&self) -> f64 {
        let mut h: f64 = 0.0;
        for t in 0..self.triangles.len() {
            let [p, q, r] = self.triangle_points(t);
            h = h.max(dist(p, q)).max(dist(q, r)).max(dist(r, p));
        }
        h
    }

    pub fn min_angle(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [p, q, r] = self.triangle_points(t);
                triangle_min_angle(p, q, r)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Length of the boundary component(s) carrying `tag`.
    pub fn boundary_length(&self, tag: u32) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| e.tag == tag)
            .map(|e| dist(self.vertices[e.a], self.vertices[e.b]))
            .sum()
    }
}

pub fn mesh_stats(mesh: &Mesh) -> Result<MeshStats> {
    let mut area = 0.0;
    for t in 0..mesh.triangles.len() {
        let [p, q, r] = mesh.triangle_points(t);
        let a = signed_area(p, q, r);
        if a <= 0.0 || !a.is_finite() {
            return Err(ShapeError::DegenerateTriangle { index: t, area: a });
        }
        area += a;
    }
    let perimeter = mesh
        .boundary_edges
        .iter()
        .map(|e| dist(mesh.vertices[e.a], mesh.vertices[e.b]))
        .sum();
    Ok(MeshStats {
        area,
        perimeter,
        h_max: mesh.h_max(),
        min_angle: mesh.min_angle(),
    })
}

/// The mesh of `t * Omega`.
pub fn scale_mesh(mesh: &Mesh, t: f64) -> Result<Mesh> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("scale factor must be positive, got {t}")));
    }
    if t == 1.0 {
        return Ok(mesh.clone());
    }
    Ok(Mesh {
        vertices: mesh.vertices.iter().map(|p| [t * p[0], t * p[1]]).collect(),
        triangles: mesh.triangles.clone(),
        boundary_edges: mesh.boundary_edges.clone(),
    })
}

/// Splits every triangle into four through edge midpoints.
///
/// The discrete domain is unchanged: boundary midpoints stay on the polygon.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let mut vertices = mesh.vertices.clone();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoint.entry(key).or_insert_with(|| {
            let (p, q) = (vertices[a], vertices[b]);
            vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let ab = mid(a, b, &mut vertices);
        let bc = mid(b, c, &mut vertices);
        let ca = mid(c, a, &mut vertices);
        triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
    }
    let mut boundary_edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let m = mid(e.a, e.b, &mut vertices);
        boundary_edges.push(BoundaryEdge {
            a: e.a,
            b: m,
            tag: e.tag,
        });
        boundary_edges.push(BoundaryEdge {
            a: m,
            b: e.b,
            tag: e.tag,
        });
    }
    Mesh {
        vertices,
        triangles,
        boundary_edges,
    }
}
