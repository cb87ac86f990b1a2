//! Plain-text mesh cache format:
//!
//! ```text
//! vertices <n>
//! x y            (n lines)
//! triangles <m>
//! i j k          (m lines, 0-based)
//! boundary <b>
//! i j tag        (b lines)
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use super::mesh::{BoundaryEdge, Mesh};
use crate::error::{Result, ShapeError};

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vertices {}", mesh.num_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:.16e} {:.16e}", p[0], p[1]);
    }
    let _ = writeln!(out, "triangles {}", mesh.triangles().len());
    for t in mesh.triangles() {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "boundary {}", mesh.boundary_edges().len());
    for e in mesh.boundary_edges() {
        let _ = writeln!(out, "{} {} {}", e.a, e.b, e.tag);
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !fields.is_empty() {
                return Ok((i + 1, fields));
            }
        }
        Err(ShapeError::Parse("unexpected end of mesh file".into()))
    }

    fn header(&mut self, keyword: &str) -> Result<usize> {
        let (line, f) = self.next()?;
        if f.len() != 2 || f[0] != keyword {
            return Err(ShapeError::Parse(format!(
                "line {line}: expected '{keyword} <count>'"
            )));
        }
        field(line, f[1])
    }

    fn record<T: FromStr, const K: usize>(&mut self) -> Result<[T; K]> {
        let (line, f) = self.next()?;
        if f.len() != K {
            return Err(ShapeError::Parse(format!(
                "line {line}: expected {K} fields, got {}",
                f.len()
            )));
        }
        let mut parsed = Vec::with_capacity(K);
        for s in f {
            parsed.push(field(line, s)?);
        }
        parsed
            .try_into()
            .map_err(|_| ShapeError::Parse(format!("line {line}: malformed record")))
    }
}

fn field<T: FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| ShapeError::Parse(format!("line {line}: cannot parse '{s}'")))
}

/// Parses and validates a mesh written by [`write_mesh`].
pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let nv = lines.header("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        vertices.push(lines.record::<f64, 2>()?);
    }
    let nt = lines.header("triangles")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        triangles.push(lines.record::<usize, 3>()?);
    }
    let nb = lines.header("boundary")?;
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let [a, b, tag] = lines.record::<usize, 3>()?;
        let tag =
            u32::try_from(tag).map_err(|_| ShapeError::Parse(format!("tag {tag} too large")))?;
        boundary.push(BoundaryEdge { a, b, tag });
    }
    if lines.next().is_ok() {
        return Err(ShapeError::Parse(
            "trailing data after boundary section".into(),
        ));
    }
    Mesh::new(vertices, triangles, boundary)
}
