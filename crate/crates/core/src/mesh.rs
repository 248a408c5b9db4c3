//! Triangle meshes of `w`-slices of a hypersurface, projected to 3-space,
//! with Wavefront OBJ output.

use std::fmt::Write as _;

use crate::envelope::{hypersurface_jet, shape_data, HypersurfaceMap};
use crate::error::{GeomError, Result};
use crate::grid::GridSpec;
use crate::kernel::Vec4;

/// Linear map from 4-space to 3-space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Projection {
    /// Forget one coordinate.
    Drop(usize),
    /// Orthogonal projection onto the complement of a direction.
    Along(Vec4),
}

impl Projection {
    fn basis(&self) -> Result<[Vec4; 3]> {
        match *self {
            Projection::Drop(k) if k < 4 => {
                let keep: Vec<usize> = (0..4).filter(|&c| c != k).collect();
                Ok(std::array::from_fn(|a| Vec4::from_fn(|c, _| if c == keep[a] { 1.0 } else { 0.0 })))
            }
            Projection::Drop(k) => Err(GeomError::InvalidParams(format!("coordinate {k} out of range"))),
            Projection::Along(d) => {
                let n = d.norm();
                if !(n > 0.0) || !n.is_finite() {
                    return Err(GeomError::InvalidParams("projection direction must be nonzero".into()));
                }
                let d = d / n;
                let mut out = Vec::with_capacity(3);
                for k in 0..4 {
                    let mut v = Vec4::zeros();
                    v[k] = 1.0;
                    v -= v.dot(&d) * d;
                    for b in &out {
                        let b: &Vec4 = b;
                        v -= v.dot(b) * b;
                    }
                    if v.norm() > 1e-8 && out.len() < 3 {
                        out.push(v.normalize());
                    }
                }
                Ok([out[0], out[1], out[2]])
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshSpec {
    pub grid: GridSpec,
    pub w_values: Vec<f64>,
    pub projection: Projection,
    /// Also emit segments joining corresponding vertices of consecutive slices.
    pub rulings: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based, counterclockwise in the `(x, y)` parameter plane.
    pub faces: Vec<[usize; 3]>,
    pub segments: Vec<[usize; 2]>,
    /// Vertices where the hypersurface is singular; faces touching them are dropped.
    pub degenerate: usize,
}

/// Samples every slice on the grid. Slices hold `nx * ny` vertices each.
pub fn build_mesh<M: HypersurfaceMap>(map: &M, spec: &MeshSpec) -> Result<Mesh> {
    let basis = spec.projection.basis()?;
    let g = spec.grid;
    let per_slice = g.nx * g.ny;
    let mut mesh = Mesh::default();
    let mut singular = vec![false; per_slice * spec.w_values.len()];
    for (s, &w) in spec.w_values.iter().enumerate() {
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (x, y) = (g.x(i), g.y(j));
                let p = map.eval::<f64>(x, y, w)?;
                let p = Vec4::from_column_slice(&p);
                if !p.iter().all(|c| c.is_finite()) {
                    return Err(GeomError::NonFinite("mesh vertex"));
                }
                let regular = hypersurface_jet(map, x, y, w).and_then(|jet| shape_data(&jet)).is_ok();
                singular[s * per_slice + j * g.nx + i] = !regular;
                mesh.degenerate += usize::from(!regular);
                mesh.vertices.push(std::array::from_fn(|a| basis[a].dot(&p)));
            }
        }
        let base = s * per_slice;
        let id = |i: usize, j: usize| base + j * g.nx + i;
        for j in 0..g.ny - 1 {
            for i in 0..g.nx - 1 {
                for tri in [[id(i, j), id(i + 1, j), id(i + 1, j + 1)], [id(i, j), id(i + 1, j + 1), id(i, j + 1)]] {
                    if tri.iter().all(|&v| !singular[v]) {
                        mesh.faces.push(tri);
                    }
                }
            }
        }
        if spec.rulings && s > 0 {
            for k in 0..per_slice {
                mesh.segments.push([base - per_slice + k, base + k]);
            }
        }
    }
    Ok(mesh)
}

impl Mesh {
    /// OBJ text with vertices at 17 significant digits.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        for l in &self.segments {
            let _ = writeln!(out, "l {} {}", l[0] + 1, l[1] + 1);
        }
        out
    }
}

/// Counts of a parsed OBJ document.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ObjStats {
    pub vertices: usize,
    pub faces: usize,
    pub segments: usize,
}

/// Checks that every record parses and every index refers to an earlier vertex.
pub fn validate_obj(text: &str) -> Result<ObjStats> {
    let mut stats = ObjStats::default();
    let bad = |n: usize, why: &str| GeomError::InvalidParams(format!("obj line {n}: {why}"));
    for (n, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        let Some(tag) = parts.next() else { continue };
        let fields: Vec<&str> = parts.collect();
        match tag {
            "v" => {
                if fields.len() != 3 || fields.iter().any(|f| f.parse::<f64>().map_or(true, |v| !v.is_finite())) {
                    return Err(bad(n + 1, "vertex needs three finite coordinates"));
                }
                stats.vertices += 1;
            }
            "f" | "l" => {
                let want = if tag == "f" { 3 } else { 2 };
                if fields.len() != want {
                    return Err(bad(n + 1, "wrong index count"));
                }
                for f in &fields {
                    let idx: usize = f.parse().map_err(|_| bad(n + 1, "index is not an integer"))?;
                    if idx == 0 || idx > stats.vertices {
                        return Err(bad(n + 1, "index out of range"));
                    }
                }
                if tag == "f" {
                    stats.faces += 1;
                } else {
                    stats.segments += 1;
                }
            }
            "#" => {}
            _ => return Err(bad(n + 1, "unknown record")),
        }
    }
    Ok(stats)
}
