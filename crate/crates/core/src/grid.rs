//! Uniform rectangular grids of sampled fields and finite-difference jets.

use std::ops::{Add, Div, Mul, Sub};

use crate::error::{GeomError, Result};
use crate::kernel::{Jet2Surface, ScalarJet2, Vec4};

/// Values a grid can hold: anything forming a real vector space.
pub trait FieldValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Div<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl FieldValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl FieldValue for Vec4 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Minimum node count per axis.
pub const MIN_NODES: usize = 5;

/// A field sampled at `(x0 + i hx, y0 + j hy)`, stored row-major with `i` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T> {
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    hx: f64,
    hy: f64,
    values: Vec<T>,
}

/// Node counts and extents of a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, x_range: (f64, f64), y_range: (f64, f64)) -> Result<Self> {
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(GeomError::GridTooSmall(format!("{nx}x{ny} nodes, need at least {MIN_NODES} per axis")));
        }
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.1 > r.0;
        if !ok(x_range) || !ok(y_range) {
            return Err(GeomError::InvalidParams("grid ranges must be finite and increasing".into()));
        }
        Ok(GridSpec { nx, ny, x_range, y_range })
    }

    pub fn square(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(n, n, (lo, hi), (lo, hi))
    }

    pub fn hx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_range.1 - self.y_range.0) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_range.0 + i as f64 * self.hx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_range.0 + j as f64 * self.hy()
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }
}

impl<T: FieldValue> GridField<T> {
    pub fn new(spec: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != spec.nx * spec.ny {
            return Err(GeomError::DimensionMismatch { expected: spec.nx * spec.ny, got: values.len() });
        }
        Ok(GridField {
            nx: spec.nx,
            ny: spec.ny,
            x0: spec.x_range.0,
            y0: spec.y_range.0,
            hx: spec.hx(),
            hy: spec.hy(),
            values,
        })
    }

    /// Samples `f(x, y)` at every node.
    pub fn sample<F: FnMut(f64, f64) -> T>(spec: GridSpec, mut f: F) -> Self {
        let mut values = Vec::with_capacity(spec.nx * spec.ny);
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                values.push(f(spec.x(i), spec.y(j)));
            }
        }
        Self::new(spec, values).expect("length matches by construction")
    }

    /// Builds a field from explicit node coordinates, which must be uniformly spaced.
    pub fn from_coordinates(xs: &[f64], ys: &[f64], values: Vec<T>) -> Result<Self> {
        let uniform = |c: &[f64]| {
            if c.len() < 2 {
                return false;
            }
            let h = (c[c.len() - 1] - c[0]) / (c.len() - 1) as f64;
            h > 0.0 && c.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
        };
        if !uniform(xs) || !uniform(ys) {
            return Err(GeomError::NonUniformGrid);
        }
        let spec = GridSpec::new(xs.len(), ys.len(), (xs[0], xs[xs.len() - 1]), (ys[0], ys[ys.len() - 1]))?;
        Self::new(spec, values)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            nx: self.nx,
            ny: self.ny,
            x_range: (self.x0, self.x0 + (self.nx - 1) as f64 * self.hx),
            y_range: (self.y0, self.y0 + (self.ny - 1) as f64 * self.hy),
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.index(i, j);
        self.values[k] = v;
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Largest pointwise distance to another field on the same grid.
    pub fn max_distance(&self, other: &GridField<T>) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).magnitude())
            .fold(0.0, f64::max)
    }
}

/// Finite-difference scheme for [`eval_jet2_numeric`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Stencil {
    /// Second-order central differences with the grid spacing.
    #[default]
    Central,
    /// Central differences at `h` and `2h` combined by one Richardson step.
    Richardson,
}

/// Finite-difference jet together with its mixed-partial asymmetry
/// `|d_uv - d_vu|` (the two differencing orders of the corner stencil).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericJet<J> {
    pub jet: J,
    pub asymmetry: f64,
}

fn central<T: FieldValue>(f: &GridField<T>, i: usize, j: usize, s: usize) -> ([T; 6], f64) {
    let (hx, hy) = (f.hx * s as f64, f.hy * s as f64);
    let c = f.at(i, j);
    let (e, w) = (f.at(i + s, j), f.at(i - s, j));
    let (n, so) = (f.at(i, j + s), f.at(i, j - s));
    let (ne, nw) = (f.at(i + s, j + s), f.at(i - s, j + s));
    let (se, sw) = (f.at(i + s, j - s), f.at(i - s, j - s));
    let d_u = (e - w) / (2.0 * hx);
    let d_v = (n - so) / (2.0 * hy);
    let d_uu = (e - c * 2.0 + w) / (hx * hx);
    let d_vv = (n - c * 2.0 + so) / (hy * hy);
    let d_uv = ((ne - nw) - (se - sw)) / (4.0 * hx * hy);
    let d_vu = ((ne - se) - (nw - sw)) / (4.0 * hx * hy);
    ([c, d_u, d_v, d_uu, d_uv, d_vv], (d_uv - d_vu).magnitude())
}

fn numeric_slots<T: FieldValue>(f: &GridField<T>, i: usize, j: usize, stencil: Stencil) -> Result<([T; 6], f64)> {
    let margin = match stencil {
        Stencil::Central => 1,
        Stencil::Richardson => 2,
    };
    if i < margin || j < margin || i + margin >= f.nx || j + margin >= f.ny {
        return Err(GeomError::BoundaryNode { i, j });
    }
    let (fine, asym) = central(f, i, j, 1);
    match stencil {
        Stencil::Central => Ok((fine, asym)),
        Stencil::Richardson => {
            let (coarse, asym2) = central(f, i, j, 2);
            let mut out = fine;
            for k in 1..6 {
                out[k] = (fine[k] * 4.0 - coarse[k]) / 3.0;
            }
            Ok((out, asym.max(asym2)))
        }
    }
}

/// Jet of a sampled surface at an interior node.
pub fn eval_jet2_numeric(field: &GridField<Vec4>, i: usize, j: usize, stencil: Stencil) -> Result<NumericJet<Jet2Surface>> {
    let (s, asymmetry) = numeric_slots(field, i, j, stencil)?;
    Ok(NumericJet {
        jet: Jet2Surface {
            u: field.x(i),
            v: field.y(j),
            value: s[0],
            d_u: s[1],
            d_v: s[2],
            d_uu: s[3],
            d_uv: s[4],
            d_vv: s[5],
        },
        asymmetry,
    })
}

/// Jet of a sampled scalar field at an interior node.
pub fn eval_scalar_jet2_numeric(field: &GridField<f64>, i: usize, j: usize, stencil: Stencil) -> Result<NumericJet<ScalarJet2>> {
    let (s, asymmetry) = numeric_slots(field, i, j, stencil)?;
    Ok(NumericJet {
        jet: ScalarJet2 { value: s[0], d_u: s[1], d_v: s[2], d_uu: s[3], d_uv: s[4], d_vv: s[5] },
        asymmetry,
    })
}
