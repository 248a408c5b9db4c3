//! Explicit solution families: the sphere `l(x, y)` on the unit 3-sphere,
//! the scalar solutions `r(x, y)`, the normal field `n(x, y)` and the
//! resulting hypersurfaces `X(x, y, w)`.
//!
//! Every family is generic over [`Scalar`], so the same code yields plain
//! values and exact derivative jets.

use std::f64::consts::FRAC_PI_2;

use crate::envelope::HypersurfaceMap;
use crate::error::{GeomError, Result};
use crate::kernel::{ScalarMap, SurfaceMap, Vec4};
use crate::scalar::Scalar;

/// Default half-width of the `x` domain; `cosh x` makes larger values ill-conditioned.
pub const X_MAX: f64 = 3.0;

/// Tolerance on `a^2 + b^2 = 1`.
pub const UNIT_TOL: f64 = 1e-14;

/// `a = cos(alpha)`, `b = sin(alpha)` fix the hyperplane `z^4 = b` and the
/// sphere radius `a`; `c = (c0, c1, c2, c3)` select the scalar solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionParams {
    a: f64,
    b: f64,
    c: [f64; 4],
}

impl Default for SolutionParams {
    fn default() -> Self {
        SolutionParams { a: 0.6, b: 0.8, c: [1.0; 4] }
    }
}

impl SolutionParams {
    pub fn new(a: f64, b: f64, c: [f64; 4]) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.iter().all(|x| x.is_finite())) {
            return Err(GeomError::NonFinite("solution parameters"));
        }
        if (a * a + b * b - 1.0).abs() > UNIT_TOL {
            return Err(GeomError::InvalidParams(format!("a^2 + b^2 = {} != 1", a * a + b * b)));
        }
        if a == 0.0 {
            return Err(GeomError::InvalidParams("a = 0 gives a degenerate sphere".into()));
        }
        Ok(SolutionParams { a, b, c })
    }

    /// Parameters from the angle `alpha` with `a = cos(alpha)`, `b = sin(alpha)`.
    pub fn from_angle(alpha: f64, c: [f64; 4]) -> Result<Self> {
        Self::new(alpha.cos(), alpha.sin(), c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> [f64; 4] {
        self.c
    }

    pub fn with_c(self, c: [f64; 4]) -> Result<Self> {
        Self::new(self.a, self.b, c)
    }

    /// Gauss curvature `1 + b^2/a^2` of the sphere; its radius is `a`.
    pub fn sphere_curvature(&self) -> f64 {
        1.0 + self.b * self.b / (self.a * self.a)
    }

    /// `C = (c1/a, c2/a, c3/a, c0/b)`, the common point of all rulings.
    pub fn focal_point(&self) -> Result<Vec4> {
        if self.b == 0.0 {
            return Err(GeomError::NeedsNonzeroB);
        }
        let [c0, c1, c2, c3] = self.c;
        Ok(Vec4::new(c1 / self.a, c2 / self.a, c3 / self.a, c0 / self.b))
    }
}

/// `u = -pi/2 + 2 atan(e^x)`, the change to isothermal parameters.
/// It satisfies `sin u = tanh x`, `cos u = 1 / cosh x`.
pub fn param_change(x: f64) -> f64 {
    -FRAC_PI_2 + 2.0 * x.exp().atan()
}

/// The sphere in isothermal parameters:
/// `l(x, y) = (a cos y, a sin y, a sinh x, b cosh x) / cosh x`.
#[derive(Clone, Copy, Debug)]
pub struct SphereL(pub SolutionParams);

impl SurfaceMap for SphereL {
    fn eval<S: Scalar>(&self, x: S, y: S) -> [S; 4] {
        let (a, b) = (self.0.a, self.0.b);
        let sech = x.cosh().recip();
        [
            (y.cos() * sech).scale(a),
            (y.sin() * sech).scale(a),
            x.tanh().scale(a),
            S::cst(b),
        ]
    }
}

/// The same sphere in latitude/longitude parameters:
/// `l(u, v) = (a cos u cos v, a cos u sin v, a sin u, b)`.
#[derive(Clone, Copy, Debug)]
pub struct SphereUv(pub SolutionParams);

impl SurfaceMap for SphereUv {
    fn eval<S: Scalar>(&self, u: S, v: S) -> [S; 4] {
        let (a, b) = (self.0.a, self.0.b);
        [
            (u.cos() * v.cos()).scale(a),
            (u.cos() * v.sin()).scale(a),
            u.sin().scale(a),
            S::cst(b),
        ]
    }
}

/// `n(x, y) = (b cos y, b sin y, b sinh x, -a cosh x) / cosh x`.
#[derive(Clone, Copy, Debug)]
pub struct NormalField(pub SolutionParams);

impl SurfaceMap for NormalField {
    fn eval<S: Scalar>(&self, x: S, y: S) -> [S; 4] {
        let (a, b) = (self.0.a, self.0.b);
        let sech = x.cosh().recip();
        [
            (y.cos() * sech).scale(b),
            (y.sin() * sech).scale(b),
            x.tanh().scale(b),
            S::cst(-a),
        ]
    }
}

/// `r(x, y) = c0 + (c1 cos y + c2 sin y + c3 sinh x) / cosh x`.
#[derive(Clone, Copy, Debug)]
pub struct RGeneral(pub SolutionParams);

impl ScalarMap for RGeneral {
    fn eval<S: Scalar>(&self, x: S, y: S) -> S {
        S::cst(self.0.c[0]) + bracket(self.0.c, x, y) * x.cosh().recip()
    }
}

/// `c1 cos y + c2 sin y + c3 sinh x`.
fn bracket<S: Scalar>(c: [f64; 4], x: S, y: S) -> S {
    y.cos().scale(c[1]) + y.sin().scale(c[2]) + x.sinh().scale(c[3])
}

pub fn sphere_l(p: &SolutionParams, x: f64, y: f64) -> Vec4 {
    Vec4::from(SphereL(*p).eval(x, y))
}

pub fn sphere_uv(p: &SolutionParams, u: f64, v: f64) -> Vec4 {
    Vec4::from(SphereUv(*p).eval(u, v))
}

pub fn normal_n(p: &SolutionParams, x: f64, y: f64) -> Vec4 {
    Vec4::from(NormalField(*p).eval(x, y))
}

pub fn r_general(p: &SolutionParams, x: f64, y: f64) -> f64 {
    RGeneral(*p).eval(x, y)
}

/// The hypersurface through its four printed coordinate functions.
/// Requires `b != 0` since they divide by `b`.
#[derive(Clone, Copy, Debug)]
pub struct ExplicitForm(SolutionParams);

impl ExplicitForm {
    pub fn new(p: SolutionParams) -> Result<Self> {
        if p.b == 0.0 {
            return Err(GeomError::NeedsNonzeroB);
        }
        Ok(ExplicitForm(p))
    }
}

impl HypersurfaceMap for ExplicitForm {
    fn eval<S: Scalar>(&self, x: S, y: S, w: S) -> Result<[S; 4]> {
        let SolutionParams { a, b, c } = self.0;
        let sech = x.cosh().recip();
        let k = S::cst(a * c[0]) + w.scale(b) - (bracket(c, x, y) * sech).scale(b * b / a);
        Ok([
            y.cos() * sech * k + S::cst(c[1] / a),
            y.sin() * sech * k + S::cst(c[2] / a),
            x.tanh() * k + S::cst(c[3] / a),
            k.scale(-a / b) + S::cst(c[0] / b),
        ])
    }
}

/// The hypersurface as `X = f n + C` with
/// `f = (a/b) c0 + w - b (c1 cos y + c2 sin y + c3 sinh x) / (a cosh x)`.
#[derive(Clone, Copy, Debug)]
pub struct CompactForm(SolutionParams);

impl CompactForm {
    pub fn new(p: SolutionParams) -> Result<Self> {
        if p.b == 0.0 {
            return Err(GeomError::NeedsNonzeroB);
        }
        Ok(CompactForm(p))
    }

    /// The ruling coefficient `f`; the map is singular where it vanishes.
    pub fn ruling_coefficient<S: Scalar>(&self, x: S, y: S, w: S) -> S {
        let SolutionParams { a, b, c } = self.0;
        S::cst(a / b * c[0]) + w - (bracket(c, x, y) * x.cosh().recip()).scale(b / a)
    }

    /// The `w` at which `f(x, y, w) = 0`, i.e. `X = C`.
    pub fn focal_w(&self, x: f64, y: f64) -> f64 {
        -self.ruling_coefficient(x, y, 0.0)
    }
}

impl HypersurfaceMap for CompactForm {
    fn eval<S: Scalar>(&self, x: S, y: S, w: S) -> Result<[S; 4]> {
        let f = self.ruling_coefficient(x, y, w);
        let n = NormalField(self.0).eval(x, y);
        let centre = self.0.focal_point()?;
        Ok(std::array::from_fn(|k| f * n[k] + S::cst(centre[k])))
    }
}

pub fn hypersurface_x_explicit(p: &SolutionParams, x: f64, y: f64, w: f64) -> Result<Vec4> {
    Ok(Vec4::from(ExplicitForm::new(*p)?.eval(x, y, w)?))
}

pub fn hypersurface_x_compact(p: &SolutionParams, x: f64, y: f64, w: f64) -> Result<Vec4> {
    Ok(Vec4::from(CompactForm::new(*p)?.eval(x, y, w)?))
}
