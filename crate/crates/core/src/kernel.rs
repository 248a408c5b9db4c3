//! Jets of parametrized maps into Euclidean 4-space, first fundamental
//! forms and the oriented fourth frame vector.

use nalgebra::{Matrix4, Vector4};

use crate::closed_forms::{NormalField, RGeneral, SolutionParams, SphereL, SphereUv};
use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::scalar::{dot4, Scalar};

/// Point or vector of Euclidean 4-space.
pub type Vec4 = Vector4<f64>;

/// Relative threshold below which a frame counts as linearly dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;

/// A two-parameter map into 4-space that can be evaluated over any scalar.
pub trait SurfaceMap {
    fn eval<S: Scalar>(&self, u: S, v: S) -> [S; 4];
}

/// A two-parameter scalar function that can be evaluated over any scalar.
pub trait ScalarMap {
    fn eval<S: Scalar>(&self, u: S, v: S) -> S;
}

impl<M: SurfaceMap + ?Sized> SurfaceMap for &M {
    fn eval<S: Scalar>(&self, u: S, v: S) -> [S; 4] {
        (**self).eval(u, v)
    }
}

impl<M: ScalarMap + ?Sized> ScalarMap for &M {
    fn eval<S: Scalar>(&self, u: S, v: S) -> S {
        (**self).eval(u, v)
    }
}

/// Value and first/second partials of a surface map at `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2Surface {
    pub u: f64,
    pub v: f64,
    pub value: Vec4,
    pub d_u: Vec4,
    pub d_v: Vec4,
    pub d_uu: Vec4,
    pub d_uv: Vec4,
    pub d_vv: Vec4,
}

impl Jet2Surface {
    pub fn from_components(u: f64, v: f64, c: &[Jet<f64, 2>; 4]) -> Self {
        let pick = |f: &dyn Fn(&Jet<f64, 2>) -> f64| Vec4::from_fn(|k, _| f(&c[k]));
        Jet2Surface {
            u,
            v,
            value: pick(&|j| j.v),
            d_u: pick(&|j| j.g[0]),
            d_v: pick(&|j| j.g[1]),
            d_uu: pick(&|j| j.h[0][0]),
            d_uv: pick(&|j| j.h[0][1]),
            d_vv: pick(&|j| j.h[1][1]),
        }
    }

    fn is_finite(&self) -> bool {
        [self.value, self.d_u, self.d_v, self.d_uu, self.d_uv, self.d_vv]
            .iter()
            .all(|v| v.iter().all(|c| c.is_finite()))
    }
}

/// Value and first/second partials of a scalar function at `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarJet2 {
    pub value: f64,
    pub d_u: f64,
    pub d_v: f64,
    pub d_uu: f64,
    pub d_uv: f64,
    pub d_vv: f64,
}

impl From<Jet<f64, 2>> for ScalarJet2 {
    fn from(j: Jet<f64, 2>) -> Self {
        ScalarJet2 {
            value: j.v,
            d_u: j.g[0],
            d_v: j.g[1],
            d_uu: j.h[0][0],
            d_uv: j.h[0][1],
            d_vv: j.h[1][1],
        }
    }
}

impl ScalarJet2 {
    pub fn constant(value: f64) -> Self {
        ScalarJet2 { value, d_u: 0.0, d_v: 0.0, d_uu: 0.0, d_uv: 0.0, d_vv: 0.0 }
    }
}

/// Coefficients of the first fundamental form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstFundamentalForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl FirstFundamentalForm {
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    /// Isothermal within a tolerance relative to `E`.
    pub fn is_isothermal(&self, rel_tol: f64) -> bool {
        (self.e - self.g).abs() <= rel_tol * self.e && self.f.abs() <= rel_tol * self.e
    }
}

/// `E = <l_u, l_u>`, `F = <l_u, l_v>`, `G = <l_v, l_v>`; fails at singular points.
pub fn first_form(jet: &Jet2Surface) -> Result<FirstFundamentalForm> {
    let form = FirstFundamentalForm {
        e: jet.d_u.dot(&jet.d_u),
        f: jet.d_u.dot(&jet.d_v),
        g: jet.d_v.dot(&jet.d_v),
    };
    let scale = form.e * form.g;
    if !(form.det() > 1e-14 * scale) || scale == 0.0 {
        return Err(GeomError::DegenerateJet(form.det()));
    }
    Ok(form)
}

fn det3<S: Scalar>(m: [[S; 3]; 3]) -> S {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Generalized cross product of three 4-vectors: the vector `n` with
/// `<n, z> = det[a; b; c; z]` for every `z`. In particular
/// `det[a; b; c; n] = |n|^2 >= 0`.
pub fn cross4<S: Scalar>(a: &[S; 4], b: &[S; 4], c: &[S; 4]) -> [S; 4] {
    std::array::from_fn(|i| {
        let cols: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        let minor = [
            [a[cols[0]], a[cols[1]], a[cols[2]]],
            [b[cols[0]], b[cols[1]], b[cols[2]]],
            [c[cols[0]], c[cols[1]], c[cols[2]]],
        ];
        // cofactor of entry (4, i+1): sign (-1)^(i+1)
        if i % 2 == 0 {
            -det3(minor)
        } else {
            det3(minor)
        }
    })
}

fn norm4<S: Scalar>(a: &[S; 4]) -> f64 {
    dot4(a, a).re().sqrt()
}

/// Unit normal to `span{first, second, third}` oriented so that
/// `det[first; second; third; n] > 0`. Generic so that it can be
/// differentiated through nested jets.
pub fn oriented_unit_normal<S: Scalar>(first: &[S; 4], second: &[S; 4], third: &[S; 4]) -> Result<[S; 4]> {
    let n = cross4(first, second, third);
    let scale = norm4(first) * norm4(second) * norm4(third);
    let len = norm4(&n);
    if !(len > DEPENDENCE_TOL * scale) {
        return Err(GeomError::LinearlyDependent(if scale > 0.0 { len / scale } else { 0.0 }));
    }
    let inv = dot4(&n, &n).sqrt().recip();
    Ok(n.map(|c| c * inv))
}

/// The unique-up-to-sign unit vector orthogonal to `l`, `l_u`, `l_v`,
/// with the sign fixed by `det[l_u; l_v; l; n] > 0`.
pub fn fourth_frame_vector(l: &Vec4, l_u: &Vec4, l_v: &Vec4) -> Result<Vec4> {
    let arr = |v: &Vec4| [v[0], v[1], v[2], v[3]];
    let n = oriented_unit_normal(&arr(l_u), &arr(l_v), &arr(l))?;
    Ok(Vec4::from(n))
}

fn check_point(u: f64, v: f64) -> Result<()> {
    if u.is_finite() && v.is_finite() {
        Ok(())
    } else {
        Err(GeomError::NonFinite("parameter point"))
    }
}

/// 2-jet of any [`SurfaceMap`] at `(u, v)` via dual-number evaluation.
pub fn surface_jet<M: SurfaceMap>(map: &M, u: f64, v: f64) -> Result<Jet2Surface> {
    check_point(u, v)?;
    let c = map.eval(Jet::<f64, 2>::variable(u, 0), Jet::variable(v, 1));
    let jet = Jet2Surface::from_components(u, v, &c);
    if !jet.is_finite() {
        return Err(GeomError::NonFinite("jet evaluation"));
    }
    Ok(jet)
}

/// 2-jet of any [`ScalarMap`] at `(u, v)`.
pub fn scalar_jet<M: ScalarMap>(map: &M, u: f64, v: f64) -> Result<ScalarJet2> {
    check_point(u, v)?;
    let j = ScalarJet2::from(map.eval(Jet::<f64, 2>::variable(u, 0), Jet::variable(v, 1)));
    if ![j.value, j.d_u, j.d_v, j.d_uu, j.d_uv, j.d_vv].iter().all(|x| x.is_finite()) {
        return Err(GeomError::NonFinite("jet evaluation"));
    }
    Ok(j)
}

/// 2-jet of the metric coefficient `E = <l_u, l_u>` as a function of `(u, v)`.
/// Uses nested jets, so it carries derivatives of `l` up to third order.
pub fn metric_e_jet<M: SurfaceMap>(map: &M, u: f64, v: f64) -> Result<ScalarJet2> {
    check_point(u, v)?;
    let inner_u = Jet::<f64, 2>::variable(u, 0);
    let inner_v = Jet::<f64, 2>::variable(v, 1);
    let c = map.eval(Jet::<Jet<f64, 2>, 2>::variable(inner_u, 0), Jet::variable(inner_v, 1));
    let l_u: [Jet<f64, 2>; 4] = std::array::from_fn(|k| c[k].g[0]);
    Ok(ScalarJet2::from(dot4(&l_u, &l_u)))
}

/// A constant map, used as a control.
#[derive(Clone, Copy, Debug)]
pub struct ConstantMap(pub Vec4);

impl SurfaceMap for ConstantMap {
    fn eval<S: Scalar>(&self, _u: S, _v: S) -> [S; 4] {
        std::array::from_fn(|k| S::cst(self.0[k]))
    }
}

/// A surface map followed by a fixed linear map of 4-space, typically a rotation.
#[derive(Clone, Copy, Debug)]
pub struct RotatedSurface<M> {
    pub rotation: Matrix4<f64>,
    pub map: M,
}

impl<M: SurfaceMap> SurfaceMap for RotatedSurface<M> {
    fn eval<S: Scalar>(&self, u: S, v: S) -> [S; 4] {
        let p = self.map.eval(u, v);
        std::array::from_fn(|r| {
            (0..4).fold(S::zero(), |acc, c| acc + p[c].scale(self.rotation[(r, c)]))
        })
    }
}

/// Registered closed-form surface families, addressable by name.
#[derive(Clone, Copy, Debug)]
pub enum AnalyticFamily {
    Constant(Vec4),
    /// The isothermal sphere `l(x, y)`.
    SphereL(SolutionParams),
    /// The sphere in its original latitude/longitude parameters.
    SphereUv(SolutionParams),
    /// The companion normal field `n(x, y)`.
    NormalN(SolutionParams),
}

impl AnalyticFamily {
    pub fn by_name(name: &str, params: SolutionParams) -> Result<Self> {
        match name {
            "sphere_l" => Ok(Self::SphereL(params)),
            "sphere_uv" => Ok(Self::SphereUv(params)),
            "normal_n" => Ok(Self::NormalN(params)),
            other => Err(GeomError::UnknownFamily(other.to_string())),
        }
    }
}

impl SurfaceMap for AnalyticFamily {
    fn eval<S: Scalar>(&self, u: S, v: S) -> [S; 4] {
        match self {
            Self::Constant(c) => ConstantMap(*c).eval(u, v),
            Self::SphereL(p) => SphereL(*p).eval(u, v),
            Self::SphereUv(p) => SphereUv(*p).eval(u, v),
            Self::NormalN(p) => NormalField(*p).eval(u, v),
        }
    }
}

/// Registered closed-form scalar families.
#[derive(Clone, Copy, Debug)]
pub enum ScalarFamily {
    RGeneral(SolutionParams),
}

impl ScalarFamily {
    pub fn by_name(name: &str, params: SolutionParams) -> Result<Self> {
        match name {
            "r_general" => Ok(Self::RGeneral(params)),
            other => Err(GeomError::UnknownFamily(other.to_string())),
        }
    }
}

impl ScalarMap for ScalarFamily {
    fn eval<S: Scalar>(&self, u: S, v: S) -> S {
        match self {
            Self::RGeneral(p) => RGeneral(*p).eval(u, v),
        }
    }
}

pub fn eval_jet2_analytic(family: &AnalyticFamily, u: f64, v: f64) -> Result<Jet2Surface> {
    surface_jet(family, u, v)
}

pub fn eval_scalar_jet2_analytic(family: &ScalarFamily, u: f64, v: f64) -> Result<ScalarJet2> {
    scalar_jet(family, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: usize) -> Vec4 {
        Vec4::ith(k, 1.0)
    }

    #[test]
    fn constant_map_has_zero_derivatives() {
        let jet = eval_jet2_analytic(&AnalyticFamily::Constant(e(0)), 0.3, -2.0).unwrap();
        assert_eq!(jet.value, e(0));
        for d in [jet.d_u, jet.d_v, jet.d_uu, jet.d_uv, jet.d_vv] {
            assert_eq!(d, Vec4::zeros());
        }
    }

    #[test]
    fn sphere_jet_at_origin() {
        let p = SolutionParams::new(1.0, 0.0, [0.0; 4]).unwrap();
        let jet = eval_jet2_analytic(&AnalyticFamily::SphereL(p), 0.0, 0.0).unwrap();
        assert!((jet.value - e(0)).norm() < 1e-15);

        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        let jet = eval_jet2_analytic(&AnalyticFamily::SphereL(p), 0.0, 0.0).unwrap();
        assert!((jet.d_u.norm_squared() - 0.36).abs() < 1e-15);
        assert!((jet.d_v.norm_squared() - 0.36).abs() < 1e-15);
    }

    #[test]
    fn unknown_family_and_nonfinite_point_are_errors() {
        let p = SolutionParams::default();
        assert!(matches!(AnalyticFamily::by_name("torus", p), Err(GeomError::UnknownFamily(_))));
        assert!(matches!(ScalarFamily::by_name("r_special", p), Err(GeomError::UnknownFamily(_))));
        let fam = AnalyticFamily::by_name("sphere_l", p).unwrap();
        assert!(matches!(eval_jet2_analytic(&fam, f64::NAN, 0.0), Err(GeomError::NonFinite(_))));
    }

    #[test]
    fn first_form_direct_products() {
        let mut jet = eval_jet2_analytic(&AnalyticFamily::Constant(e(0)), 0.0, 0.0).unwrap();
        jet.d_u = e(0);
        jet.d_v = 2.0 * e(1);
        let ff = first_form(&jet).unwrap();
        assert_eq!((ff.e, ff.f, ff.g), (1.0, 0.0, 4.0));
        jet.d_v = 3.0 * e(0);
        assert!(matches!(first_form(&jet), Err(GeomError::DegenerateJet(_))));
    }

    #[test]
    fn sphere_first_form_in_both_parametrizations() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.7, -1.1), (-2.2, 3.0)] {
            let ff = first_form(&eval_jet2_analytic(&AnalyticFamily::SphereL(p), x, y).unwrap()).unwrap();
            let expected = 0.36 / f64::cosh(x).powi(2);
            assert!((ff.e - expected).abs() <= 1e-12 * expected);
            assert!((ff.g - expected).abs() <= 1e-12 * expected);
            assert!(ff.f.abs() <= 1e-12 * expected);

            let (u, v) = (x * 0.5, y);
            let ff = first_form(&eval_jet2_analytic(&AnalyticFamily::SphereUv(p), u, v).unwrap()).unwrap();
            assert!((ff.e - 0.36).abs() < 1e-14);
            assert!(ff.f.abs() < 1e-14);
            assert!((ff.g - 0.36 * u.cos().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn fourth_frame_vector_standard_basis() {
        let n = fourth_frame_vector(&e(2), &e(0), &e(1)).unwrap();
        assert!((n.abs() - e(3)).norm() < 1e-15);
        for v in [e(0), e(1), e(2)] {
            assert_eq!(n.dot(&v), 0.0);
        }
        assert!(matches!(
            fourth_frame_vector(&e(2), &e(0), &(2.0 * e(0))),
            Err(GeomError::LinearlyDependent(_))
        ));
    }

    #[test]
    fn fourth_frame_vector_on_sphere_matches_normal_field() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        let jet = eval_jet2_analytic(&AnalyticFamily::SphereL(p), 0.0, 0.0).unwrap();
        let n = fourth_frame_vector(&jet.value, &jet.d_u, &jet.d_v).unwrap();
        assert!((n - Vec4::new(0.8, 0.0, 0.0, -0.6)).norm() < 1e-15);
    }

    #[test]
    fn rotation_preserves_the_first_form() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rotation = Matrix4::new(c, 0.0, 0.0, -s, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, s, 0.0, 0.0, c);
        let jet = surface_jet(&RotatedSurface { rotation, map: SphereL(p) }, 0.4, -0.2).unwrap();
        let plain = surface_jet(&SphereL(p), 0.4, -0.2).unwrap();
        assert!((jet.value - rotation * plain.value).norm() < 1e-15);
        let (a, b) = (first_form(&jet).unwrap(), first_form(&plain).unwrap());
        assert!((a.e - b.e).abs() < 1e-15 && (a.g - b.g).abs() < 1e-15 && a.f.abs() < 1e-15);
    }

    #[test]
    fn fourth_frame_vector_flips_when_tangents_swap() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        let jet = eval_jet2_analytic(&AnalyticFamily::SphereL(p), 0.4, 1.9).unwrap();
        let n = fourth_frame_vector(&jet.value, &jet.d_u, &jet.d_v).unwrap();
        let m = fourth_frame_vector(&jet.value, &jet.d_v, &jet.d_u).unwrap();
        assert!((n + m).norm() < 1e-15);
        // Gram matrix of {l_u, l_v, l, n} is diagonal
        let frame = [jet.d_u, jet.d_v, jet.value, n];
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!(frame[i].dot(&frame[j]).abs() < 1e-14);
            }
        }
    }
}
