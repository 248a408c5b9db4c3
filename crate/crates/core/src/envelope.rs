//! Envelopes of two-parameter families of hyperplanes `<z, l(u,v)> = r(u,v)`
//! and the shape-operator data that certifies type number two and
//! bi-umbilicity of the resulting hypersurfaces.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::kernel::{fourth_frame_vector, oriented_unit_normal, Jet2Surface, ScalarJet2, ScalarMap, SurfaceMap, Vec4};
use crate::scalar::{dot4, Scalar};

/// Relative tolerance for the isothermal precondition of [`envelope_point`].
pub const ISOTHERMAL_TOL: f64 = 1e-8;

/// Default relative tolerance for zero and equal eigenvalues.
pub const EIGEN_TOL: f64 = 1e-8;

/// Points with `det g < DEGENERACY_TOL * (tr g / 3)^3` are treated as singular.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// A three-parameter map `(x, y, w) -> E^4` evaluable over any scalar.
pub trait HypersurfaceMap {
    fn eval<S: Scalar>(&self, x: S, y: S, w: S) -> Result<[S; 4]>;
}

impl<M: HypersurfaceMap + ?Sized> HypersurfaceMap for &M {
    fn eval<S: Scalar>(&self, x: S, y: S, w: S) -> Result<[S; 4]> {
        (**self).eval(x, y, w)
    }
}

/// `X = r l + (r_u / E) l_u + (r_v / E) l_v + w n` for an isothermal jet of `l`.
pub fn envelope_point(l_jet: &Jet2Surface, r_jet: &ScalarJet2, w: f64) -> Result<Vec4> {
    let e = l_jet.d_u.norm_squared();
    if !(e > f64::EPSILON) {
        return Err(GeomError::SmallMetric(e));
    }
    let f = l_jet.d_u.dot(&l_jet.d_v);
    let g = l_jet.d_v.norm_squared();
    if (e - g).abs() > ISOTHERMAL_TOL * e || f.abs() > ISOTHERMAL_TOL * e {
        return Err(GeomError::NotIsothermal { e_minus_g: (e - g).abs(), f: f.abs() });
    }
    let n = fourth_frame_vector(&l_jet.value, &l_jet.d_u, &l_jet.d_v)?;
    Ok(r_jet.value * l_jet.value + (r_jet.d_u / e) * l_jet.d_u + (r_jet.d_v / e) * l_jet.d_v + w * n)
}

/// The envelope hypersurface generated by an isothermal unit surface `l`
/// and a support function `r`. Evaluating it over jets differentiates
/// through `l_u`, `l_v` and `n` via nested jets.
#[derive(Clone, Copy, Debug)]
pub struct EnvelopeMap<L, R> {
    pub l: L,
    pub r: R,
}

impl<L: SurfaceMap, R: ScalarMap> HypersurfaceMap for EnvelopeMap<L, R> {
    fn eval<S: Scalar>(&self, x: S, y: S, w: S) -> Result<[S; 4]> {
        let xu = Jet::<S, 2>::variable(x, 0);
        let yv = Jet::<S, 2>::variable(y, 1);
        let l = self.l.eval(xu, yv);
        let r = self.r.eval(xu, yv);
        let value: [S; 4] = std::array::from_fn(|k| l[k].v);
        let l_u: [S; 4] = std::array::from_fn(|k| l[k].g[0]);
        let l_v: [S; 4] = std::array::from_fn(|k| l[k].g[1]);
        let e = dot4(&l_u, &l_u);
        if !(e.re() > f64::EPSILON) {
            return Err(GeomError::SmallMetric(e.re()));
        }
        let n = oriented_unit_normal(&l_u, &l_v, &value)?;
        let (ku, kv) = (r.g[0] / e, r.g[1] / e);
        Ok(std::array::from_fn(|k| r.v * value[k] + ku * l_u[k] + kv * l_v[k] + w * n[k]))
    }
}

/// Round cylinder `S^1 x R^2`, `(x, y, w) -> (cos y, sin y, w, x)`: a
/// hypersurface of type number one, used as a negative control.
#[derive(Clone, Copy, Debug, Default)]
pub struct Cylinder;

impl HypersurfaceMap for Cylinder {
    fn eval<S: Scalar>(&self, x: S, y: S, w: S) -> Result<[S; 4]> {
        Ok([y.cos(), y.sin(), w, x])
    }
}

/// Value, first and second partials of `X(x, y, w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypersurfaceJet {
    pub point: [f64; 3],
    pub value: Vec4,
    /// `[X_x, X_y, X_w]`
    pub d1: [Vec4; 3],
    /// Symmetric table of second partials, `d2[i][j] = X_ij`.
    pub d2: [[Vec4; 3]; 3],
}

impl HypersurfaceJet {
    /// Largest mismatch between `X_ij` and `X_ji`.
    pub fn mixed_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..i {
                worst = worst.max((self.d2[i][j] - self.d2[j][i]).norm());
            }
        }
        worst
    }
}

/// Exact jet of a [`HypersurfaceMap`] from one dual-number evaluation.
pub fn hypersurface_jet<M: HypersurfaceMap>(map: &M, x: f64, y: f64, w: f64) -> Result<HypersurfaceJet> {
    if !(x.is_finite() && y.is_finite() && w.is_finite()) {
        return Err(GeomError::NonFinite("parameter point"));
    }
    let c = map.eval(
        Jet::<f64, 3>::variable(x, 0),
        Jet::variable(y, 1),
        Jet::variable(w, 2),
    )?;
    let jet = HypersurfaceJet {
        point: [x, y, w],
        value: Vec4::from_fn(|k, _| c[k].v),
        d1: std::array::from_fn(|i| Vec4::from_fn(|k, _| c[k].g[i])),
        d2: std::array::from_fn(|i| std::array::from_fn(|j| Vec4::from_fn(|k, _| c[k].h[i][j]))),
    };
    let finite = std::iter::once(&jet.value)
        .chain(jet.d1.iter())
        .chain(jet.d2.iter().flatten())
        .all(|v| v.iter().all(|c| c.is_finite()));
    if !finite {
        return Err(GeomError::NonFinite("jet evaluation"));
    }
    Ok(jet)
}

/// Jet of a sampled map by second-order central differences with step `h`.
pub fn hypersurface_jet_fd<F>(f: F, x: f64, y: f64, w: f64, h: f64) -> Result<HypersurfaceJet>
where
    F: Fn(f64, f64, f64) -> Result<Vec4>,
{
    if !(h > 0.0) {
        return Err(GeomError::NonUniformGrid);
    }
    let p = [x, y, w];
    let at = |di: [f64; 3]| f(p[0] + di[0] * h, p[1] + di[1] * h, p[2] + di[2] * h);
    let unit = |i: usize, s: f64| {
        let mut d = [0.0; 3];
        d[i] = s;
        d
    };
    let value = at([0.0; 3])?;
    let mut d1 = [Vec4::zeros(); 3];
    let mut d2 = [[Vec4::zeros(); 3]; 3];
    for i in 0..3 {
        let (fp, fm) = (at(unit(i, 1.0))?, at(unit(i, -1.0))?);
        d1[i] = (fp - fm) / (2.0 * h);
        d2[i][i] = (fp - 2.0 * value + fm) / (h * h);
        for j in 0..i {
            let mut pp = unit(i, 1.0);
            pp[j] = 1.0;
            let mut pm = unit(i, 1.0);
            pm[j] = -1.0;
            let mut mp = unit(i, -1.0);
            mp[j] = 1.0;
            let mut mm = unit(i, -1.0);
            mm[j] = -1.0;
            let mixed = (at(pp)? - at(pm)? - at(mp)? + at(mm)?) / (4.0 * h * h);
            d2[i][j] = mixed;
            d2[j][i] = mixed;
        }
    }
    Ok(HypersurfaceJet { point: p, value, d1, d2 })
}

/// Metric, second fundamental form and shape operator at a regular point.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeData {
    pub metric: Matrix3<f64>,
    pub second_form: Matrix3<f64>,
    /// `A = g^{-1} h`, acting on coordinate tangent vectors.
    pub shape_operator: Matrix3<f64>,
    /// Principal curvatures sorted by descending absolute value.
    pub eigenvalues: [f64; 3],
    /// Matching g-orthonormal principal directions (columns, coordinate components).
    pub eigenvectors: Matrix3<f64>,
    pub normal: Vec4,
}

impl ShapeData {
    /// `|| g A - (g A)^T || / || g A ||`; zero for an exact self-adjoint operator.
    pub fn self_adjointness_defect(&self) -> f64 {
        let ga = self.metric * self.shape_operator;
        let scale = ga.norm();
        if scale == 0.0 {
            return 0.0;
        }
        (ga - ga.transpose()).norm() / scale
    }
}

/// Symmetric inverse square root of an SPD 3x3 matrix.
pub(crate) fn inverse_sqrt_spd(g: &Matrix3<f64>) -> Matrix3<f64> {
    let eig = SymmetricEigen::new(*g);
    let d = Matrix3::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Computes `g`, `h`, `A = g^{-1} h` and the principal curvatures from the
/// metric-symmetrized operator `g^{-1/2} h g^{-1/2}`.
pub fn shape_data(jet: &HypersurfaceJet) -> Result<ShapeData> {
    let t = jet.d1;
    let metric = Matrix3::from_fn(|i, j| t[i].dot(&t[j]));
    let trace = metric.trace();
    let det = metric.determinant();
    if !(det > DEGENERACY_TOL * (trace / 3.0).powi(3)) {
        return Err(GeomError::DegenerateMetric(det));
    }
    let arr = |v: &Vec4| [v[0], v[1], v[2], v[3]];
    let normal = Vec4::from(oriented_unit_normal(&arr(&t[0]), &arr(&t[1]), &arr(&t[2]))?);
    let second_form = Matrix3::from_fn(|i, j| 0.5 * (jet.d2[i][j] + jet.d2[j][i]).dot(&normal));
    let g_inv = metric.try_inverse().ok_or(GeomError::DegenerateMetric(det))?;
    let shape_operator = g_inv * second_form;

    let root_inv = inverse_sqrt_spd(&metric);
    let sym = root_inv * second_form * root_inv;
    let sym = 0.5 * (sym + sym.transpose());
    let eig = SymmetricEigen::new(sym);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].abs().total_cmp(&eig.eigenvalues[i].abs()));
    let eigenvalues = order.map(|i| eig.eigenvalues[i]);
    let eigenvectors = Matrix3::from_columns(&order.map(|i| root_inv * eig.eigenvectors.column(i)));

    Ok(ShapeData { metric, second_form, shape_operator, eigenvalues, eigenvectors, normal })
}

/// Outcome of the type-number / bi-umbilicity test at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiumbilicalReport {
    pub is_type_two: bool,
    pub is_biumbilical: bool,
    pub eigenvalues: [f64; 3],
}

/// Classification of a sample point; singular points are kept distinct.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointClass {
    Regular(BiumbilicalReport),
    Degenerate,
}

/// Type two: exactly one principal curvature vanishes relative to the
/// largest. Bi-umbilical: type two with the two nonzero ones equal.
pub fn biumbilical_check(s: &ShapeData, tol: f64) -> BiumbilicalReport {
    let nu = s.eigenvalues;
    let scale = nu[0].abs();
    let zeros = if scale == 0.0 { 3 } else { nu.iter().filter(|v| v.abs() <= tol * scale).count() };
    let is_type_two = zeros == 1;
    let is_biumbilical = is_type_two && (nu[0] - nu[1]).abs() <= tol * scale;
    BiumbilicalReport { is_type_two, is_biumbilical, eigenvalues: nu }
}

/// Runs [`shape_data`] and [`biumbilical_check`], mapping singular points
/// to [`PointClass::Degenerate`].
pub fn classify_point(jet: &HypersurfaceJet, tol: f64) -> Result<PointClass> {
    match shape_data(jet) {
        Ok(s) => Ok(PointClass::Regular(biumbilical_check(&s, tol))),
        Err(GeomError::DegenerateMetric(_)) | Err(GeomError::LinearlyDependent(_)) => Ok(PointClass::Degenerate),
        Err(e) => Err(e),
    }
}

/// Coordinates of a tangent vector pushed into E^4 through the jet.
pub fn push_forward(jet: &HypersurfaceJet, v: &Vector3<f64>) -> Vec4 {
    jet.d1[0] * v[0] + jet.d1[1] * v[1] + jet.d1[2] * v[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{CompactForm, ExplicitForm, NormalField, RGeneral, SolutionParams, SphereL};
    use crate::kernel::{scalar_jet, surface_jet, ConstantMap};

    fn params() -> SolutionParams {
        SolutionParams::new(0.6, 0.8, [0.3, -1.2, 0.7, 0.5]).unwrap()
    }

    #[test]
    fn constant_support_function_gives_l_plus_w_n() {
        let p = params();
        let l = surface_jet(&SphereL(p), 0.4, -0.3).unwrap();
        let r = ScalarJet2::constant(1.0);
        let n = fourth_frame_vector(&l.value, &l.d_u, &l.d_v).unwrap();
        let x = envelope_point(&l, &r, 0.7).unwrap();
        assert!((x - (l.value + 0.7 * n)).norm() < 1e-15);
        let on_sphere = envelope_point(&l, &r, 0.0).unwrap();
        assert!((on_sphere.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn envelope_point_rejects_non_isothermal_jet() {
        let p = params();
        let mut l = surface_jet(&SphereL(p), 0.4, -0.3).unwrap();
        l.d_v *= 1.5;
        let r = ScalarJet2::constant(1.0);
        assert!(matches!(envelope_point(&l, &r, 0.0), Err(GeomError::NotIsothermal { .. })));
        let flat = surface_jet(&ConstantMap(Vec4::x()), 0.0, 0.0).unwrap();
        assert!(matches!(envelope_point(&flat, &r, 0.0), Err(GeomError::SmallMetric(_))));
    }

    #[test]
    fn envelope_matches_explicit_form() {
        let p = params();
        let explicit = ExplicitForm::new(p).unwrap();
        for &(x, y, w) in &[(0.1, 0.2, 0.3), (-1.4, 2.5, -2.0), (2.2, -0.9, 1.1)] {
            let l = surface_jet(&SphereL(p), x, y).unwrap();
            let r = scalar_jet(&RGeneral(p), x, y).unwrap();
            let env = envelope_point(&l, &r, w).unwrap();
            let exp = Vec4::from(explicit.eval(x, y, w).unwrap());
            assert!((env - exp).norm() < 1e-13, "{env} vs {exp}");
        }
    }

    #[test]
    fn ruling_direction_is_the_normal_field() {
        let p = params();
        let map = EnvelopeMap { l: SphereL(p), r: RGeneral(p) };
        let (x, y, w) = (0.6, 1.3, -0.4);
        let jet = hypersurface_jet(&map, x, y, w).unwrap();
        let n = Vec4::from(NormalField(p).eval(x, y));
        assert!((jet.d1[2] - n).norm() < 1e-14);
        assert!(jet.d2[2][2].norm() < 1e-14);
        assert!(jet.mixed_asymmetry() < 1e-14);
    }

    #[test]
    fn closed_form_is_biumbilical_and_type_two() {
        let p = params();
        let form = CompactForm::new(p).unwrap();
        let jet = hypersurface_jet(&form, 0.3, -0.8, 1.5).unwrap();
        let s = shape_data(&jet).unwrap();
        assert!(s.self_adjointness_defect() < 1e-10);
        let rep = biumbilical_check(&s, EIGEN_TOL);
        assert!(rep.is_type_two && rep.is_biumbilical, "{rep:?}");
        assert!(rep.eigenvalues[0].abs() > 1e-3);
    }

    #[test]
    fn cylinder_is_rejected() {
        let jet = hypersurface_jet(&Cylinder, 0.2, 0.7, -0.3).unwrap();
        let s = shape_data(&jet).unwrap();
        assert!((s.eigenvalues[0].abs() - 1.0).abs() < 1e-14);
        assert!(s.eigenvalues[1].abs() < 1e-14 && s.eigenvalues[2].abs() < 1e-14);
        let rep = biumbilical_check(&s, EIGEN_TOL);
        assert!(!rep.is_type_two && !rep.is_biumbilical);
    }

    #[test]
    fn check_on_given_spectra() {
        let mut s = shape_data(&hypersurface_jet(&Cylinder, 0.0, 0.0, 0.0).unwrap()).unwrap();
        s.eigenvalues = [2.0, 2.0, 0.0];
        let rep = biumbilical_check(&s, EIGEN_TOL);
        assert!(rep.is_type_two && rep.is_biumbilical);
        s.eigenvalues = [2.0, 1.0, 0.0];
        let rep = biumbilical_check(&s, EIGEN_TOL);
        assert!(rep.is_type_two && !rep.is_biumbilical);
        s.eigenvalues = [0.0; 3];
        assert!(!biumbilical_check(&s, EIGEN_TOL).is_type_two);
    }

    #[test]
    fn focal_point_is_reported_degenerate() {
        let p = params();
        let form = CompactForm::new(p).unwrap();
        let (x, y) = (0.5, 0.5);
        let jet = hypersurface_jet(&form, x, y, form.focal_w(x, y)).unwrap();
        assert!(matches!(shape_data(&jet), Err(GeomError::DegenerateMetric(_))));
        assert_eq!(classify_point(&jet, EIGEN_TOL).unwrap(), PointClass::Degenerate);
    }

    #[test]
    fn finite_difference_jet_tracks_dual_jet() {
        let p = params();
        let form = CompactForm::new(p).unwrap();
        let (x, y, w) = (0.2, 0.4, 0.9);
        let exact = hypersurface_jet(&form, x, y, w).unwrap();
        let fd = hypersurface_jet_fd(|a, b, c| Ok(Vec4::from(form.eval(a, b, c)?)), x, y, w, 1e-4).unwrap();
        for i in 0..3 {
            assert!((exact.d1[i] - fd.d1[i]).norm() < 1e-7);
            for j in 0..3 {
                assert!((exact.d2[i][j] - fd.d2[i][j]).norm() < 1e-5);
            }
        }
    }
}
