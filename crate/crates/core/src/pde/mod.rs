//! The nonlinear elliptic system for a unit isothermal surface `l` and the
//! linear system for its support function `r`: residual evaluators, the
//! reflection pair behind the characteristic determinant, and solvers.

mod constructive;
mod gauss_newton;
mod scalar_grid;
mod sphere_fit;

pub use constructive::{solve_r_constructive, ConstructiveInput, ConstructiveSolution};
pub use gauss_newton::{
    l_residual_scaled, residual_field, solve_l_gauss_newton, ConvergenceReport, GaussNewtonOptions, LSolution,
    RESIDUALS_PER_NODE,
};
pub use scalar_grid::{fit_r_family, solve_r_grid, FamilyFit, RGridOptions, RGridSolution, DIRECT_SOLVE_MAX_NODES};
pub use sphere_fit::{verify_sphere_theorem, FitResult};

use nalgebra::Matrix4;

use crate::error::{GeomError, Result};
use crate::kernel::{Jet2Surface, ScalarJet2, Vec4};

/// Smallest admissible `E`.
pub const E_MIN: f64 = 1e-12;

/// Residuals of the surface system at one point: the two vector equations
/// and the constraints `E - G`, `F`, `<l, l> - 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LSystemResidual {
    pub first: Vec4,
    pub second: Vec4,
    pub e_minus_g: f64,
    pub f: f64,
    pub norm_defect: f64,
}

impl LSystemResidual {
    /// Largest component of either vector equation.
    pub fn max_pde(&self) -> f64 {
        self.first.amax().max(self.second.amax())
    }

    pub fn max_constraint(&self) -> f64 {
        self.e_minus_g.abs().max(self.f.abs()).max(self.norm_defect.abs())
    }
}

/// `l_uu - l_vv - (E_u/E) l_u + (E_v/E) l_v`, `2 l_uv - (E_v/E) l_u - (E_u/E) l_v`
/// with `E = <l_u, l_u>`, `E_u = 2 <l_uu, l_u>`, `E_v = 2 <l_uv, l_u>`,
/// plus the three pointwise constraints.
pub fn residual_l_system(jet: &Jet2Surface) -> Result<LSystemResidual> {
    let e = jet.d_u.norm_squared();
    if !(e > E_MIN) {
        return Err(GeomError::SmallMetric(e));
    }
    let e_u = 2.0 * jet.d_uu.dot(&jet.d_u);
    let e_v = 2.0 * jet.d_uv.dot(&jet.d_u);
    let (ku, kv) = (e_u / e, e_v / e);
    Ok(LSystemResidual {
        first: jet.d_uu - jet.d_vv - ku * jet.d_u + kv * jet.d_v,
        second: 2.0 * jet.d_uv - kv * jet.d_u - ku * jet.d_v,
        e_minus_g: e - jet.d_v.norm_squared(),
        f: jet.d_u.dot(&jet.d_v),
        norm_defect: jet.value.norm_squared() - 1.0,
    })
}

/// The two scalar equations for the support function `r` with metric
/// factor `E`: `r_uu - r_vv - (E_u/E) r_u + (E_v/E) r_v` and
/// `2 r_uv - (E_v/E) r_u - (E_u/E) r_v`.
pub fn residual_r_system(r: &ScalarJet2, e: &ScalarJet2) -> Result<(f64, f64)> {
    if !(e.value > E_MIN) {
        return Err(GeomError::SmallMetric(e.value));
    }
    let (ku, kv) = (e.d_u / e.value, e.d_v / e.value);
    Ok((
        r.d_uu - r.d_vv - ku * r.d_u + kv * r.d_v,
        2.0 * r.d_uv - kv * r.d_u - ku * r.d_v,
    ))
}

/// Reflections `A = I - 2 l_u l_u^T / |l_u|^2`, `B = I - 2 l_v l_v^T / |l_v|^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HouseholderPair {
    pub a: Matrix4<f64>,
    pub b: Matrix4<f64>,
}

fn reflection(v: &Vec4) -> Matrix4<f64> {
    Matrix4::identity() - 2.0 * (v * v.transpose()) / v.norm_squared()
}

pub fn householder_pair(jet: &Jet2Surface) -> Result<HouseholderPair> {
    for v in [&jet.d_u, &jet.d_v] {
        if !(v.norm_squared() > E_MIN) {
            return Err(GeomError::SmallMetric(v.norm_squared()));
        }
    }
    Ok(HouseholderPair { a: reflection(&jet.d_u), b: reflection(&jet.d_v) })
}

/// `det(mu A + B)`.
pub fn char_det(pair: &HouseholderPair, mu: f64) -> f64 {
    (mu * pair.a + pair.b).determinant()
}

/// `det(mu I + A^{-1} B)`, the characteristic polynomial in `mu = lambda^2`.
pub fn char_poly(pair: &HouseholderPair, mu: f64) -> f64 {
    let a_inv = pair.a.try_inverse().expect("reflections are invertible");
    (mu * Matrix4::identity() + a_inv * pair.b).determinant()
}

/// Residual of the reflection form `A l_uu - B l_vv`. Under the isothermal
/// constraints it equals the first vector equation of the surface system;
/// the sum `A l_uu + B l_vv` instead reduces to `l_uu + l_vv - ...`, which
/// the sphere does not satisfy.
pub fn householder_form_residual(jet: &Jet2Surface) -> Result<Vec4> {
    let pair = householder_pair(jet)?;
    Ok(pair.a * jet.d_uu - pair.b * jet.d_vv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{RGeneral, SolutionParams, SphereL};
    use crate::kernel::{metric_e_jet, scalar_jet, surface_jet, SurfaceMap};
    use crate::scalar::Scalar;

    struct Linear;
    impl SurfaceMap for Linear {
        fn eval<S: Scalar>(&self, u: S, v: S) -> [S; 4] {
            [u, v, S::one(), S::zero()]
        }
    }

    struct Plane;
    impl SurfaceMap for Plane {
        fn eval<S: Scalar>(&self, u: S, v: S) -> [S; 4] {
            let inv = (u * u + v * v).sqrt().recip();
            [u * inv, v * inv, S::zero(), S::zero()]
        }
    }

    #[test]
    fn sphere_satisfies_surface_system() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        for &(x, y) in &[(0.0, 0.0), (1.1, -0.6), (-2.4, 2.9)] {
            let res = residual_l_system(&surface_jet(&SphereL(p), x, y).unwrap()).unwrap();
            assert!(res.max_pde() < 1e-14 && res.max_constraint() < 1e-14, "{res:?}");
            let hh = householder_form_residual(&surface_jet(&SphereL(p), x, y).unwrap()).unwrap();
            assert!(hh.norm() < 1e-13, "{hh}");
        }
    }

    #[test]
    fn reflection_sum_is_not_the_surface_system() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        let jet = surface_jet(&SphereL(p), 0.3, 0.5).unwrap();
        let pair = householder_pair(&jet).unwrap();
        let res = residual_l_system(&jet).unwrap();
        assert!((pair.a * jet.d_uu + pair.b * jet.d_vv).norm() > 0.5);
        assert!((householder_form_residual(&jet).unwrap() - res.first).norm() < 1e-14);
    }

    #[test]
    fn linear_map_fails_only_the_unit_constraint() {
        let res = residual_l_system(&surface_jet(&Linear, 0.3, 0.4).unwrap()).unwrap();
        assert_eq!(res.max_pde(), 0.0);
        assert_eq!(res.e_minus_g, 0.0);
        assert!((res.norm_defect - 0.25).abs() < 1e-15);
    }

    #[test]
    fn radial_plane_patch_is_flagged() {
        let res = residual_l_system(&surface_jet(&Plane, 0.7, 0.2).unwrap()).unwrap();
        assert!(res.max_pde().max(res.max_constraint()) > 1e-3);
    }

    #[test]
    fn support_function_residuals() {
        let p = SolutionParams::new(0.6, 0.8, [0.3, -1.2, 0.7, 0.5]).unwrap();
        let (x, y) = (0.8, -1.7);
        let e = metric_e_jet(&SphereL(p), x, y).unwrap();
        let (r1, r2) = residual_r_system(&scalar_jet(&RGeneral(p), x, y).unwrap(), &e).unwrap();
        assert!(r1.abs() < 1e-13 && r2.abs() < 1e-13);

        assert_eq!(residual_r_system(&ScalarJet2::constant(2.0), &e).unwrap(), (0.0, 0.0));

        // r = x: the mixed equation holds, the other leaves -2 tanh x
        let r = ScalarJet2 { value: x, d_u: 1.0, ..ScalarJet2::constant(0.0) };
        let (r1, r2) = residual_r_system(&r, &e).unwrap();
        assert!((r1 - 2.0 * x.tanh()).abs() < 1e-13, "{r1}");
        assert_eq!(r2, 0.0);
        assert!(matches!(residual_r_system(&r, &ScalarJet2::constant(0.0)), Err(GeomError::SmallMetric(_))));
    }

    #[test]
    fn reflections_are_involutions() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        let jet = surface_jet(&SphereL(p), 0.5, 0.9).unwrap();
        let pair = householder_pair(&jet).unwrap();
        for m in [pair.a, pair.b] {
            assert!((m * m - Matrix4::identity()).amax() < 1e-15);
            assert!((m.determinant() + 1.0).abs() < 1e-14);
        }
        assert!((pair.a * jet.d_u + jet.d_u).norm() < 1e-15);
        assert!((pair.a * jet.d_v - jet.d_v).norm() < 1e-15);
    }

    #[test]
    fn characteristic_polynomial_factors() {
        // With orthogonal l_u, l_v of equal length, A B has spectrum
        // (-1, -1, 1, 1), so det(mu I + A^{-1} B) = (mu - 1)^2 (mu + 1)^2.
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        let pair = householder_pair(&surface_jet(&SphereL(p), -0.3, 2.2).unwrap()).unwrap();
        assert!((char_poly(&pair, 0.0) - 1.0).abs() < 1e-14);
        assert!(char_poly(&pair, -1.0).abs() < 1e-14);
        for mu in [0.5, 1.0, 2.0, -3.0] {
            let expected = (mu - 1.0f64).powi(2) * (mu + 1.0f64).powi(2);
            assert!((char_poly(&pair, mu) - expected).abs() < 1e-12);
            assert!((char_det(&pair, mu) + expected).abs() < 1e-12);
        }
    }
}
