//! Pointwise algebraic curvature of hypersurfaces in flat space via the
//! Gauss equation `R(X,Y)Z = g(AY,Z) AX - g(AX,Z) AY`, the semi-symmetry
//! residual `R(X,Y)·R`, the nullity distribution, and the Gauss curvature
//! and derivative formulas of unit surfaces in the 3-sphere.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::envelope::ShapeData;
use crate::error::{GeomError, Result};
use crate::grid::GridField;
use crate::jet::Jet;
use crate::kernel::{metric_e_jet, oriented_unit_normal, ScalarJet2, SurfaceMap, Vec4};
use crate::scalar::{dot4, Scalar};

/// Curvature operator determined by a metric and a shape operator.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicCurvature {
    metric: DMatrix<f64>,
    shape_operator: DMatrix<f64>,
}

impl AlgebraicCurvature {
    pub fn new(metric: DMatrix<f64>, shape_operator: DMatrix<f64>) -> Result<Self> {
        let d = metric.nrows();
        if !(d == 2 || d == 3) {
            return Err(GeomError::DimensionMismatch { expected: 3, got: d });
        }
        for m in [&metric, &shape_operator] {
            if m.nrows() != d || m.ncols() != d {
                return Err(GeomError::DimensionMismatch { expected: d, got: m.ncols().max(m.nrows()) });
            }
        }
        Ok(AlgebraicCurvature { metric, shape_operator })
    }

    /// Flat metric and a symmetric shape operator.
    pub fn euclidean(shape_operator: DMatrix<f64>) -> Result<Self> {
        let d = shape_operator.nrows();
        Self::new(DMatrix::identity(d, d), shape_operator)
    }

    pub fn from_shape_data(s: &ShapeData) -> Self {
        AlgebraicCurvature {
            metric: DMatrix::from_iterator(3, 3, s.metric.iter().copied()),
            shape_operator: DMatrix::from_iterator(3, 3, s.shape_operator.iter().copied()),
        }
    }

    pub fn dimension(&self) -> usize {
        self.metric.nrows()
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    /// The same curvature expressed in a g-orthonormal frame, together with
    /// the frame (columns, original coordinates).
    fn orthonormal(&self) -> (AlgebraicCurvature, DMatrix<f64>) {
        let eig = SymmetricEigen::new(self.metric.clone());
        let d = self.dimension();
        let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
        let root = &eig.eigenvectors * sqrt * eig.eigenvectors.transpose();
        let frame = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
        let a = &root * &self.shape_operator * &frame;
        let a = 0.5 * (&a + a.transpose());
        (AlgebraicCurvature { metric: DMatrix::identity(d, d), shape_operator: a }, frame)
    }

    fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.metric * y)[(0, 0)]
    }

    /// `R(e_i, e_j) e_k` for the coordinate basis, indexed `[i][j][k]`.
    fn basis_table(&self) -> Vec<Vec<Vec<DVector<f64>>>> {
        let d = self.dimension();
        let e = |i: usize| DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 });
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| self.apply_unchecked(&e(i), &e(j), &e(k))).collect())
                    .collect()
            })
            .collect()
    }

    fn apply_unchecked(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let ax = &self.shape_operator * x;
        let ay = &self.shape_operator * y;
        self.inner(&ay, z) * &ax - self.inner(&ax, z) * &ay
    }
}

/// `R(X,Y)Z = g(AY,Z) AX - g(AX,Z) AY`.
pub fn curvature_apply(
    c: &AlgebraicCurvature,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> Result<DVector<f64>> {
    let d = c.dimension();
    for v in [x, y, z] {
        if v.len() != d {
            return Err(GeomError::DimensionMismatch { expected: d, got: v.len() });
        }
    }
    Ok(c.apply_unchecked(x, y, z))
}

/// Sectional curvature of the plane spanned by `x`, `y`.
pub fn sectional_curvature(c: &AlgebraicCurvature, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    let r = curvature_apply(c, x, y, y)?;
    let area = c.inner(x, x) * c.inner(y, y) - c.inner(x, y).powi(2);
    Ok(c.inner(&r, x) / area)
}

/// Multilinear evaluation of `R(u, w) v` from a basis table.
fn r_eval(t: &[Vec<Vec<DVector<f64>>>], u: &DVector<f64>, w: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let d = u.len();
    let mut out = DVector::zeros(d);
    for a in 0..d {
        if u[a] == 0.0 {
            continue;
        }
        for b in 0..d {
            if w[b] == 0.0 {
                continue;
            }
            for k in 0..d {
                if v[k] != 0.0 {
                    out.axpy(u[a] * w[b] * v[k], &t[a][b][k], 1.0);
                }
            }
        }
    }
    out
}

/// Max over an orthonormal basis of `|(R(X,Y)·R)(Z,W)V|`, normalized by
/// `|R|^2` (Frobenius norm of the (0,4) tensor). Zero when `R = 0`.
pub fn semisymmetry_residual(c: &AlgebraicCurvature) -> f64 {
    let (on, _) = c.orthonormal();
    let d = on.dimension();
    let t = on.basis_table();
    let norm_sq: f64 = t.iter().flatten().flatten().map(|v| v.norm_squared()).sum();
    if norm_sq == 0.0 {
        return 0.0;
    }
    let e: Vec<DVector<f64>> = (0..d).map(|i| DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 })).collect();
    let mut worst = 0.0f64;
    for x in 0..d {
        for y in 0..d {
            let rxy = |v: &DVector<f64>| r_eval(&t, &e[x], &e[y], v);
            for z in 0..d {
                let rz = rxy(&e[z]);
                for w in 0..d {
                    let rw = rxy(&e[w]);
                    for v in 0..d {
                        let term = rxy(&t[z][w][v])
                            - r_eval(&t, &rz, &e[w], &e[v])
                            - r_eval(&t, &e[z], &rw, &e[v])
                            - r_eval(&t, &e[z], &e[w], &rxy(&e[v]));
                        worst = worst.max(term.norm());
                    }
                }
            }
        }
    }
    worst / norm_sq
}

/// Nullity space of the curvature and its orthogonal complement.
#[derive(Clone, Debug, PartialEq)]
pub struct NullityData {
    pub nullity_dim: usize,
    /// g-orthonormal basis of the nullity space (coordinate components).
    pub nullity_basis: Vec<DVector<f64>>,
    /// g-orthonormal basis of its complement.
    pub conullity_basis: Vec<DVector<f64>>,
    /// Set when a singular value sits between the zero threshold and a
    /// thousandfold margin above it.
    pub ambiguous: bool,
    pub is_conullity_two: bool,
}

/// Nullity from the singular vectors of `X -> (R(X, e_j) e_k)_{j,k}`.
pub fn nullity(c: &AlgebraicCurvature, tol: f64) -> NullityData {
    let (on, frame) = c.orthonormal();
    let d = on.dimension();
    let t = on.basis_table();
    let rows = d * d * d;
    let m = DMatrix::from_fn(rows, d, |row, i| {
        let (j, k, l) = (row / (d * d), (row / d) % d, row % d);
        t[i][j][k][l]
    });
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s_max = svd.singular_values.max();
    let mut nullity_basis = Vec::new();
    let mut conullity_basis = Vec::new();
    let mut ambiguous = false;
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        let v = &frame * v_t.row(idx).transpose();
        if s_max == 0.0 || s <= tol * s_max {
            nullity_basis.push(v);
        } else {
            if s <= 1e3 * tol * s_max {
                ambiguous = true;
            }
            conullity_basis.push(v);
        }
    }
    let nullity_dim = nullity_basis.len();
    NullityData {
        nullity_dim,
        nullity_basis,
        conullity_basis,
        ambiguous,
        is_conullity_two: d - nullity_dim == 2,
    }
}

/// Gauss curvature of an isothermal metric `E (du^2 + dv^2)` from the
/// 2-jet of `E`: `K = -(1 / 2E) Laplacian(log E)`.
pub fn gauss_curvature_2d(e_jet: &ScalarJet2) -> Result<f64> {
    let e = e_jet.value;
    if !(e > 0.0) {
        return Err(GeomError::SmallMetric(e));
    }
    let lap_log = (e_jet.d_uu + e_jet.d_vv) / e - (e_jet.d_u.powi(2) + e_jet.d_v.powi(2)) / (e * e);
    Ok(-lap_log / (2.0 * e))
}

/// Intrinsic Gauss curvature of an analytic isothermal surface map.
pub fn gauss_curvature_analytic<M: SurfaceMap>(map: &M, u: f64, v: f64) -> Result<f64> {
    gauss_curvature_2d(&metric_e_jet(map, u, v)?)
}

/// Intrinsic Gauss curvature of a sampled isothermal surface at node
/// `(i, j)`: `E` by central differences of `l`, then the log-E Laplacian
/// by a five-point stencil. Needs two nodes of margin to every edge.
pub fn gauss_curvature_grid(field: &GridField<Vec4>, i: usize, j: usize) -> Result<f64> {
    if i < 2 || j < 2 || i + 2 >= field.nx() || j + 2 >= field.ny() {
        return Err(GeomError::BoundaryNode { i, j });
    }
    let e_at = |i: usize, j: usize| {
        let du = (field.at(i + 1, j) - field.at(i - 1, j)) / (2.0 * field.hx());
        du.norm_squared()
    };
    let e = e_at(i, j);
    if !(e > 0.0) {
        return Err(GeomError::SmallMetric(e));
    }
    let log = |i: usize, j: usize| e_at(i, j).ln();
    let (hx, hy) = (field.hx(), field.hy());
    let lap = (log(i + 1, j) - 2.0 * log(i, j) + log(i - 1, j)) / (hx * hx)
        + (log(i, j + 1) - 2.0 * log(i, j) + log(i, j - 1)) / (hy * hy);
    Ok(-lap / (2.0 * e))
}

/// Residuals of the moving-frame relations of a unit isothermal surface
/// `l` in the 3-sphere with fourth frame vector `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeFormulaReport {
    pub samples: usize,
    /// Worst residual of the expansions of `l_uu`, `l_uv`, `l_vv` in the frame.
    pub max_formula_residual: f64,
    /// Worst `|g(l_uu, n) - g(l_vv, n)|`.
    pub max_c_mismatch: f64,
    /// Worst residual of `n_u = -(c/E) l_u`, `n_v = -(c/E) l_v`.
    pub max_normal_derivative_residual: f64,
    /// `c / E` at every sample.
    pub c_over_e: Vec<f64>,
    /// `max(c/E) - min(c/E)`.
    pub c_over_e_spread: f64,
    /// Worst `|n_u|, |n_v|`; vanishes iff the surface spans a fixed 3-space with `n`.
    pub max_normal_derivative: f64,
    /// Worst derivative of `n1 = (c l + E n) / sqrt(c^2 + E^2)`.
    pub max_n1_derivative: f64,
    /// Worst residual of `d n2 = -sqrt(1 + c0^2) dl` with `n2 = (-E l + c n) / sqrt(c^2 + E^2)`.
    pub max_n2_residual: f64,
    /// Intrinsic Gauss curvature at every sample.
    pub intrinsic_k: Vec<f64>,
    /// Worst `|K - (1 + (c/E)^2)|`.
    pub max_k_mismatch: f64,
}

type J2 = Jet<f64, 2>;

fn vals(v: &[J2; 4]) -> Vec4 {
    Vec4::from_fn(|k, _| v[k].v)
}

fn partial(v: &[J2; 4], i: usize) -> Vec4 {
    Vec4::from_fn(|k, _| v[k].g[i])
}

/// Evaluates every relation of the frame at the given parameter points.
pub fn verify_derivative_formulas<M: SurfaceMap>(map: &M, points: &[(f64, f64)]) -> Result<DerivativeFormulaReport> {
    let mut rep = DerivativeFormulaReport {
        samples: points.len(),
        max_formula_residual: 0.0,
        max_c_mismatch: 0.0,
        max_normal_derivative_residual: 0.0,
        c_over_e: Vec::with_capacity(points.len()),
        c_over_e_spread: 0.0,
        max_normal_derivative: 0.0,
        max_n1_derivative: 0.0,
        max_n2_residual: 0.0,
        intrinsic_k: Vec::with_capacity(points.len()),
        max_k_mismatch: 0.0,
    };
    for &(u, v) in points {
        let iu = J2::variable(u, 0);
        let iv = J2::variable(v, 1);
        let c = map.eval(Jet::<J2, 2>::variable(iu, 0), Jet::variable(iv, 1));
        let l: [J2; 4] = std::array::from_fn(|k| c[k].v);
        let l_u: [J2; 4] = std::array::from_fn(|k| c[k].g[0]);
        let l_v: [J2; 4] = std::array::from_fn(|k| c[k].g[1]);
        let l_uu: [J2; 4] = std::array::from_fn(|k| c[k].h[0][0]);
        let l_uv: [J2; 4] = std::array::from_fn(|k| c[k].h[0][1]);
        let l_vv: [J2; 4] = std::array::from_fn(|k| c[k].h[1][1]);
        let n = oriented_unit_normal(&l_u, &l_v, &l)?;

        let e_jet = dot4(&l_u, &l_u);
        let c_jet = dot4(&l_uu, &n);
        let e = e_jet.v;
        if !(e > 0.0) {
            return Err(GeomError::SmallMetric(e));
        }
        let (e_u, e_v) = (e_jet.g[0], e_jet.g[1]);
        let cc = c_jet.v;
        let (lf, luf, lvf, nf) = (vals(&l), vals(&l_u), vals(&l_v), vals(&n));

        let r_uu = vals(&l_uu) - (e_u / (2.0 * e) * luf - e_v / (2.0 * e) * lvf - e * lf + cc * nf);
        let r_uv = vals(&l_uv) - (e_v / (2.0 * e) * luf + e_u / (2.0 * e) * lvf);
        let r_vv = vals(&l_vv) - (-e_u / (2.0 * e) * luf + e_v / (2.0 * e) * lvf - e * lf + cc * nf);
        let formula = r_uu.norm().max(r_uv.norm()).max(r_vv.norm());
        rep.max_formula_residual = rep.max_formula_residual.max(formula);
        rep.max_c_mismatch = rep.max_c_mismatch.max((cc - dot4(&l_vv, &n).v).abs());

        let k0 = cc / e;
        let (n_u, n_v) = (partial(&n, 0), partial(&n, 1));
        let nd = (n_u + k0 * luf).norm().max((n_v + k0 * lvf).norm());
        rep.max_normal_derivative_residual = rep.max_normal_derivative_residual.max(nd);
        rep.max_normal_derivative = rep.max_normal_derivative.max(n_u.norm().max(n_v.norm()));
        rep.c_over_e.push(k0);

        let inv = (c_jet * c_jet + e_jet * e_jet).sqrt().recip();
        let n1: [J2; 4] = std::array::from_fn(|k| (c_jet * l[k] + e_jet * n[k]) * inv);
        let n2: [J2; 4] = std::array::from_fn(|k| (c_jet * n[k] - e_jet * l[k]) * inv);
        rep.max_n1_derivative = rep.max_n1_derivative.max(partial(&n1, 0).norm().max(partial(&n1, 1).norm()));
        let root = (1.0 + k0 * k0).sqrt();
        let n2_res = (partial(&n2, 0) + root * luf).norm().max((partial(&n2, 1) + root * lvf).norm());
        rep.max_n2_residual = rep.max_n2_residual.max(n2_res);

        let k = gauss_curvature_2d(&ScalarJet2::from(e_jet))?;
        rep.max_k_mismatch = rep.max_k_mismatch.max((k - (1.0 + k0 * k0)).abs());
        rep.intrinsic_k.push(k);
    }
    if let (Some(lo), Some(hi)) = (
        rep.c_over_e.iter().copied().reduce(f64::min),
        rep.c_over_e.iter().copied().reduce(f64::max),
    ) {
        rep.c_over_e_spread = hi - lo;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{SolutionParams, SphereL};

    fn dvec(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    #[test]
    fn unit_sphere_curvature_in_two_dimensions() {
        let c = AlgebraicCurvature::euclidean(DMatrix::identity(2, 2)).unwrap();
        let (x, y, z) = (dvec(&[1.0, 2.0]), dvec(&[-0.5, 1.0]), dvec(&[0.3, 0.7]));
        let r = curvature_apply(&c, &x, &y, &z).unwrap();
        let expected = y.dot(&z) * &x - x.dot(&z) * &y;
        assert!((r - expected).norm() < 1e-15);
        let k = sectional_curvature(&c, &dvec(&[1.0, 0.0]), &dvec(&[0.0, 1.0])).unwrap();
        assert_eq!(k, 1.0);
        assert!(semisymmetry_residual(&c) < 1e-15);
        assert_eq!(nullity(&c, 1e-8).nullity_dim, 0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let c = AlgebraicCurvature::euclidean(DMatrix::identity(3, 3)).unwrap();
        let bad = dvec(&[1.0, 0.0]);
        let ok = dvec(&[1.0, 0.0, 0.0]);
        assert!(matches!(curvature_apply(&c, &bad, &ok, &ok), Err(GeomError::DimensionMismatch { .. })));
        assert!(AlgebraicCurvature::euclidean(DMatrix::identity(4, 4)).is_err());
        assert!(AlgebraicCurvature::new(DMatrix::identity(3, 3), DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn kernel_direction_is_killed() {
        let a = DMatrix::from_diagonal(&dvec(&[1.5, 1.5, 0.0]));
        let c = AlgebraicCurvature::euclidean(a).unwrap();
        let kernel = dvec(&[0.0, 0.0, 1.0]);
        for y in [dvec(&[1.0, 0.0, 0.0]), dvec(&[0.3, -2.0, 1.0])] {
            for z in [dvec(&[0.0, 1.0, 0.0]), dvec(&[1.0, 1.0, 1.0])] {
                assert_eq!(curvature_apply(&c, &kernel, &y, &z).unwrap().norm(), 0.0);
            }
        }
        let n = nullity(&c, 1e-8);
        assert_eq!(n.nullity_dim, 1);
        assert!(n.is_conullity_two && !n.ambiguous);
        assert!((n.nullity_basis[0][2].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_shape_operator_has_full_nullity() {
        let c = AlgebraicCurvature::euclidean(DMatrix::zeros(3, 3)).unwrap();
        let n = nullity(&c, 1e-8);
        assert_eq!(n.nullity_dim, 3);
        assert!(!n.is_conullity_two);
        assert_eq!(semisymmetry_residual(&c), 0.0);
    }

    #[test]
    fn non_orthonormal_metric_is_handled() {
        // rank-two operator, self-adjoint for a skewed metric
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 1.5]);
        let h = DMatrix::from_row_slice(3, 3, &[1.0, 0.4, 0.0, 0.4, 0.8, 0.0, 0.0, 0.0, 0.0]);
        let a = g.clone().try_inverse().unwrap() * h;
        let c = AlgebraicCurvature::new(g, a).unwrap();
        assert!(semisymmetry_residual(&c) < 1e-13);
        let n = nullity(&c, 1e-8);
        assert_eq!(n.nullity_dim, 1);
        // basis is g-orthonormal
        let v = &n.nullity_basis[0];
        assert!(((v.transpose() * c.metric() * v)[(0, 0)] - 1.0).abs() < 1e-12);
        for w in &n.conullity_basis {
            assert!((v.transpose() * c.metric() * w)[(0, 0)].abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_gauss_curvature() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        for &(x, y) in &[(0.0, 0.0), (1.3, -2.0), (-2.7, 0.5)] {
            let k = gauss_curvature_analytic(&SphereL(p), x, y).unwrap();
            assert!((k - 1.0 / 0.36).abs() < 1e-9 * k, "{k}");
            assert!((1.0 / k.sqrt() - 0.6).abs() < 1e-10);
        }
        let great = SolutionParams::new(1.0, 0.0, [0.0; 4]).unwrap();
        assert!((gauss_curvature_analytic(&SphereL(great), 0.4, 0.2).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(gauss_curvature_2d(&ScalarJet2::constant(0.0)), Err(GeomError::SmallMetric(_))));
    }

    #[test]
    fn derivative_formulas_on_sphere() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        let pts = [(0.0, 0.0), (0.5, 1.0), (-1.5, 2.5), (2.0, -3.0)];
        let rep = verify_derivative_formulas(&SphereL(p), &pts).unwrap();
        assert!(rep.max_formula_residual < 1e-12, "{rep:?}");
        assert!(rep.max_c_mismatch < 1e-12);
        assert!(rep.max_normal_derivative_residual < 1e-12);
        for k0 in &rep.c_over_e {
            assert!((k0.abs() - 0.8 / 0.6).abs() < 1e-12);
        }
        assert!(rep.c_over_e_spread < 1e-12);
        assert!(rep.max_n1_derivative < 1e-10);
        assert!(rep.max_n2_residual < 1e-10);
        assert!(rep.max_k_mismatch < 1e-8);
    }

    #[test]
    fn great_sphere_has_constant_normal() {
        let p = SolutionParams::new(1.0, 0.0, [0.0; 4]).unwrap();
        let rep = verify_derivative_formulas(&SphereL(p), &[(0.3, 0.1), (-1.0, 2.0)]).unwrap();
        assert!(rep.c_over_e.iter().all(|c| c.abs() < 1e-15));
        assert!(rep.max_normal_derivative < 1e-15);
    }
}
