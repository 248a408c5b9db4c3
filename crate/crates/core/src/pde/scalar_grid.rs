//! Finite-difference least-squares solver for the support-function system
//! over the sphere chart, where `E_u / E = -2 tanh x` and `E_v = 0`:
//! `r_xx - r_yy + 2 tanh(x) r_x = 0`, `r_xy + tanh(x) r_y = 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::grid::{GridField, GridSpec};
use crate::linalg::SparseLsq;

/// Largest node count per axis handled by the banded direct solve; larger
/// grids go through CGLS.
pub const DIRECT_SOLVE_MAX_NODES: usize = 129;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RGridOptions {
    pub cgls_tol: f64,
    pub cgls_max_iter: usize,
}

impl Default for RGridOptions {
    fn default() -> Self {
        RGridOptions { cgls_tol: 1e-12, cgls_max_iter: 20_000 }
    }
}

/// Least-squares coefficients in the basis `1, cos y / cosh x, sin y / cosh x, tanh x`
/// and the worst pointwise deviation of the field from the fitted member.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyFit {
    pub c: [f64; 4],
    pub fit_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RGridSolution {
    pub field: GridField<f64>,
    pub fit: FamilyFit,
    /// Worst absolute residual of the discrete equations at interior nodes.
    pub equation_residual: f64,
    pub used_direct_solve: bool,
}

fn basis(x: f64, y: f64) -> [f64; 4] {
    let s = 1.0 / x.cosh();
    [1.0, y.cos() * s, y.sin() * s, x.tanh()]
}

/// Projects a sampled field onto the four-parameter solution family.
pub fn fit_r_family(field: &GridField<f64>) -> Result<FamilyFit> {
    let n = field.values().len();
    let mut m = DMatrix::zeros(n, 4);
    let mut rhs = DVector::zeros(n);
    for j in 0..field.ny() {
        for i in 0..field.nx() {
            let k = field.index(i, j);
            let b = basis(field.x(i), field.y(j));
            for (col, v) in b.iter().enumerate() {
                m[(k, col)] = *v;
            }
            rhs[k] = field.at(i, j);
        }
    }
    let svd = m.clone().svd(true, true);
    if svd.singular_values.min() <= 1e-10 * svd.singular_values.max() {
        return Err(GeomError::FitAmbiguous);
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|_| GeomError::FitAmbiguous)?;
    let fit_residual = (&m * &coef - rhs).amax();
    Ok(FamilyFit { c: [coef[0], coef[1], coef[2], coef[3]], fit_residual })
}

fn interior_rows(spec: &GridSpec, i: usize, j: usize) -> [Vec<(usize, f64)>; 2] {
    let (hx, hy) = (spec.hx(), spec.hy());
    let t = spec.x(i).tanh();
    let id = |i: usize, j: usize| j * spec.nx + i;
    let first = vec![
        (id(i + 1, j), 1.0 / (hx * hx) + t / hx),
        (id(i - 1, j), 1.0 / (hx * hx) - t / hx),
        (id(i, j), -2.0 / (hx * hx) + 2.0 / (hy * hy)),
        (id(i, j + 1), -1.0 / (hy * hy)),
        (id(i, j - 1), -1.0 / (hy * hy)),
    ];
    let q = 1.0 / (4.0 * hx * hy);
    let second = vec![
        (id(i + 1, j + 1), q),
        (id(i - 1, j - 1), q),
        (id(i + 1, j - 1), -q),
        (id(i - 1, j + 1), -q),
        (id(i, j + 1), t / (2.0 * hy)),
        (id(i, j - 1), -t / (2.0 * hy)),
    ];
    [first, second]
}

/// Solves the discrete overdetermined system with Dirichlet data taken from
/// `boundary` on the edge nodes, then fits the solution family.
pub fn solve_r_grid<F: Fn(f64, f64) -> f64>(spec: GridSpec, boundary: F, opts: RGridOptions) -> Result<RGridSolution> {
    let mut sys = SparseLsq::new(spec.nx * spec.ny);
    // Dirichlet rows carry the same scale as the interior stencils.
    let weight = 1.0 / (spec.hx() * spec.hy());
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            if spec.is_boundary(i, j) {
                let g = boundary(spec.x(i), spec.y(j));
                if !g.is_finite() {
                    return Err(GeomError::NonFinite("boundary data"));
                }
                sys.push_row([(j * spec.nx + i, weight)], weight * g);
            } else {
                for row in interior_rows(&spec, i, j) {
                    sys.push_row(row, 0.0);
                }
            }
        }
    }
    let used_direct_solve = spec.nx.max(spec.ny) <= DIRECT_SOLVE_MAX_NODES;
    let values = if used_direct_solve {
        sys.solve_normal()?
    } else {
        sys.solve_cgls(opts.cgls_tol, opts.cgls_max_iter)?
    };
    let mut equation_residual = 0.0f64;
    for j in 1..spec.ny - 1 {
        for i in 1..spec.nx - 1 {
            for row in interior_rows(&spec, i, j) {
                let s: f64 = row.iter().map(|&(c, v)| v * values[c]).sum();
                equation_residual = equation_residual.max(s.abs());
            }
        }
    }
    let field = GridField::new(spec, values)?;
    let fit = fit_r_family(&field)?;
    Ok(RGridSolution { field, fit, equation_residual, used_direct_solve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{r_general, SolutionParams};

    #[test]
    fn family_member_is_recovered() {
        let p = SolutionParams::new(0.6, 0.8, [0.4, -0.7, 1.1, 0.3]).unwrap();
        let spec = GridSpec::square(17, -1.0, 1.0).unwrap();
        let sol = solve_r_grid(spec, |x, y| r_general(&p, x, y), RGridOptions::default()).unwrap();
        assert!(sol.used_direct_solve);
        for (got, want) in sol.fit.c.iter().zip(p.c()) {
            assert!((got - want).abs() < 1e-2, "{:?}", sol.fit);
        }
        assert!(sol.equation_residual < 1e-2, "{}", sol.equation_residual);
    }

    #[test]
    fn constant_is_exact() {
        let spec = GridSpec::square(9, -1.0, 1.0).unwrap();
        let sol = solve_r_grid(spec, |_, _| 2.5, RGridOptions::default()).unwrap();
        assert!(sol.field.values().iter().all(|v| (v - 2.5).abs() < 1e-10));
        assert!((sol.fit.c[0] - 2.5).abs() < 1e-10);
        assert!(sol.fit.fit_residual < 1e-10);
    }

    #[test]
    fn fit_of_exact_samples() {
        let p = SolutionParams::new(0.6, 0.8, [0.4, -0.7, 1.1, 0.3]).unwrap();
        let spec = GridSpec::square(11, -1.0, 1.0).unwrap();
        let fit = fit_r_family(&GridField::sample(spec, |x, y| r_general(&p, x, y))).unwrap();
        for (got, want) in fit.c.iter().zip(p.c()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn nonfinite_boundary_is_rejected() {
        let spec = GridSpec::square(7, -1.0, 1.0).unwrap();
        let res = solve_r_grid(spec, |x, _| if x > 0.9 { f64::NAN } else { 0.0 }, RGridOptions::default());
        assert!(matches!(res, Err(GeomError::NonFinite(_))));
    }
}
