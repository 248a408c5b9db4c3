//! Damped Gauss-Newton for the discretized surface system with Dirichlet
//! data. Unknowns are the four components of `l` at every interior node;
//! each interior node contributes the two vector equations and the three
//! constraints, all divided by `E` so the rows are scale-free.

use crate::error::{GeomError, Result};
use crate::grid::{GridField, GridSpec};
use crate::jet::Jet;
use crate::kernel::Vec4;
use crate::linalg::{norm, SparseLsq};
use crate::scalar::{dot4, Scalar};

/// Residual rows per interior node: 4 + 4 vector components, 3 constraints.
pub const RESIDUALS_PER_NODE: usize = 11;

/// Residual of one node from its slots `[l, l_u, l_v, l_uu, l_uv, l_vv]`.
pub fn l_residual_scaled<S: Scalar>(slots: &[[S; 4]; 6]) -> [S; RESIDUALS_PER_NODE] {
    let [l, l_u, l_v, l_uu, l_uv, l_vv] = slots;
    let e = dot4(l_u, l_u);
    let inv = e.recip();
    let ku = dot4(l_uu, l_u).scale(2.0) * inv;
    let kv = dot4(l_uv, l_u).scale(2.0) * inv;
    let mut out = [S::zero(); RESIDUALS_PER_NODE];
    for k in 0..4 {
        out[k] = (l_uu[k] - l_vv[k] - ku * l_u[k] + kv * l_v[k]) * inv;
        out[4 + k] = (l_uv[k].scale(2.0) - kv * l_u[k] - ku * l_v[k]) * inv;
    }
    out[8] = (e - dot4(l_v, l_v)) * inv;
    out[9] = dot4(l_u, l_v) * inv;
    out[10] = dot4(l, l) - S::one();
    out
}

/// Stencil of slot `s` as `(di, dj, weight)` triples.
fn stencil(slot: usize, hx: f64, hy: f64) -> Vec<(isize, isize, f64)> {
    let q = 1.0 / (4.0 * hx * hy);
    match slot {
        0 => vec![(0, 0, 1.0)],
        1 => vec![(1, 0, 0.5 / hx), (-1, 0, -0.5 / hx)],
        2 => vec![(0, 1, 0.5 / hy), (0, -1, -0.5 / hy)],
        3 => vec![(1, 0, 1.0 / (hx * hx)), (0, 0, -2.0 / (hx * hx)), (-1, 0, 1.0 / (hx * hx))],
        4 => vec![(1, 1, q), (-1, -1, q), (1, -1, -q), (-1, 1, -q)],
        _ => vec![(0, 1, 1.0 / (hy * hy)), (0, 0, -2.0 / (hy * hy)), (0, -1, 1.0 / (hy * hy))],
    }
}

fn slots_at(field: &GridField<Vec4>, i: usize, j: usize) -> [[f64; 4]; 6] {
    let (hx, hy) = (field.hx(), field.hy());
    std::array::from_fn(|s| {
        let mut acc = Vec4::zeros();
        for (di, dj, w) in stencil(s, hx, hy) {
            acc += w * field.at((i as isize + di) as usize, (j as isize + dj) as usize);
        }
        [acc[0], acc[1], acc[2], acc[3]]
    })
}

fn check_node(slots: &[[f64; 4]; 6]) -> Result<()> {
    if slots.iter().flatten().any(|v| !v.is_finite()) {
        return Err(GeomError::NonFinite("surface iterate"));
    }
    let e = dot4(&slots[1], &slots[1]);
    if !(e > super::E_MIN) {
        return Err(GeomError::SmallMetric(e));
    }
    Ok(())
}

/// Residual vector over all interior nodes, node by node.
pub fn residual_field(field: &GridField<Vec4>) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity((field.nx() - 2) * (field.ny() - 2) * RESIDUALS_PER_NODE);
    for j in 1..field.ny() - 1 {
        for i in 1..field.nx() - 1 {
            let slots = slots_at(field, i, j);
            check_node(&slots)?;
            out.extend(l_residual_scaled(&slots));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussNewtonOptions {
    pub max_iter: usize,
    /// Convergence threshold on the sup norm of the accepted update.
    pub tol: f64,
    pub max_halvings: usize,
}

impl Default for GaussNewtonOptions {
    fn default() -> Self {
        GaussNewtonOptions { max_iter: 50, tol: 1e-9, max_halvings: 20 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub converged: bool,
    /// `|r|^2 / 2` before the first and after every accepted step.
    pub objective_history: Vec<f64>,
    /// Sup norm of every accepted update.
    pub step_norms: Vec<f64>,
    /// Sup norm of the residual at the returned iterate.
    pub residual_norm: f64,
    /// Euclidean norm of `J^T r` at the returned iterate.
    pub gradient_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LSolution {
    pub field: GridField<Vec4>,
    pub report: ConvergenceReport,
}

struct Layout {
    spec: GridSpec,
}

impl Layout {
    fn unknown(&self, i: usize, j: usize) -> Option<usize> {
        if self.spec.is_boundary(i, j) {
            None
        } else {
            Some(4 * ((j - 1) * (self.spec.nx - 2) + (i - 1)))
        }
    }

    fn count(&self) -> usize {
        4 * (self.spec.nx - 2) * (self.spec.ny - 2)
    }
}

/// Linearized system `J delta ~ -r` at `field`.
fn linearize(field: &GridField<Vec4>, layout: &Layout) -> Result<SparseLsq> {
    let (hx, hy) = (field.hx(), field.hy());
    let stencils: Vec<_> = (0..6).map(|s| stencil(s, hx, hy)).collect();
    let mut sys = SparseLsq::new(layout.count());
    type D = Jet<f64, 1>;
    for j in 1..field.ny() - 1 {
        for i in 1..field.nx() - 1 {
            let slots = slots_at(field, i, j);
            check_node(&slots)?;
            let value = l_residual_scaled(&slots);
            // sensitivities[s][k][row] = d residual[row] / d slots[s][k]
            let mut sens = [[[0.0; RESIDUALS_PER_NODE]; 4]; 6];
            for s in 0..6 {
                for k in 0..4 {
                    let seeded: [[D; 4]; 6] = std::array::from_fn(|a| {
                        std::array::from_fn(|b| {
                            if (a, b) == (s, k) {
                                D::variable(slots[a][b], 0)
                            } else {
                                D::constant(slots[a][b])
                            }
                        })
                    });
                    let res = l_residual_scaled(&seeded);
                    for row in 0..RESIDUALS_PER_NODE {
                        sens[s][k][row] = res[row].g[0];
                    }
                }
            }
            for row in 0..RESIDUALS_PER_NODE {
                let mut entries = Vec::with_capacity(64);
                for (s, st) in stencils.iter().enumerate() {
                    for &(di, dj, w) in st {
                        let (ni, nj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
                        if let Some(base) = layout.unknown(ni, nj) {
                            for k in 0..4 {
                                entries.push((base + k, w * sens[s][k][row]));
                            }
                        }
                    }
                }
                sys.push_row(entries, -value[row]);
            }
        }
    }
    Ok(sys)
}

fn objective(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

fn sup(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn displaced(field: &GridField<Vec4>, layout: &Layout, delta: &[f64], t: f64) -> GridField<Vec4> {
    let mut out = field.clone();
    for j in 1..field.ny() - 1 {
        for i in 1..field.nx() - 1 {
            let base = layout.unknown(i, j).expect("interior node");
            let d = Vec4::new(delta[base], delta[base + 1], delta[base + 2], delta[base + 3]);
            out.set(i, j, field.at(i, j) + t * d);
        }
    }
    out
}

/// Minimizes the residual of the discrete system starting from `initial`.
/// Boundary nodes of `initial` are the Dirichlet data and stay fixed.
/// Each step is halved until the objective does not increase.
pub fn solve_l_gauss_newton(initial: &GridField<Vec4>, opts: GaussNewtonOptions) -> Result<LSolution> {
    let layout = Layout { spec: initial.spec() };
    if initial.values().iter().any(|v| !v.iter().all(|c| c.is_finite())) {
        return Err(GeomError::NonFinite("initial surface"));
    }
    let mut field = initial.clone();
    let mut r = residual_field(&field)?;
    let mut obj = objective(&r);
    let mut report = ConvergenceReport {
        iterations: 0,
        converged: false,
        objective_history: vec![obj],
        step_norms: Vec::new(),
        residual_norm: sup(&r),
        gradient_norm: f64::NAN,
    };
    let mut sys = linearize(&field, &layout)?;
    while report.iterations < opts.max_iter {
        report.iterations += 1;
        let delta = sys.solve_normal()?;
        let full = sup(&delta);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = displaced(&field, &layout, &delta, t);
            if let Ok(rt) = residual_field(&trial) {
                let ot = objective(&rt);
                if ot <= obj {
                    accepted = Some((trial, rt, ot));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((trial, rt, ot)) = accepted else {
            if full < opts.tol {
                report.converged = true;
                break;
            }
            return Err(GeomError::Diverged { iteration: report.iterations });
        };
        field = trial;
        r = rt;
        obj = ot;
        report.objective_history.push(obj);
        report.step_norms.push(t * full);
        sys = linearize(&field, &layout)?;
        if t * full < opts.tol {
            report.converged = true;
            break;
        }
    }
    report.residual_norm = sup(&r);
    report.gradient_norm = norm(&sys.mul_t(&r));
    if !report.converged {
        return Err(GeomError::NotConverged { iterations: report.iterations, residual: report.residual_norm });
    }
    Ok(LSolution { field, report })
}
