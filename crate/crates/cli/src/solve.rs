//! Grid solver commands.

use std::fmt::Write as _;

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semisym_core::closed_forms::{r_general, SphereL};
use semisym_core::kernel::RotatedSurface;
use semisym_core::pde::{
    solve_l_gauss_newton, solve_r_constructive, solve_r_grid, verify_sphere_theorem, ConstructiveInput,
    GaussNewtonOptions, RGridOptions,
};
use semisym_core::{GridField, GridSpec, SurfaceMap, Vec4};

use crate::config::Scenario;
use crate::report::{Record, Report};
use crate::{rng, CliError, Outcome};

/// Rotation of 4-space with determinant one drawn from `seed`.
pub fn random_rotation(seed: u64) -> Matrix4<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0)).qr().q();
    if q.determinant() < 0.0 {
        -q
    } else {
        q
    }
}

fn field_csv(field: &GridField<f64>) -> String {
    let mut out = String::from("x,y,r\n");
    for j in 0..field.ny() {
        for i in 0..field.nx() {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", field.x(i), field.y(j), field.at(i, j));
        }
    }
    out
}

/// Least-squares solve of the support-function system with boundary data
/// from the configured family member, plus a refinement study.
pub fn solve_r(s: &Scenario) -> Result<Outcome, CliError> {
    let p = s.params()?;
    let spec = s.grid(GridSpec::square(33, -1.0, 1.0)?)?;
    let exact = |x: f64, y: f64| r_general(&p, x, y);
    let sol = solve_r_grid(spec, exact, RGridOptions::default())?;
    let mut report = Report::new("solve-r", s.seed());
    let coef_err = sol.fit.c.iter().zip(p.c()).map(|(got, want)| (got - want).abs()).fold(0.0, f64::max);
    let nodes = spec.nx * spec.ny;
    report.push(Record::at_most("coefficient_recovery", "fitted c0..c3 = configured c0..c3", coef_err, s.tol.unwrap_or(1e-5), nodes));

    // halve the resolution twice; needs (n - 1) divisible by 4
    let coarse: Vec<usize> = [4, 2].iter().map(|d| (spec.nx - 1) / d + 1).collect();
    let mut errors = Vec::new();
    let mut orders = Vec::new();
    if (spec.nx - 1) % 4 == 0 && (spec.ny - 1) % 4 == 0 && coarse[0] >= 3 {
        for (k, &n) in coarse.iter().enumerate() {
            let ny = (spec.ny - 1) / [4, 2][k] + 1;
            let g = GridSpec::new(n, ny, spec.x_range, spec.y_range)?;
            let coarse_sol = solve_r_grid(g, exact, RGridOptions::default())?;
            errors.push(coarse_sol.field.max_distance(&GridField::sample(g, exact)));
        }
        errors.push(sol.field.max_distance(&GridField::sample(spec, exact)));
        orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    }
    let order_defect = orders.iter().map(|o| (o - 2.0).abs()).fold(if orders.is_empty() { f64::NAN } else { 0.0 }, f64::max);
    report.push(Record::at_most("convergence_order", "|observed order - 2| over two halvings", order_defect, 0.3, 3));
    report.put("coefficients", sol.fit.c.to_vec());
    report.put("refinement_errors", errors);
    report.put("observed_orders", orders);
    report.put("equation_residual", vec![sol.equation_residual]);
    report.put("family_fit_residual", vec![sol.fit.fit_residual]);
    Ok(Outcome { report, artifact: Some(field_csv(&sol.field)) })
}

/// Integrates the support function from its ODE profiles and compares with
/// the closed form; the free constant `c4` must not change the result.
pub fn solve_r_constructive_cmd(s: &Scenario) -> Result<Outcome, CliError> {
    let p = s.params()?;
    let spec = s.grid(GridSpec::new(101, 101, (-2.0, 2.0), (-3.0, 3.0))?)?;
    let [c0, c1, c2, c3] = p.c();
    let input = ConstructiveInput { c0, c1, c2, c3, c4: s.solver.c4 };
    let steps = s.solver.steps;
    let sol = solve_r_constructive(input, spec, steps, 1e-8)?;
    let exact = GridField::sample(spec, |x, y| r_general(&p, x, y));
    let nodes = spec.nx * spec.ny;
    let mut report = Report::new("solve-r-constructive", s.seed());
    report.push(Record::at_most(
        "closed_form_match",
        "integrated r = closed-form r",
        sol.field.max_distance(&exact),
        s.tol.unwrap_or(1e-7),
        nodes,
    ));
    let mut rng = rng(s.seed());
    let mut spread = 0.0f64;
    let mut c4s = Vec::new();
    for _ in 0..5 {
        let c4 = rng.gen_range(-5.0..5.0);
        c4s.push(c4);
        let other = solve_r_constructive(ConstructiveInput { c4, ..input }, spec, steps, 1e-8)?;
        spread = spread.max(other.field.max_distance(&sol.field));
    }
    report.push(Record::at_most("c4_independence", "r unchanged under c4", spread, s.tol.unwrap_or(1e-8), c4s.len()));
    report.put("c4_values", c4s);
    report.put("step_doubling_estimate", vec![sol.error_estimate]);
    Ok(Outcome { report, artifact: Some(field_csv(&sol.field)) })
}

/// Smooth interior perturbation built from the four lowest sine modes.
fn perturbation(spec: &GridSpec, rng: &mut ChaCha8Rng, amplitude: f64) -> GridField<Vec4> {
    let coef: Vec<Vec4> = (0..4).map(|_| Vec4::from_fn(|_, _| rng.gen_range(-1.0..1.0))).collect();
    let (lx, ly) = (spec.x_range.1 - spec.x_range.0, spec.y_range.1 - spec.y_range.0);
    let raw = GridField::sample(*spec, |x, y| {
        let sx = |k: f64| (k * std::f64::consts::PI * (x - spec.x_range.0) / lx).sin();
        let sy = |k: f64| (k * std::f64::consts::PI * (y - spec.y_range.0) / ly).sin();
        coef[0] * sx(1.0) * sy(1.0) + coef[1] * sx(2.0) * sy(1.0) + coef[2] * sx(1.0) * sy(2.0) + coef[3] * sx(2.0) * sy(2.0)
    });
    let peak = raw.values().iter().map(|v| v.amax()).fold(0.0, f64::max);
    let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
    let scaled = raw.values().iter().map(|v| v * scale).collect();
    GridField::new(*spec, scaled).expect("same grid")
}

/// Gauss-Newton solve for the sphere from a perturbed start with fixed
/// boundary, then the hyperplane-section fit.
pub fn solve_l(s: &Scenario) -> Result<Outcome, CliError> {
    let p = s.params()?;
    let spec = s.grid(GridSpec::square(21, -0.5, 0.5)?)?;
    let rotation = s.solver.rotation_seed.map_or_else(Matrix4::identity, random_rotation);
    let map = RotatedSurface { rotation, map: SphereL(p) };
    let exact = GridField::sample(spec, |x, y| Vec4::from(map.eval(x, y)));
    let mut rng = rng(s.seed());
    let bump = perturbation(&spec, &mut rng, s.solver.perturbation);
    let mut start = exact.clone();
    for j in 1..spec.ny - 1 {
        for i in 1..spec.nx - 1 {
            start.set(i, j, start.at(i, j) + bump.at(i, j));
        }
    }
    let opts = GaussNewtonOptions { max_iter: s.solver.max_iter, tol: s.solver.gn_tol, ..Default::default() };
    let mut report = Report::new("solve-l", s.seed());
    let nodes = spec.nx * spec.ny;
    let sol = match solve_l_gauss_newton(&start, opts) {
        Ok(sol) => sol,
        Err(e) => {
            report.push(Record::at_most("converged", &format!("solver stopped: {e}"), f64::INFINITY, 0.0, nodes));
            return Ok(Outcome { report, artifact: None });
        }
    };
    let history = &sol.report.objective_history;
    let increases = history.windows(2).filter(|w| w[1] > w[0]).count() as f64;
    report.push(Record::at_most("monotone_objective", "objective increases between iterations", increases, 0.0, history.len()));
    let tol = s.tol.unwrap_or(1e-4);
    report.push(Record::at_most("distance_to_sphere", "max |l_h - l| over nodes", sol.field.max_distance(&exact), tol, nodes));
    let fit = verify_sphere_theorem(sol.field.values(), tol)?;
    report.push(Record::at_most("sphere_fit_residual", "distance from fitted 2-sphere", fit.max_residual, tol, nodes));
    let expected = rotation * Vec4::new(0.0, 0.0, 0.0, 1.0);
    report.push(Record::at_most(
        "hyperplane_normal",
        "fitted normal = rotated e4",
        (fit.hyperplane_normal - expected).norm(),
        1e-6,
        nodes,
    ));
    report.push(Record::at_most("fit_radius", "fitted radius = a", (fit.radius - p.a()).abs(), tol, nodes));
    report.put("objective_history", history.clone());
    report.put("step_norms", sol.report.step_norms.clone());
    report.put("residual_norm", vec![sol.report.residual_norm]);
    report.put("gradient_norm", vec![sol.report.gradient_norm]);
    report.put("iterations", vec![sol.report.iterations as f64]);
    report.put("fit_normal", fit.hyperplane_normal.iter().copied().collect());
    report.put("fit_radius", vec![fit.radius]);
    Ok(Outcome { report, artifact: None })
}
