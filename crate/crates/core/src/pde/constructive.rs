//! Separated construction of the support function: integrate the
//! `y`-oscillator `G'' + G = c4` and the `x`-equation
//! `f' = (c4 sinh x + c3) / cosh^2 x`, then assemble
//! `r = f(x) + G(y) / cosh x`.

use crate::error::{GeomError, Result};
use crate::grid::{GridField, GridSpec};

/// Integration constants. With `G(0) = c1 + c4`, `G'(0) = c2` and
/// `f(0) = c0 - c4` the result is the closed-form `r` with coefficients
/// `(c0, c1, c2, c3)`; `c4` cancels.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConstructiveInput {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructiveSolution {
    pub field: GridField<f64>,
    /// `f` at the grid abscissae.
    pub f_profile: Vec<f64>,
    /// `G` at the grid ordinates.
    pub g_profile: Vec<f64>,
    /// Step-doubling estimate of the integration error.
    pub error_estimate: f64,
}

type State = [f64; 2];

fn rk4_step<F: Fn(f64, State) -> State>(rhs: &F, t: f64, s: State, h: f64) -> State {
    let add = |s: State, k: State, c: f64| [s[0] + c * k[0], s[1] + c * k[1]];
    let k1 = rhs(t, s);
    let k2 = rhs(t + 0.5 * h, add(s, k1, 0.5 * h));
    let k3 = rhs(t + 0.5 * h, add(s, k2, 0.5 * h));
    let k4 = rhs(t + h, add(s, k3, h));
    [
        s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

fn integrate<F: Fn(f64, State) -> State>(rhs: &F, mut t: f64, mut s: State, t_end: f64, steps: usize) -> State {
    let h = (t_end - t) / steps as f64;
    for _ in 0..steps {
        s = rk4_step(rhs, t, s, h);
        t += h;
    }
    s
}

/// First component of the solution at `nodes`, starting from `initial` at 0.
/// `steps` RK4 steps per node interval, and proportionally many to reach
/// the first node.
fn profile<F: Fn(f64, State) -> State>(rhs: &F, initial: State, nodes: &[f64], steps: usize) -> Vec<f64> {
    let spacing = nodes[1] - nodes[0];
    let lead = ((nodes[0].abs() / spacing).ceil() as usize).max(1) * steps;
    let mut s = integrate(rhs, 0.0, initial, nodes[0], lead);
    let mut out = vec![s[0]];
    for w in nodes.windows(2) {
        s = integrate(rhs, w[0], s, w[1], steps);
        out.push(s[0]);
    }
    out
}

fn profiles(input: &ConstructiveInput, xs: &[f64], ys: &[f64], steps: usize) -> (Vec<f64>, Vec<f64>) {
    let c = *input;
    let oscillator = move |_: f64, s: State| [s[1], c.c4 - s[0]];
    let slope = move |x: f64, _: State| [(c.c4 * x.sinh() + c.c3) / x.cosh().powi(2), 0.0];
    (
        profile(&slope, [c.c0 - c.c4, 0.0], xs, steps),
        profile(&oscillator, [c.c1 + c.c4, c.c2], ys, steps),
    )
}

/// Integrates both ordinary differential equations with `steps` and
/// `2 steps` RK4 substeps per grid interval and keeps the finer result.
/// Fails when the two disagree by more than `tol`.
pub fn solve_r_constructive(input: ConstructiveInput, spec: GridSpec, steps: usize, tol: f64) -> Result<ConstructiveSolution> {
    let all = [input.c0, input.c1, input.c2, input.c3, input.c4];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::NonFinite("integration constants"));
    }
    if steps == 0 {
        return Err(GeomError::StepCountTooSmall { steps, estimate: f64::INFINITY, tol });
    }
    let xs: Vec<f64> = (0..spec.nx).map(|i| spec.x(i)).collect();
    let ys: Vec<f64> = (0..spec.ny).map(|j| spec.y(j)).collect();
    let (f_coarse, g_coarse) = profiles(&input, &xs, &ys, steps);
    let (f_profile, g_profile) = profiles(&input, &xs, &ys, 2 * steps);
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let g_scale = xs.iter().map(|x| 1.0 / x.cosh()).fold(0.0, f64::max);
    let error_estimate = diff(&f_coarse, &f_profile) + g_scale * diff(&g_coarse, &g_profile);
    if !(error_estimate <= tol) {
        return Err(GeomError::StepCountTooSmall { steps, estimate: error_estimate, tol });
    }
    let mut field = GridField::sample(spec, |_, _| 0.0);
    for (j, g) in g_profile.iter().enumerate() {
        for (i, (f, x)) in f_profile.iter().zip(&xs).enumerate() {
            field.set(i, j, f + g / x.cosh());
        }
    }
    Ok(ConstructiveSolution { field, f_profile, g_profile, error_estimate })
}
