//! Shared workloads for the solver benchmarks.

use semisym_core::closed_forms::{r_general, sphere_l};
use semisym_core::{GridField, GridSpec, SolutionParams, Vec4};

pub fn params() -> SolutionParams {
    SolutionParams::new(0.6, 0.8, [0.4, -0.7, 1.1, 0.3]).expect("valid parameters")
}

/// Sampled sphere on `[-0.5, 0.5]^2` with a smooth interior perturbation.
pub fn perturbed_sphere(n: usize) -> GridField<Vec4> {
    let p = params();
    let spec = GridSpec::square(n, -0.5, 0.5).expect("valid grid");
    let mut field = GridField::sample(spec, |x, y| sphere_l(&p, x, y));
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let bump = 1e-3 * (spec.x(i) * 3.0).sin() * (spec.y(j) * 2.0).cos();
            field.set(i, j, field.at(i, j) + Vec4::new(bump, -bump, bump, 0.0));
        }
    }
    field
}

pub fn r_boundary(x: f64, y: f64) -> f64 {
    r_general(&params(), x, y)
}
