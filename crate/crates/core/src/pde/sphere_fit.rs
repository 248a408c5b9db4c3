//! Fits points of the 3-sphere by a hyperplane section: a unit normal `e`
//! and offset `beta` with `<p, e> = beta`, then a round 2-sphere inside
//! that hyperplane.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};

use crate::error::{GeomError, Result};
use crate::kernel::Vec4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    /// Unit normal of the hyperplane, oriented so `offset >= 0`.
    pub hyperplane_normal: Vec4,
    pub offset: f64,
    pub center: Vec4,
    pub radius: f64,
    /// Worst Euclidean distance of a point from the fitted 2-sphere.
    pub max_residual: f64,
    pub within_tol: bool,
}

/// Fits the points. Fails with [`GeomError::FitAmbiguous`] when the
/// centred data spans fewer than three directions, judged by a relative
/// spread below `tol`.
pub fn verify_sphere_theorem(points: &[Vec4], tol: f64) -> Result<FitResult> {
    if points.len() < 5 {
        return Err(GeomError::FitAmbiguous);
    }
    if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(GeomError::NonFinite("fit points"));
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec4::zeros(), |acc, p| acc + p) / n;
    let cov = points.iter().fold(Matrix4::zeros(), |acc, p| {
        let d = p - mean;
        acc + d * d.transpose()
    }) / n;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let spread = |k: usize| eig.eigenvalues[order[k]].max(0.0).sqrt();
    if spread(1) <= tol * spread(3) {
        return Err(GeomError::FitAmbiguous);
    }
    let mut normal: Vec4 = eig.eigenvectors.column(order[0]).into();
    let mut offset = normal.dot(&mean);
    let flip = if offset.abs() > 1e-12 {
        offset < 0.0
    } else {
        normal.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0) < 0.0
    };
    if flip {
        normal = -normal;
        offset = -offset;
    }
    let frame: Vec<Vec4> = (1..4).map(|k| eig.eigenvectors.column(order[k]).into()).collect();

    // |q|^2 = 2 <q, c> + k in hyperplane coordinates q
    let coords: Vec<[f64; 3]> = points.iter().map(|p| std::array::from_fn(|a| frame[a].dot(p))).collect();
    let m = DMatrix::from_fn(points.len(), 4, |r, c| if c < 3 { 2.0 * coords[r][c] } else { 1.0 });
    let rhs = DVector::from_fn(points.len(), |r, _| coords[r].iter().map(|v| v * v).sum());
    let sol = m.svd(true, true).solve(&rhs, 1e-14).map_err(|_| GeomError::FitAmbiguous)?;
    let inner = [sol[0], sol[1], sol[2]];
    let radius_sq = sol[3] + inner.iter().map(|v| v * v).sum::<f64>();
    if !(radius_sq > 0.0) {
        return Err(GeomError::FitAmbiguous);
    }
    let radius = radius_sq.sqrt();
    let center = offset * normal + inner[0] * frame[0] + inner[1] * frame[1] + inner[2] * frame[2];
    let max_residual = points
        .iter()
        .zip(&coords)
        .map(|(p, q)| {
            let off_plane = p.dot(&normal) - offset;
            let d = ((q[0] - inner[0]).powi(2) + (q[1] - inner[1]).powi(2) + (q[2] - inner[2]).powi(2)).sqrt();
            off_plane.hypot(d - radius)
        })
        .fold(0.0, f64::max);
    Ok(FitResult { hyperplane_normal: normal, offset, center, radius, max_residual, within_tol: max_residual <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{sphere_l, SolutionParams};

    fn samples(p: &SolutionParams) -> Vec<Vec4> {
        let mut out = Vec::new();
        for i in 0..9 {
            for j in 0..9 {
                out.push(sphere_l(p, -2.0 + 0.5 * i as f64, -3.0 + 0.75 * j as f64));
            }
        }
        out
    }

    #[test]
    fn recovers_small_sphere() {
        let p = SolutionParams::new(0.6, 0.8, [0.0; 4]).unwrap();
        let fit = verify_sphere_theorem(&samples(&p), 1e-10).unwrap();
        assert!((fit.hyperplane_normal - Vec4::new(0.0, 0.0, 0.0, 1.0)).norm() < 1e-12);
        assert!((fit.offset - 0.8).abs() < 1e-12);
        assert!((fit.radius - 0.6).abs() < 1e-12);
        assert!((fit.center - Vec4::new(0.0, 0.0, 0.0, 0.8)).norm() < 1e-12);
        assert!(fit.within_tol);
    }

    #[test]
    fn circle_is_ambiguous() {
        let pts: Vec<Vec4> = (0..20).map(|k| {
            let t = k as f64 * 0.3;
            Vec4::new(t.cos(), t.sin(), 0.0, 0.0)
        }).collect();
        assert!(matches!(verify_sphere_theorem(&pts, 1e-8), Err(GeomError::FitAmbiguous)));
    }
}
