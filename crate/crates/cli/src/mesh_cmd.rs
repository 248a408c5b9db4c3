//! OBJ export of hypersurface slices.

use semisym_core::mesh::{build_mesh, validate_obj, MeshSpec};
use semisym_core::{GridSpec, HypersurfaceMap, Vec4};

use crate::config::Scenario;
use crate::report::{Record, Report};
use crate::{CliError, Hypersurface, Outcome};

/// Worst distance of `X(x, y, w_mid)` from the chord through the end points,
/// relative to the chord length.
fn ruling_straightness(map: &Hypersurface, spec: &GridSpec, w: [f64; 2]) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    let mid = 0.5 * (w[0] + w[1]);
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let at = |w: f64| -> Result<Vec4, CliError> { Ok(Vec4::from(map.eval::<f64>(spec.x(i), spec.y(j), w)?)) };
            let (p, q, m) = (at(w[0])?, at(w[1])?, at(mid)?);
            let chord = q - p;
            let len = chord.norm();
            if len == 0.0 {
                continue;
            }
            let d = m - p;
            let off = d - chord * (d.dot(&chord) / (len * len));
            worst = worst.max(off.norm() / len);
        }
    }
    Ok(worst)
}

pub fn mesh(s: &Scenario) -> Result<Outcome, CliError> {
    let p = s.params()?;
    let grid = s.grid(GridSpec::new(21, 21, (-1.5, 1.5), (-3.0, 3.0))?)?;
    let spec = MeshSpec { grid, w_values: s.mesh.w_values.clone(), projection: s.projection()?, rulings: s.mesh.rulings };
    if spec.w_values.is_empty() {
        return Err(CliError::Config("mesh.w_values is empty".into()));
    }
    let map = Hypersurface::new(p);
    let mesh = build_mesh(&map, &spec)?;
    let obj = mesh.to_obj();
    let per_slice = grid.nx * grid.ny;
    let expected = per_slice * spec.w_values.len();
    let mut report = Report::new("mesh", s.seed());
    report.push(Record::at_most(
        "vertex_count",
        "vertices = nx * ny per slice",
        (mesh.vertices.len() as f64 - expected as f64).abs(),
        0.0,
        spec.w_values.len(),
    ));
    let obj_defect = match validate_obj(&obj) {
        Ok(stats) => {
            let counts = [(stats.vertices, mesh.vertices.len()), (stats.faces, mesh.faces.len()), (stats.segments, mesh.segments.len())];
            counts.iter().filter(|(a, b)| a != b).count() as f64
        }
        Err(_) => f64::INFINITY,
    };
    report.push(Record::at_most("obj_valid", "records parse and indices are in range", obj_defect, 0.0, 1));
    let straight = ruling_straightness(&map, &grid, s.sampling.w_range)?;
    report.push(Record::at_most("ruling_straightness", "w-lines are straight in E^4", straight, s.tol.unwrap_or(1e-10), per_slice));
    report.put("counts", vec![mesh.vertices.len() as f64, mesh.faces.len() as f64, mesh.segments.len() as f64, mesh.degenerate as f64]);
    Ok(Outcome { report, artifact: Some(obj) })
}
