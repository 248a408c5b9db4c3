//! Scenario files (TOML) and their defaults.

use std::path::Path;

use serde::Deserialize;

use semisym_core::mesh::Projection;
use semisym_core::{GridSpec, SolutionParams, Vec4};

use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    /// Eigenvalues below this fraction of the largest count as zero.
    pub zero_tol: Option<f64>,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub mesh: MeshSection,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub a: f64,
    pub b: f64,
    pub c: [f64; 4],
}

impl Default for ParamsSection {
    fn default() -> Self {
        let p = SolutionParams::default();
        ParamsSection { a: p.a(), b: p.b(), c: p.c() }
    }
}

/// Ranges for random sample points.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub w_range: [f64; 2],
}

impl Default for SamplingSection {
    fn default() -> Self {
        SamplingSection { x_range: [-2.5, 2.5], y_range: [-3.1, 3.1], w_range: [-2.0, 2.0] }
    }
}

/// Grid overrides; each command has its own default grid.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub x_range: Option<[f64; 2]>,
    pub y_range: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub max_iter: usize,
    pub gn_tol: f64,
    /// Amplitude of the interior perturbation of the initial surface.
    pub perturbation: f64,
    /// Seed of a random rotation applied to the boundary sphere.
    pub rotation_seed: Option<u64>,
    pub c4: f64,
    pub steps: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { max_iter: 50, gn_tol: 1e-6, perturbation: 0.05, rotation_seed: None, c4: 1.7, steps: 4 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ProjectionSpec {
    /// `"drop:K"` with `K` in 0..4.
    Named(String),
    Direction([f64; 4]),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSection {
    pub w_values: Vec<f64>,
    pub projection: ProjectionSpec,
    pub rulings: bool,
}

impl Default for MeshSection {
    fn default() -> Self {
        MeshSection { w_values: vec![0.0], projection: ProjectionSpec::Named("drop:3".into()), rulings: false }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol.unwrap_or(1e-8)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(200)
    }

    pub fn params(&self) -> Result<SolutionParams, CliError> {
        let p = &self.params;
        SolutionParams::new(p.a, p.b, p.c).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The configured grid with unset entries taken from `fallback`.
    pub fn grid(&self, fallback: GridSpec) -> Result<GridSpec, CliError> {
        let g = &self.grid;
        let pair = |r: Option<[f64; 2]>, d: (f64, f64)| r.map_or(d, |r| (r[0], r[1]));
        GridSpec::new(
            g.nx.unwrap_or(fallback.nx),
            g.ny.unwrap_or(fallback.ny),
            pair(g.x_range, fallback.x_range),
            pair(g.y_range, fallback.y_range),
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn projection(&self) -> Result<Projection, CliError> {
        match &self.mesh.projection {
            ProjectionSpec::Direction(d) => Ok(Projection::Along(Vec4::from_column_slice(d))),
            ProjectionSpec::Named(name) => name
                .strip_prefix("drop:")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k < 4)
                .map(Projection::Drop)
                .ok_or_else(|| CliError::Config(format!("unknown projection `{name}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let s = Scenario::parse("").unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.seed(), 42);
        assert_eq!(s.params().unwrap(), SolutionParams::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(Scenario::parse("sede = 3"), Err(CliError::Config(_))));
        assert!(matches!(Scenario::parse("[params]\na = 0.6\nb = 0.8\nc = [0,0,0,0]\nd = 1"), Err(CliError::Config(_))));
    }

    #[test]
    fn sections_parse() {
        let s = Scenario::parse(
            r#"
            seed = 7
            [params]
            a = 1.0
            b = 0.0
            c = [1.0, 0.0, 0.0, 0.0]
            [grid]
            nx = 9
            [mesh]
            w_values = [0.0, 1.0]
            projection = [0.0, 0.0, 1.0, 1.0]
            rulings = true
            "#,
        )
        .unwrap();
        assert_eq!(s.seed(), 7);
        assert_eq!(s.params().unwrap().b(), 0.0);
        let g = s.grid(GridSpec::square(21, -1.0, 1.0).unwrap()).unwrap();
        assert_eq!((g.nx, g.ny), (9, 21));
        assert!(matches!(s.projection().unwrap(), Projection::Along(_)));
    }

    #[test]
    fn projection_names() {
        let mut s = Scenario::default();
        assert_eq!(s.projection().unwrap(), Projection::Drop(3));
        s.mesh.projection = ProjectionSpec::Named("drop:7".into());
        assert!(s.projection().is_err());
    }
}
