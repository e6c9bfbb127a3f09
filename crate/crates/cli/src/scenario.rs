//! Scenario files.
//!
//! ```json
//! {
//!   "kind": "barrier-sweep",
//!   "name": "spin_barrier_eps0",
//!   "params": { "eta": 0.1, "epsilon": 0.0 },
//!   "grid": { "start": 0.005, "stop": 2.0, "points": 20000 }
//! }
//! ```
//!
//! `graph-contract` scenarios name a graph (file path or inline object) and
//! the input/output port labels; `star-demo` scenarios name two scattering
//! matrices and optionally a wiring. Relative paths are resolved against the
//! scenario file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use qgraph::composer::Wiring;
use qgraph::graph::{QuantumGraph, VertexId};
use qgraph::physics::{linear_grid, BarrierParams, REFERENCE_HALF_WIDTH, REFERENCE_SEPARATION};
use qgraph::ScatteringMatrix;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default = "Grid::default_start")]
    pub start: f64,
    #[serde(default = "Grid::default_stop")]
    pub stop: f64,
    #[serde(default = "Grid::default_points")]
    pub points: usize,
}

impl Grid {
    fn default_start() -> f64 {
        0.005
    }
    fn default_stop() -> f64 {
        2.0
    }
    fn default_points() -> usize {
        20_000
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        Ok(linear_grid(self.start, self.stop, self.points)?)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            start: Grid::default_start(),
            stop: Grid::default_stop(),
            points: Grid::default_points(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub eta: f64,
    pub epsilon: f64,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_separation")]
    pub separation: f64,
}

fn default_half_width() -> f64 {
    REFERENCE_HALF_WIDTH
}

fn default_separation() -> f64 {
    REFERENCE_SEPARATION
}

impl SweepParams {
    /// Parameters at a given energy.
    pub fn at(&self, energy_ratio: f64) -> BarrierParams {
        BarrierParams {
            energy_ratio,
            epsilon: self.epsilon,
            half_width: self.half_width,
            separation: self.separation,
            eta: self.eta,
        }
    }
}

/// A value given inline or as a path to a JSON file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(PathBuf),
    Inline(T),
}

impl<T: DeserializeOwned + Clone> Source<T> {
    pub fn load(&self, base: &Path) -> Result<T> {
        match self {
            Source::Inline(v) => Ok(v.clone()),
            Source::Path(p) => load_json(&base.join(p)),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepScenario {
    pub params: SweepParams,
    #[serde(default)]
    pub grid: Grid,
    /// When present, an additional (energy, ε) map of the capacity advantage
    /// is produced, with ε taken from this grid.
    #[serde(default)]
    pub epsilon_grid: Option<Grid>,
    /// Energy grid for the map; defaults to 400 points on the main range.
    #[serde(default)]
    pub map_grid: Option<Grid>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphScenario {
    pub graph: Source<QuantumGraph>,
    pub input_port: usize,
    pub output_port: usize,
    #[serde(default)]
    pub order: Vec<(VertexId, VertexId)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarScenario {
    pub s1: Source<ScatteringMatrix>,
    pub s2: Source<ScatteringMatrix>,
    #[serde(default)]
    pub wiring: Option<Source<Wiring>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioKind {
    BarrierSweep(SweepScenario),
    GraphContract(GraphScenario),
    StarDemo(StarScenario),
}

#[derive(Debug, Clone, Deserialize)]
struct ScenarioFile {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(flatten)]
    kind: ScenarioKind,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    /// Stem for output file names.
    pub name: String,
    /// Directory relative paths are resolved against.
    pub base_dir: PathBuf,
    /// Output directory requested by the scenario itself.
    pub output: Option<PathBuf>,
    pub kind: ScenarioKind,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let file: ScenarioFile = load_json(path)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let name = match file.name {
            Some(n) => n,
            None => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into()),
        };
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(CliError::parse(path, format!("invalid scenario name {name:?}")));
        }
        let scenario = Scenario {
            name,
            output: file.output.map(|o| base_dir.join(o)),
            base_dir,
            kind: file.kind,
        };
        scenario.check().map_err(|e| CliError::parse(path, e))?;
        Ok(scenario)
    }

    fn check(&self) -> Result<()> {
        match &self.kind {
            ScenarioKind::BarrierSweep(s) => {
                s.params.at(s.grid.start).validate()?;
                s.grid.values()?;
                if let Some(eps) = &s.epsilon_grid {
                    let values = eps.values()?;
                    if values.iter().any(|e| !(0.0..=1.0).contains(e)) {
                        return Err(CliError::Input("epsilon grid must lie in [0, 1]".into()));
                    }
                }
                if let Some(g) = &s.map_grid {
                    g.values()?;
                }
                Ok(())
            }
            ScenarioKind::GraphContract(g) => {
                if g.input_port == 0 || g.output_port == 0 {
                    return Err(CliError::Input("port labels start at 1".into()));
                }
                Ok(())
            }
            ScenarioKind::StarDemo(_) => Ok(()),
        }
    }
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
}
