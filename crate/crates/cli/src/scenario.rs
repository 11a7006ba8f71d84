use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use gdp_core::diagnostics::CollisionWindows;
use gdp_core::pdesim::{Grid, InitialCondition, SimConfig, WaveInit};
use gdp_core::twave::ProfileOptions;
use gdp_core::StructuralParams;

/// Top-level scenario file (TOML or JSON, chosen by extension).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub params: StructuralParams,
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub profile: ProfileSection,
    #[serde(default)]
    pub fscan: FscanSection,
    #[serde(default)]
    pub simulation: Option<SimulationSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSection {
    pub nodes: usize,
    pub tail_tol: f64,
}

impl Default for ProfileSection {
    fn default() -> Self {
        let d = ProfileOptions::default();
        Self {
            nodes: d.nodes,
            tail_tol: d.tail_tol,
        }
    }
}

impl ProfileSection {
    pub fn options(&self) -> ProfileOptions {
        ProfileOptions {
            nodes: self.nodes,
            tail_tol: self.tail_tol,
            ..ProfileOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FscanSection {
    /// Samples of g on (0, 1].
    pub points: usize,
}

impl Default for FscanSection {
    fn default() -> Self {
        Self { points: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output directory, relative to the scenario file; `--out` takes precedence.
    pub dir: Option<PathBuf>,
}

/// Initial data as written in a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Waves {
        waves: Vec<WaveInit>,
    },
    /// A profile previously written by `gdp profile`: its CSV plus the JSON
    /// sidecar carrying amplitude and velocity. Paths are relative to the
    /// scenario file.
    ProfileFile {
        profile: PathBuf,
        metadata: PathBuf,
        center: f64,
    },
}

fn default_cfl() -> f64 {
    0.5
}

fn default_seam_tol() -> f64 {
    1e-8
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub grid: Grid,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub snapshot_interval: f64,
    pub initial: InitialSpec,
    #[serde(default)]
    pub filter: Option<f64>,
    #[serde(default = "default_seam_tol")]
    pub seam_tol: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    /// Collision windows; measured only for two-wave runs.
    #[serde(default)]
    pub collision: CollisionWindows,
    /// Write the full `t,x,u` field history.
    #[serde(default = "default_true")]
    pub write_snapshots: bool,
}

/// Amplitude and velocity from a `gdp profile` metadata sidecar.
#[derive(Debug, Clone, Copy, Deserialize)]
struct ProfileMeta {
    amplitude: f64,
    velocity: f64,
}

#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    /// Directory of the scenario file, for resolving relative paths.
    pub base: PathBuf,
}

impl LoadedScenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading scenario {}", path.display()))?;
        let file = parse_scenario(&text, path)?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Self { file, base })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn output_dir(&self) -> Option<PathBuf> {
        self.file.output.dir.as_deref().map(|d| self.resolve(d))
    }

    /// The simulation configuration with any profile files read in.
    pub fn sim_config(&self, params: StructuralParams) -> Result<(SimConfig, CollisionWindows, bool)> {
        let Some(sim) = &self.file.simulation else {
            bail!(InvalidInput("scenario has no [simulation] section".into()));
        };
        let initial = match &sim.initial {
            InitialSpec::Waves { waves } => InitialCondition::Waves {
                waves: waves.clone(),
            },
            InitialSpec::ProfileFile {
                profile,
                metadata,
                center,
            } => {
                let (eta, omega) = read_profile_csv(&self.resolve(profile))?;
                let meta_path = self.resolve(metadata);
                let meta: ProfileMeta = serde_json::from_str(
                    &fs::read_to_string(&meta_path)
                        .with_context(|| format!("reading {}", meta_path.display()))?,
                )
                .map_err(|e| InvalidInput(format!("{}: {e}", meta_path.display())))?;
                InitialCondition::Tabulated {
                    center: *center,
                    amplitude: meta.amplitude,
                    velocity: meta.velocity,
                    eta,
                    omega,
                }
            }
        };
        let config = SimConfig {
            params,
            grid: sim.grid,
            t_end: sim.t_end,
            cfl: sim.cfl,
            snapshot_interval: sim.snapshot_interval,
            initial,
            filter: sim.filter,
            seam_tol: sim.seam_tol,
            dt: sim.dt,
        };
        Ok((config, sim.collision, sim.write_snapshots))
    }
}

/// Input the user must fix; maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InvalidInput(pub String);

pub fn parse_scenario(text: &str, path: &Path) -> Result<ScenarioFile> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let parsed = if is_json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| InvalidInput(format!("{}: {e}", path.display())).into())
}

/// Reads the `eta` and `omega` columns of an exported profile.
pub fn read_profile_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_path(path)
        .with_context(|| format!("reading profile {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| InvalidInput(format!("{}: missing column '{name}'", path.display())))
    };
    let (ie, io) = (col("eta")?, col("omega")?);
    let mut eta = Vec::new();
    let mut omega = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| InvalidInput(format!("{}: {e}", path.display())).into())
        };
        eta.push(parse(ie)?);
        omega.push(parse(io)?);
    }
    Ok((eta, omega))
}
