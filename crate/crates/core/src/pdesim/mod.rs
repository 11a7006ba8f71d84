//! Method-of-lines simulation of the divergent form on a periodic grid:
//! conservative central fluxes, a prefactored cyclic Helmholtz inversion and
//! classical RK4 with a fixed step.

mod ops;

pub use ops::{apply_filter, d1, d2, helmholtz_solve, spectral_radius, Helmholtz, Rhs, Stepper};

use serde::{Deserialize, Serialize};
use std::io;

use crate::diagnostics::{energy_and_rate, find_peaks, mass, Peak, PeakMode};
use crate::error::{Error, Result};
use crate::params::{classify_wave, Regime, StructuralParams};
use crate::peakon::PeakonSpec;
use crate::twave::{soliton_profile, Profile, ProfileOptions};

/// Uniform periodic grid `x_j = j dx`, `j = 0..N−1`, `dx = L / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    length: f64,
    nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub length: f64,
    pub nodes: usize,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.length, s.nodes)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            length: g.length,
            nodes: g.nodes,
        }
    }
}

impl Grid {
    pub fn new(length: f64, nodes: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("domain length {length} must be > 0")));
        }
        if nodes < 16 || nodes % 2 != 0 {
            return Err(Error::Config(format!(
                "node count {nodes} must be even and >= 16"
            )));
        }
        Ok(Self { length, nodes })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn dx(&self) -> f64 {
        self.length / self.nodes as f64
    }

    pub fn x(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.nodes).map(|j| j as f64 * dx).collect()
    }

    /// Signed distance `x − center` wrapped into `[−L/2, L/2)`.
    pub fn wrap(&self, x: f64, center: f64) -> f64 {
        (x - center + 0.5 * self.length).rem_euclid(self.length) - 0.5 * self.length
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridState {
    pub grid: Grid,
    pub t: f64,
    pub u: Vec<f64>,
}

impl GridState {
    pub fn new(grid: Grid, t: f64, u: Vec<f64>) -> Result<Self> {
        if u.len() != grid.nodes() {
            return Err(Error::Config(format!(
                "field has {} values for {} nodes",
                u.len(),
                grid.nodes()
            )));
        }
        if let Some(j) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite initial value at node {j}")));
        }
        Ok(Self { grid, t, u })
    }
}

/// One solitary wave of the initial superposition, classified and
/// constructed from `(params, amplitude)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveInit {
    pub amplitude: f64,
    pub center: f64,
}

/// Initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Sum of constructed solitons or peakons.
    Waves { waves: Vec<WaveInit> },
    /// A tabulated even profile `ω(η)`, e.g. a previously exported one,
    /// placed as `A ω(β (x − center)/ε)`; linear interpolation, zero outside.
    Tabulated {
        center: f64,
        amplitude: f64,
        velocity: f64,
        eta: Vec<f64>,
        omega: Vec<f64>,
    },
}

fn default_cfl() -> f64 {
    0.5
}

fn default_seam_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub params: StructuralParams,
    pub grid: Grid,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Time between stored snapshots (rounded to a whole number of steps).
    pub snapshot_interval: f64,
    pub initial: InitialCondition,
    /// Strength in (0, 1] of the optional fourth-difference filter.
    #[serde(default)]
    pub filter: Option<f64>,
    /// Relative tail level allowed at the antipode of each crest and at
    /// the other crest.
    #[serde(default = "default_seam_tol")]
    pub seam_tol: f64,
    /// Fixed step overriding the stability estimate (shrunk to divide `t_end`).
    #[serde(default)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Soliton,
    Peakon,
    Tabulated,
}

/// An initial wave as placed on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSummary {
    pub kind: WaveKind,
    pub amplitude: f64,
    pub velocity: f64,
    pub center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub u: Vec<f64>,
}

/// Scalar diagnostics of one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub dissipation: f64,
    /// Crests above a quarter of the smallest initial amplitude, largest first.
    pub peaks: Vec<Peak>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub params: StructuralParams,
    pub grid: Grid,
    pub dt: f64,
    pub steps: usize,
    pub peak_mode: PeakMode,
    pub waves: Vec<WaveSummary>,
    pub snapshots: Vec<Snapshot>,
    pub records: Vec<SnapshotRecord>,
}

impl Trajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("trajectory holds the initial snapshot")
    }

    /// Long-format CSV `t,x,u`.
    pub fn write_snapshots_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "u"])?;
        let x = self.grid.x();
        for s in &self.snapshots {
            let t = format!("{}", s.t);
            for (xi, ui) in x.iter().zip(&s.u) {
                w.write_record([t.as_str(), &format!("{xi}"), &format!("{ui}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// CSV `t,mass,energy,dissipation,peak1_x,peak1_u,peak2_x,peak2_u`;
    /// missing crests are left empty.
    pub fn write_diagnostics_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "t",
            "mass",
            "energy",
            "dissipation",
            "peak1_x",
            "peak1_u",
            "peak2_x",
            "peak2_u",
        ])?;
        for r in &self.records {
            let mut row = vec![
                format!("{}", r.t),
                format!("{}", r.mass),
                format!("{}", r.energy),
                format!("{}", r.dissipation),
            ];
            for k in 0..2 {
                match r.peaks.get(k) {
                    Some(p) => {
                        row.push(format!("{}", p.x));
                        row.push(format!("{}", p.value));
                    }
                    None => {
                        row.push(String::new());
                        row.push(String::new());
                    }
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

enum Shape {
    Soliton(Profile),
    Peakon(PeakonSpec),
    Table { eta: Vec<f64>, omega: Vec<f64> },
}

struct PlacedWave {
    shape: Shape,
    summary: WaveSummary,
    /// `β / ε`.
    scale: f64,
}

impl PlacedWave {
    fn value_at_distance(&self, d: f64) -> f64 {
        let eta = self.scale * d;
        let a = self.summary.amplitude;
        match &self.shape {
            Shape::Soliton(p) => a * p.omega_at(eta),
            Shape::Peakon(s) => a * s.omega(eta),
            Shape::Table { eta: grid, omega } => a * interp_even(grid, omega, eta),
        }
    }
}

/// Linear interpolation of an even table in `|η|`; zero outside.
fn interp_even(eta: &[f64], omega: &[f64], x: f64) -> f64 {
    let a = x.abs();
    let j = eta.partition_point(|&e| e < a);
    if j == 0 {
        return if eta[0] == a { omega[0] } else { 0.0 };
    }
    if j == eta.len() {
        return 0.0;
    }
    let (e0, e1) = (eta[j - 1], eta[j]);
    omega[j - 1] + (omega[j] - omega[j - 1]) * (a - e0) / (e1 - e0)
}

fn place_waves(config: &SimConfig) -> Result<Vec<PlacedWave>> {
    let params = &config.params;
    let scale = params.derived().beta / params.epsilon();
    match &config.initial {
        InitialCondition::Waves { waves } => {
            if waves.is_empty() {
                return Err(Error::Config("no initial waves".into()));
            }
            waves
                .iter()
                .map(|w| {
                    let cls = classify_wave(params, w.amplitude)
                        .map_err(|e| Error::Config(format!("wave A = {}: {e}", w.amplitude)))?;
                    let (shape, kind, velocity) = match (cls.regime, cls.wave) {
                        (Regime::SmoothSoliton, Some(spec)) => {
                            let prof = soliton_profile(params, &spec, &ProfileOptions::default())?;
                            (Shape::Soliton(prof), WaveKind::Soliton, spec.velocity)
                        }
                        (Regime::Peakon { .. }, Some(_)) => {
                            let spec = PeakonSpec::new(params, Some(w.amplitude))?;
                            let v = spec.velocity;
                            (Shape::Peakon(spec), WaveKind::Peakon, v)
                        }
                        (regime, _) => {
                            return Err(Error::Config(format!(
                                "amplitude {} gives regime '{regime}', which cannot be simulated",
                                w.amplitude
                            )))
                        }
                    };
                    Ok(PlacedWave {
                        shape,
                        summary: WaveSummary {
                            kind,
                            amplitude: w.amplitude,
                            velocity,
                            center: w.center,
                        },
                        scale,
                    })
                })
                .collect()
        }
        InitialCondition::Tabulated {
            center,
            amplitude,
            velocity,
            eta,
            omega,
        } => {
            if eta.len() != omega.len() || eta.len() < 2 {
                return Err(Error::Config("tabulated eta/omega lengths differ".into()));
            }
            if eta.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Config("tabulated eta must increase strictly".into()));
            }
            // Keep the η >= 0 half.
            let start = eta.partition_point(|&e| e < 0.0);
            let (e, o) = (eta[start..].to_vec(), omega[start..].to_vec());
            if e.len() < 2 {
                return Err(Error::Config("tabulated profile has no eta >= 0 part".into()));
            }
            Ok(vec![PlacedWave {
                shape: Shape::Table { eta: e, omega: o },
                summary: WaveSummary {
                    kind: WaveKind::Tabulated,
                    amplitude: *amplitude,
                    velocity: *velocity,
                    center: *center,
                },
                scale,
            }])
        }
    }
}

fn check_separation(config: &SimConfig, waves: &[PlacedWave]) -> Result<()> {
    let grid = &config.grid;
    let tol = config.seam_tol;
    for w in waves {
        let tail = w.value_at_distance(0.5 * grid.length());
        if tail > tol * w.summary.amplitude {
            return Err(Error::Config(format!(
                "wave at {} leaves {tail:e} at its antipode (limit {:e}); enlarge the domain",
                w.summary.center,
                tol * w.summary.amplitude
            )));
        }
    }
    for (i, a) in waves.iter().enumerate() {
        for (j, b) in waves.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = grid.wrap(b.summary.center, a.summary.center);
            let overlap = a.value_at_distance(d);
            if overlap > tol * b.summary.amplitude {
                return Err(Error::Config(format!(
                    "wave at {} contributes {overlap:e} at the crest of the wave at {}; separate them",
                    a.summary.center, b.summary.center
                )));
            }
        }
    }
    Ok(())
}

/// Samples the configured initial superposition on the grid.
pub fn initial_state(config: &SimConfig) -> Result<(GridState, Vec<WaveSummary>, PeakMode)> {
    let waves = place_waves(config)?;
    check_separation(config, &waves)?;
    let grid = config.grid;
    let u: Vec<f64> = grid
        .x()
        .iter()
        .map(|&x| {
            waves
                .iter()
                .map(|w| w.value_at_distance(grid.wrap(x, w.summary.center)))
                .sum()
        })
        .collect();
    let mode = if waves.iter().any(|w| matches!(w.shape, Shape::Peakon(_))) {
        PeakMode::Cusp
    } else {
        PeakMode::Quadratic
    };
    let summaries = waves.iter().map(|w| w.summary).collect();
    Ok((GridState::new(grid, 0.0, u)?, summaries, mode))
}

/// Fixed RK4 step for `[0, t_end]`.
///
/// The advective limit `cfl · dx / v_max` with
/// `v_max = max(|V_i|, |c0| + 2 c1 max|u|)` is combined with the
/// linearised spectral bound `cfl · 2.8 / |λ|max`, which dominates when the
/// third-order dispersive term is not regularised by the Helmholtz operator
/// (α = 0 or small α ε / dx). The step is then shrunk to divide `t_end`.
pub fn choose_dt(
    params: &StructuralParams,
    grid: &Grid,
    u: &[f64],
    wave_speed: f64,
    cfl: f64,
    t_end: f64,
) -> (f64, usize) {
    let u_max = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut ux = vec![0.0; u.len()];
    d1(u, &mut ux, grid.dx());
    let ux_max = ux.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let v_max = wave_speed
        .abs()
        .max(params.c0().abs() + 2.0 * params.c1() * u_max)
        .max(f64::MIN_POSITIVE);
    let lambda = spectral_radius(params, grid, u_max, ux_max).max(f64::MIN_POSITIVE);
    let dt = cfl * (grid.dx() / v_max).min(2.8 / lambda);
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    (t_end / steps as f64, steps)
}

fn record(params: &StructuralParams, grid: &Grid, t: f64, u: &[f64], mode: PeakMode, min_height: f64) -> SnapshotRecord {
    let (energy, dissipation) = energy_and_rate(u, grid.dx(), params);
    SnapshotRecord {
        t,
        mass: mass(u, grid.dx()),
        energy,
        dissipation,
        peaks: find_peaks(u, grid, mode, min_height),
    }
}

fn validate(config: &SimConfig) -> Result<()> {
    if !(config.t_end > 0.0 && config.t_end.is_finite()) {
        return Err(Error::Config(format!("t_end = {} must be > 0", config.t_end)));
    }
    if !(config.cfl > 0.0 && config.cfl <= 1.0) {
        return Err(Error::Config(format!("cfl = {} outside (0, 1]", config.cfl)));
    }
    if !(config.snapshot_interval > 0.0) {
        return Err(Error::Config("snapshot_interval must be > 0".into()));
    }
    if let Some(s) = config.filter {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Config(format!("filter strength {s} outside (0, 1]")));
        }
    }
    if let Some(h) = config.dt {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("dt = {h} must be > 0")));
        }
    }
    if !(config.seam_tol > 0.0) {
        return Err(Error::Config("seam_tol must be > 0".into()));
    }
    Ok(())
}

pub fn run_simulation(config: &SimConfig) -> Result<Trajectory> {
    validate(config)?;
    let (state, waves, peak_mode) = initial_state(config)?;
    let params = config.params;
    let grid = config.grid;
    let speed = waves.iter().fold(0.0f64, |m, w| m.max(w.velocity.abs()));
    let (dt, steps) = match config.dt {
        Some(h) => {
            let steps = (config.t_end / h).ceil().max(1.0) as usize;
            (config.t_end / steps as f64, steps)
        }
        None => choose_dt(&params, &grid, &state.u, speed, config.cfl, config.t_end),
    };
    let stride = ((config.snapshot_interval / dt).round() as usize).max(1);
    let min_height = 0.25 * waves.iter().map(|w| w.amplitude).fold(f64::INFINITY, f64::min);

    let mut traj = Trajectory {
        params,
        grid,
        dt,
        steps,
        peak_mode,
        waves,
        snapshots: Vec::with_capacity(steps / stride + 2),
        records: Vec::with_capacity(steps / stride + 2),
    };
    let mut u = state.u;
    traj.records.push(record(&params, &grid, 0.0, &u, peak_mode, min_height));
    traj.snapshots.push(Snapshot { step: 0, t: 0.0, u: u.clone() });

    let mut stepper = Stepper::new(&params, &grid)?;
    let mut scratch = Vec::new();
    for step in 1..=steps {
        stepper.step(&mut u, dt);
        if let Some(s) = config.filter {
            apply_filter(&mut u, s, &mut scratch);
        }
        let t = if step == steps { config.t_end } else { step as f64 * dt };
        if u.iter().any(|v| !v.is_finite()) {
            traj.snapshots.push(Snapshot { step, t, u });
            return Err(Error::NonFinite {
                t,
                step,
                partial: Some(Box::new(traj)),
            });
        }
        if step % stride == 0 || step == steps {
            traj.records.push(record(&params, &grid, t, &u, peak_mode, min_height));
            traj.snapshots.push(Snapshot { step, t, u: u.clone() });
        }
    }
    Ok(traj)
}
