//! Command-line front end: classification, profiles, peakons, simulations
//! and `F`-scans, driven by flags or a scenario file.

pub mod scenario;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gdp_core::diagnostics::{measure_collision, CollisionReport};
use gdp_core::params::{classify_wave, Classification, Regime};
use gdp_core::peakon::{verify_jump_conditions, JumpReport, PeakonSpec};
use gdp_core::pdesim::{run_simulation, Trajectory};
use gdp_core::twave::{self, profile_residual, soliton_profile, FPoly, Profile};
use gdp_core::{Error, StructuralParams};

use scenario::{InvalidInput, LoadedScenario};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NO_WAVE: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "gdp",
    version,
    about = "Solitons and peakons of the general Degasperis-Procesi equation"
)]
pub struct Cli {
    /// Scenario file (TOML, or JSON by extension)
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Structural constants; flags override the scenario file.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub c3: Option<f64>,
    /// Dispersion scale (default 0.1 without a scenario)
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the solitary wave of amplitude A
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(short = 'A', long)]
        amplitude: Option<f64>,
        /// Amplitude sweep `A=a:b:n` (n equally spaced values, inclusive)
        #[arg(long)]
        grid: Option<AmplitudeGrid>,
    },
    /// Construct the wave profile and write eta, omega, u
    Profile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(short = 'A', long)]
        amplitude: Option<f64>,
        /// Odd number of nodes of the symmetric eta grid
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        tail_tol: Option<f64>,
    },
    /// Construct the closed-form peakon and check its jump conditions
    Peakon {
        #[command(flatten)]
        params: ParamArgs,
        /// Required when the amplitude is arbitrary
        #[arg(short = 'A', long)]
        amplitude: Option<f64>,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Run the time-domain simulation of a scenario
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Dump F along the self-consistency curve, or F(g, q) for fixed q
    Fscan {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(short = 'A', long)]
        amplitude: Option<f64>,
        /// Fixed q instead of the self-consistent q(g)
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
}

/// `A=a:b:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl FromStr for AmplitudeGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s
            .strip_prefix("A=")
            .ok_or_else(|| format!("expected A=a:b:n, got '{s}'"))?;
        let parts: Vec<&str> = body.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected A=a:b:n, got '{s}'"));
        }
        let start: f64 = parts[0].parse().map_err(|e| format!("{}: {e}", parts[0]))?;
        let end: f64 = parts[1].parse().map_err(|e| format!("{}: {e}", parts[1]))?;
        let count: usize = parts[2].parse().map_err(|e| format!("{}: {e}", parts[2]))?;
        if count == 0 || !(start.is_finite() && end.is_finite()) {
            return Err(format!("empty or non-finite sweep '{s}'"));
        }
        Ok(Self { start, end, count })
    }
}

impl AmplitudeGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count)
            .map(|k| {
                let m = (self.count - 1) as f64;
                (self.start * (m - k as f64) + self.end * k as f64) / m
            })
            .collect()
    }
}

/// Exit code for an error: 2 invalid input, 3 no wave, 4 numerical failure,
/// 1 anything else (I/O).
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidParameter(_)
                | Error::InvalidAmplitude(_)
                | Error::DegenerateParameters(_)
                | Error::Domain(_)
                | Error::Config(_) => EXIT_INVALID,
                Error::NoRoot(_) | Error::NoPeakon(_) => EXIT_NO_WAVE,
                Error::NonFinite { .. }
                | Error::QuadratureFailure(_)
                | Error::Singularity(_)
                | Error::SingularSystem(_)
                | Error::TrackingLost(_)
                | Error::InsufficientTail(_) => EXIT_NUMERICAL,
            };
        }
        if cause.downcast_ref::<InvalidInput>().is_some() {
            return EXIT_INVALID;
        }
    }
    1
}

/// Caps rayon's pool at `GDP_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GDP_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| InvalidInput(format!("GDP_THREADS = '{v}' is not a positive integer")))?;
        if n == 0 {
            return Err(InvalidInput("GDP_THREADS must be >= 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

/// Runs one invocation and returns its exit code; errors map through [`exit_code`].
pub fn run(cli: Cli) -> Result<u8> {
    let scenario = cli.scenario.as_deref().map(LoadedScenario::load).transpose()?;
    let ctx = Context_ {
        scenario: scenario.as_ref(),
        out: cli.out.clone(),
        format: cli.format,
    };
    match &cli.command {
        Command::Classify {
            params,
            amplitude,
            grid,
        } => cmd_classify(&ctx, params, *amplitude, *grid),
        Command::Profile {
            params,
            amplitude,
            nodes,
            tail_tol,
        } => cmd_profile(&ctx, params, *amplitude, *nodes, *tail_tol),
        Command::Peakon {
            params,
            amplitude,
            nodes,
        } => cmd_peakon(&ctx, params, *amplitude, *nodes),
        Command::Simulate { params } => cmd_simulate(&ctx, params),
        Command::Fscan {
            params,
            amplitude,
            q,
            points,
        } => cmd_fscan(&ctx, params, *amplitude, *q, *points),
    }
}

#[allow(non_camel_case_types)]
struct Context_<'a> {
    scenario: Option<&'a LoadedScenario>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Context_<'_> {
    fn params(&self, args: &ParamArgs) -> Result<StructuralParams> {
        let base = self.scenario.map(|s| s.file.params);
        let pick = |flag: Option<f64>, from: Option<f64>, name: &str| -> Result<f64> {
            flag.or(from).ok_or_else(|| {
                InvalidInput(format!("missing --{name} (or supply --scenario)")).into()
            })
        };
        let p = StructuralParams::new(
            pick(args.alpha, base.map(|b| b.alpha()), "alpha")?,
            pick(args.gamma, base.map(|b| b.gamma()), "gamma")?,
            pick(args.c0, base.map(|b| b.c0()), "c0")?,
            pick(args.c1, base.map(|b| b.c1()), "c1")?,
            pick(args.c2, base.map(|b| b.c2()), "c2")?,
            pick(args.c3, base.map(|b| b.c3()), "c3")?,
            args.epsilon
                .or(base.map(|b| b.epsilon()))
                .unwrap_or(0.1),
        )?;
        Ok(p)
    }

    fn amplitude(&self, flag: Option<f64>) -> Result<f64> {
        flag.or(self.scenario.and_then(|s| s.file.amplitude))
            .ok_or_else(|| InvalidInput("missing --amplitude (or 'amplitude' in the scenario)".into()).into())
    }

    fn out_dir(&self) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| self.scenario.and_then(|s| s.output_dir()))
    }
}

fn create_file(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(mut w: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ClassifyRow<'a> {
    amplitude: f64,
    #[serde(flatten)]
    classification: &'a Classification,
}

fn classification_text(a: f64, c: &Classification) -> String {
    let mut s = format!(
        "A         {a}\nregime    {}\ncriterion {}\n",
        c.regime,
        c.criterion.describe()
    );
    if let Some(w) = &c.wave {
        s += &format!(
            "g*        {}\nq         {}\np         {}\nV         {}\n",
            w.g_star, w.q, w.p, w.velocity
        );
    }
    if let Some(psi) = c.psi {
        s += &format!("Psi(A)    {psi}\n");
    }
    for w in &c.warnings {
        s += &format!("warning   {w}\n");
    }
    s
}

fn cmd_classify(
    ctx: &Context_,
    args: &ParamArgs,
    amplitude: Option<f64>,
    grid: Option<AmplitudeGrid>,
) -> Result<u8> {
    let params = ctx.params(args)?;
    let amps = match grid {
        Some(g) => g.values(),
        None => vec![ctx.amplitude(amplitude)?],
    };
    let results: Vec<(f64, Classification)> = amps
        .iter()
        .map(|&a| classify_wave(&params, a).map(|c| (a, c)))
        .collect::<gdp_core::Result<_>>()?;
    let format = ctx.format.unwrap_or(if grid.is_some() { Format::Csv } else { Format::Text });
    let mut buf: Vec<u8> = Vec::new();
    match format {
        Format::Text => {
            for (i, (a, c)) in results.iter().enumerate() {
                if i > 0 {
                    buf.push(b'\n');
                }
                buf.extend_from_slice(classification_text(*a, c).as_bytes());
            }
        }
        Format::Json => {
            let rows: Vec<ClassifyRow> = results
                .iter()
                .map(|(a, c)| ClassifyRow {
                    amplitude: *a,
                    classification: c,
                })
                .collect();
            if grid.is_some() {
                write_json(&mut buf, &rows)?;
            } else {
                write_json(&mut buf, &rows[0])?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["A", "regime", "criterion", "g_star", "q", "p", "V", "psi"])?;
            for (a, c) in &results {
                let f = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
                let wave = c.wave.as_ref();
                w.write_record([
                    format!("{a}"),
                    regime_tag(&c.regime).to_string(),
                    format!("{:?}", c.criterion),
                    f(wave.map(|w| w.g_star)),
                    f(wave.map(|w| w.q)),
                    f(wave.map(|w| w.p)),
                    f(wave.map(|w| w.velocity)),
                    f(c.psi),
                ])?;
            }
            w.flush()?;
        }
    }
    emit(ctx, "classify", format, &buf)?;
    let no_wave = grid.is_none() && results[0].1.regime == Regime::NoWave;
    Ok(if no_wave { EXIT_NO_WAVE } else { EXIT_OK })
}

fn regime_tag(r: &Regime) -> &'static str {
    match r {
        Regime::SmoothSoliton => "smooth_soliton",
        Regime::Peakon {
            arbitrary_amplitude: true,
        } => "peakon_arbitrary",
        Regime::Peakon { .. } => "peakon",
        Regime::AlgebraicDecay => "algebraic_decay",
        Regime::NoWave => "no_wave",
    }
}

/// Writes `buf` to `<out>/<stem>.<ext>` when an output directory is set,
/// otherwise to stdout.
fn emit(ctx: &Context_, stem: &str, format: Format, buf: &[u8]) -> Result<()> {
    match ctx.out_dir() {
        Some(dir) => {
            let ext = match format {
                Format::Text => "txt",
                Format::Json => "json",
                Format::Csv => "csv",
            };
            let mut f = create_file(&dir, &format!("{stem}.{ext}"))?;
            f.write_all(buf)?;
            f.flush()?;
        }
        None => io::stdout().lock().write_all(buf)?,
    }
    Ok(())
}

/// Scalars accompanying an exported profile.
#[derive(Debug, Serialize)]
pub struct ProfileMetadata {
    pub regime: String,
    pub amplitude: f64,
    pub velocity: f64,
    pub q: f64,
    pub g_star: f64,
    pub p: f64,
    pub decay_rate: f64,
    pub r: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub tail_tol: f64,
    pub nodes: usize,
    /// Max residual of the traveling-wave equation (smooth profiles only).
    pub residual: Option<f64>,
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    metadata: &'a ProfileMetadata,
    eta: &'a [f64],
    omega: &'a [f64],
}

fn export_profile(ctx: &Context_, stem: &str, profile: &Profile, meta: &ProfileMetadata) -> Result<()> {
    let format = ctx.format.unwrap_or(Format::Csv);
    match ctx.out_dir() {
        Some(dir) => {
            profile.write_csv(create_file(&dir, &format!("{stem}.csv"))?)?;
            write_json(create_file(&dir, &format!("{stem}.json"))?, meta)?;
        }
        None => match format {
            Format::Json => write_json(
                io::stdout().lock(),
                &ProfileJson {
                    metadata: meta,
                    eta: &profile.eta,
                    omega: &profile.omega,
                },
            )?,
            _ => profile.write_csv(io::stdout().lock())?,
        },
    }
    Ok(())
}

fn cmd_profile(
    ctx: &Context_,
    args: &ParamArgs,
    amplitude: Option<f64>,
    nodes: Option<usize>,
    tail_tol: Option<f64>,
) -> Result<u8> {
    let params = ctx.params(args)?;
    let a = ctx.amplitude(amplitude)?;
    let mut section = ctx.scenario.map(|s| s.file.profile).unwrap_or_default();
    if let Some(n) = nodes {
        section.nodes = n;
    }
    if let Some(t) = tail_tol {
        section.tail_tol = t;
    }
    let cls = classify_wave(&params, a)?;
    let d = params.derived();
    match (cls.regime, cls.wave) {
        (Regime::SmoothSoliton, Some(wave)) => {
            let profile = soliton_profile(&params, &wave, &section.options())?;
            let meta = ProfileMetadata {
                regime: regime_tag(&cls.regime).into(),
                amplitude: a,
                velocity: wave.velocity,
                q: wave.q,
                g_star: wave.g_star,
                p: wave.p,
                decay_rate: profile.decay_rate,
                r: d.r,
                beta: d.beta,
                epsilon: params.epsilon(),
                tail_tol: section.tail_tol,
                nodes: profile.eta.len(),
                residual: Some(profile_residual(&profile, &params)),
            };
            export_profile(ctx, "profile", &profile, &meta)?;
            Ok(EXIT_OK)
        }
        (Regime::Peakon { .. }, Some(_)) => {
            let spec = PeakonSpec::new(&params, Some(a))?;
            let profile = spec.profile(section.nodes, section.tail_tol)?;
            export_profile(ctx, "profile", &profile, &peakon_metadata(&spec, &params, &profile))?;
            Ok(EXIT_OK)
        }
        (Regime::AlgebraicDecay, _) => Err(Error::Singularity(
            "algebraically decaying wave (Psi(A) = A) is detected but not constructed".into(),
        )
        .into()),
        _ => {
            eprintln!("{}", classification_text(a, &cls));
            Ok(EXIT_NO_WAVE)
        }
    }
}

fn peakon_metadata(spec: &PeakonSpec, params: &StructuralParams, profile: &Profile) -> ProfileMetadata {
    ProfileMetadata {
        regime: if spec.arbitrary_amplitude {
            "peakon_arbitrary".into()
        } else {
            "peakon".into()
        },
        amplitude: spec.amplitude,
        velocity: spec.velocity,
        q: spec.r,
        g_star: 0.0,
        p: 1.0,
        decay_rate: profile.decay_rate,
        r: spec.r,
        beta: spec.beta,
        epsilon: params.epsilon(),
        tail_tol: profile.tail_tol,
        nodes: profile.eta.len(),
        residual: None,
    }
}

#[derive(Serialize)]
struct PeakonReport {
    spec: PeakonSpec,
    jump: JumpReport,
    balance_residual: f64,
}

fn cmd_peakon(ctx: &Context_, args: &ParamArgs, amplitude: Option<f64>, nodes: Option<usize>) -> Result<u8> {
    let params = ctx.params(args)?;
    let a = amplitude.or(ctx.scenario.and_then(|s| s.file.amplitude));
    let spec = PeakonSpec::new(&params, a)?;
    let report = PeakonReport {
        spec,
        jump: verify_jump_conditions(&spec, &params),
        balance_residual: spec.balance_residual(&params),
    };
    let format = ctx.format.unwrap_or(Format::Text);
    let mut buf = Vec::new();
    match format {
        Format::Json => write_json(&mut buf, &report)?,
        _ => {
            buf.extend_from_slice(
                format!(
                    "A         {}\nV         {}\nr         {}\nbeta      {}\narbitrary {}\njump      {:e} {:e}\nbalance   {:e}\n",
                    spec.amplitude,
                    spec.velocity,
                    spec.r,
                    spec.beta,
                    spec.arbitrary_amplitude,
                    report.jump.first,
                    report.jump.second,
                    report.balance_residual
                )
                .as_bytes(),
            );
        }
    }
    io::stdout().lock().write_all(&buf)?;
    if let Some(dir) = ctx.out_dir() {
        let section = ctx.scenario.map(|s| s.file.profile).unwrap_or_default();
        let profile = spec.profile(nodes.unwrap_or(section.nodes), section.tail_tol)?;
        profile.write_csv(create_file(&dir, "peakon.csv")?)?;
        write_json(
            create_file(&dir, "peakon.json")?,
            &peakon_metadata(&spec, &params, &profile),
        )?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    dt: f64,
    steps: usize,
    snapshots: usize,
    waves: &'a [gdp_core::pdesim::WaveSummary],
    mass_drift: f64,
    energy_drift: f64,
    t_final: f64,
}

fn write_trajectory(dir: &Path, traj: &Trajectory, format: Format, snapshots: bool) -> Result<()> {
    traj.write_diagnostics_csv(create_file(dir, "diagnostics.csv")?)?;
    if snapshots {
        match format {
            Format::Json => write_json(create_file(dir, "trajectory.json")?, traj)?,
            _ => traj.write_snapshots_csv(create_file(dir, "snapshots.csv")?)?,
        }
    }
    Ok(())
}

fn cmd_simulate(ctx: &Context_, args: &ParamArgs) -> Result<u8> {
    let Some(scn) = ctx.scenario else {
        return Err(InvalidInput("simulate needs --scenario with a [simulation] section".into()).into());
    };
    let params = ctx.params(args)?;
    let (config, windows, snapshots) = scn.sim_config(params)?;
    let dir = ctx
        .out_dir()
        .ok_or_else(|| InvalidInput("simulate needs --out or [output] dir".into()))?;
    let format = ctx.format.unwrap_or(Format::Csv);
    let traj = match run_simulation(&config) {
        Ok(t) => t,
        Err(Error::NonFinite { t, step, partial }) => {
            if let Some(p) = &partial {
                write_trajectory(&dir, p, format, snapshots)?;
            }
            return Err(Error::NonFinite { t, step, partial }.into());
        }
        Err(e) => return Err(e.into()),
    };
    write_trajectory(&dir, &traj, format, snapshots)?;
    let first = &traj.records[0];
    let last = traj.records.last().expect("records");
    let summary = SimulationSummary {
        dt: traj.dt,
        steps: traj.steps,
        snapshots: traj.snapshots.len(),
        waves: &traj.waves,
        mass_drift: (last.mass - first.mass) / first.mass.abs().max(f64::MIN_POSITIVE),
        energy_drift: (last.energy - first.energy) / first.energy.abs().max(f64::MIN_POSITIVE),
        t_final: last.t,
    };
    write_json(create_file(&dir, "summary.json")?, &summary)?;
    let mut text = format!(
        "steps {} dt {} snapshots {}\nmass drift {:e}\nenergy drift {:e}\n",
        summary.steps, summary.dt, summary.snapshots, summary.mass_drift, summary.energy_drift
    );
    if traj.waves.len() == 2 {
        let report: CollisionReport = measure_collision(&traj, &windows)?;
        write_json(create_file(&dir, "collision.json")?, &report)?;
        let mut f = create_file(&dir, "collision.txt")?;
        f.write_all(report.to_text().as_bytes())?;
        f.flush()?;
        text += &report.to_text();
    }
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct FscanJson {
    g: Vec<f64>,
    f: Vec<f64>,
    q: Vec<f64>,
}

fn cmd_fscan(
    ctx: &Context_,
    args: &ParamArgs,
    amplitude: Option<f64>,
    fixed_q: Option<f64>,
    points: Option<usize>,
) -> Result<u8> {
    let params = ctx.params(args)?;
    let n = points
        .or(ctx.scenario.map(|s| s.file.fscan.points))
        .unwrap_or(1000);
    if n < 2 {
        return Err(InvalidInput("fscan needs at least 2 points".into()).into());
    }
    let r = params.derived().r;
    let g: Vec<f64> = (1..=n).map(|k| k as f64 / n as f64).collect();
    let (f, q): (Vec<f64>, Vec<f64>) = match fixed_q {
        Some(q) => {
            let fp = FPoly::new(r, q);
            g.iter().map(|&x| (fp.value(x), q)).unzip()
        }
        None => {
            let a = ctx.amplitude(amplitude)?;
            if params.alpha() > 0.0 {
                let sc = twave::self_consistency(&params, a)?;
                let scale = (1.0 - r) * (2.0 - r);
                g.iter().map(|&x| (sc.eval(x) / scale, sc.q_of(x))).unzip()
            } else {
                let q = twave::solve_q_star_alpha_zero(&params, a)?.q;
                let fp = FPoly::new(r, q);
                g.iter().map(|&x| (fp.value(x), q)).unzip()
            }
        }
    };
    let format = ctx.format.unwrap_or(Format::Csv);
    let mut buf = Vec::new();
    match format {
        Format::Json => write_json(&mut buf, &FscanJson { g, f, q })?,
        _ => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["g", "F", "q"])?;
            for ((x, y), z) in g.iter().zip(&f).zip(&q) {
                w.write_record([format!("{x}"), format!("{y}"), format!("{z}")])?;
            }
            w.flush()?;
        }
    }
    emit(ctx, "fscan", format, &buf)?;
    Ok(EXIT_OK)
}
