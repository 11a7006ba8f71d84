//! Acceptance criteria. Prints one PASS/FAIL line per criterion, with the
//! sub-checks indented beneath it, and exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use gdp_cli::scenario::LoadedScenario;
use gdp_core::diagnostics::{balance_terms, measure_collision};
use gdp_core::params::psi;
use gdp_core::pdesim::{run_simulation, Grid, GridState, InitialCondition, SimConfig, Stepper, Trajectory, WaveInit};
use gdp_core::peakon::{peakon_amplitude, PeakonAmplitude, PeakonSpec};
use gdp_core::twave::{eval_f, integrate_profile, profile_residual, soliton_profile, FPoly, ProfileOptions};
use gdp_core::{classify_wave, Regime, StructuralParams};

// Criterion 1
const EX2_G_STAR: f64 = 0.5070;
const EX2_G_STAR_TOL: f64 = 0.005;
const EX2_TIME_LIMIT: Duration = Duration::from_millis(10);
// Criterion 2
const TWO_THIRDS_SETS: usize = 100;
const TWO_THIRDS_TOL: f64 = 1e-8;
const TWO_THIRDS_TIME_LIMIT: Duration = Duration::from_secs(1);
// Criterion 3
const CH_TOL: f64 = 1e-8;
// Criterion 4
const PEAKON_VELOCITY_TOL: f64 = 1e-12;
const PEAKON_BALANCE_RTOL: f64 = 1e-15;
// Criterion 5
const PROFILE_NODES: usize = 2001;
const PROFILE_RESIDUAL_TOL: f64 = 1e-6;
const SHOOTING_TOL: f64 = 1e-6;
const TAIL_RATE_RTOL: f64 = 0.01;
// Criterion 6
const F_IDENTITY_SAMPLES: usize = 1000;
const F_IDENTITY_TOL: f64 = 1e-12;
// Criterion 7
const TRANSIT_NODES: usize = 2048;
const TRANSIT_VELOCITY_RTOL: f64 = 0.01;
const TRANSIT_AMPLITUDE_RTOL: f64 = 0.01;
const SPACE_ORDER: f64 = 2.0;
const TIME_ORDER: f64 = 4.0;
const ORDER_TOL: f64 = 0.3;
const TRANSIT_TIME_LIMIT: Duration = Duration::from_secs(120);
// Criterion 8
const MASS_DRIFT_PER_1E4_STEPS: f64 = 1e-12;
const CH_ENERGY_DRIFT: f64 = 1e-4;
/// About twelve nodes across the crest; the drift is truncation error, O(dx^4).
const CH_ENERGY_NODES: usize = 4096;
const BALANCE_RTOL: f64 = 0.05;
// Criterion 9
const COLLISION_AMPLITUDE_RTOL: f64 = 0.05;
const COLLISION_TIME_LIMIT: Duration = Duration::from_secs(600);
// Criterion 10
const BOUNDARY_RTOL: f64 = 1e-9;

struct Outcome {
    id: u32,
    title: &'static str,
    checks: Vec<(bool, String)>,
}

impl Outcome {
    fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        self.checks.push((ok, msg.into()));
    }

    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.0)
    }

    fn print(&self) {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        println!("{tag} {:>2}  {}", self.id, self.title);
        for (ok, msg) in &self.checks {
            println!("          [{}] {msg}", if *ok { "ok" } else { "x " });
        }
    }
}

/// Mass drift of every simulation run by the suite, for criterion 8.
#[derive(Default)]
struct MassLog(Vec<(String, f64, usize)>);

impl MassLog {
    fn add(&mut self, label: &str, traj: &Trajectory) {
        let m0 = traj.records[0].mass;
        let drift = traj
            .records
            .iter()
            .map(|r| ((r.mass - m0) / m0).abs())
            .fold(0.0, f64::max);
        self.0.push((label.to_string(), drift, traj.steps));
    }
}

fn params(alpha: f64, gamma: f64, c0: f64, c1: f64, c2: f64, c3: f64) -> StructuralParams {
    StructuralParams::new(alpha, gamma, c0, c1, c2, c3, 0.1).expect("valid parameters")
}

fn example2() -> StructuralParams {
    params(2.0, 0.0, 1.0, 3.0, 1.0, 5.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `(c3 A / (1 − g*^r) − γ) / α²`.
fn velocity_from_root(p: &StructuralParams, a: f64, g_star: f64) -> f64 {
    let r = p.derived().r;
    (p.c3() * a / (1.0 - g_star.powf(r)) - p.gamma()) / p.alpha().powi(2)
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new(1, "Example-2 root of the self-consistency equation");
    let p = example2();
    let start = Instant::now();
    let c = classify_wave(&p, 1.2);
    let elapsed = start.elapsed();
    match c.ok().and_then(|c| c.wave) {
        Some(w) => o.check(
            (w.g_star - EX2_G_STAR).abs() <= EX2_G_STAR_TOL,
            format!("g* = {:.8} (expected {EX2_G_STAR} +- {EX2_G_STAR_TOL})", w.g_star),
        ),
        None => o.check(false, "no wave found"),
    }
    o.check(elapsed < EX2_TIME_LIMIT, format!("runtime {elapsed:?} (limit {EX2_TIME_LIMIT:?})"));
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new(2, "Closed-form root for r = 2/3 on random parameter sets");
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let start = Instant::now();
    let (mut tested, mut worst, mut misclassified) = (0usize, 0.0f64, 0usize);
    while tested < TWO_THIRDS_SETS {
        let alpha = rng.gen_range(0.2..3.0);
        let gamma = rng.gen_range(0.0..3.0);
        let c0 = rng.gen_range(0.0..3.0);
        let c1 = rng.gen_range(0.1..5.0);
        let c3 = rng.gen_range(0.1..5.0);
        let a = rng.gen_range(0.01..5.0);
        let p = params(alpha, gamma, c0, c1, 0.5 * c3, c3);
        let ga = gamma + alpha * alpha * c0;
        let s = 1.0 - c3 * a / (ga + 2.0 / 3.0 * c1 * alpha * alpha * a);
        if !(s > 1e-3 && s < 1.0 - 1e-3) {
            continue;
        }
        tested += 1;
        match classify_wave(&p, a).ok().and_then(|c| c.wave) {
            Some(w) if w.regime == Regime::SmoothSoliton => {
                worst = worst.max((w.g_star - s.powf(1.5)).abs());
            }
            _ => misclassified += 1,
        }
    }
    let elapsed = start.elapsed();
    o.check(
        misclassified == 0,
        format!("{tested} admissible sets, {misclassified} without a smooth soliton"),
    );
    o.check(worst <= TWO_THIRDS_TOL, format!("max |g* - closed form| = {worst:.2e} (tol {TWO_THIRDS_TOL:e})"));
    o.check(
        elapsed < TWO_THIRDS_TIME_LIMIT,
        format!("runtime {elapsed:?} (limit {TWO_THIRDS_TIME_LIMIT:?})"),
    );
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new(3, "Camassa-Holm special case");
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut peakon_ok = true;
    for &alpha in &[0.5, 1.0, 2.0] {
        for &c3 in &[1.0, 3.0] {
            let c1 = 1.5 * c3 / (alpha * alpha);
            for &c0 in &[0.5, 2.0] {
                for &a in &[0.1, 1.0, 5.0] {
                    let p = params(alpha, 0.0, c0, c1, 0.5 * c3, c3);
                    let exact = (1.0 + c3 * a / (c0 * alpha * alpha)).powf(-1.5);
                    match classify_wave(&p, a).ok().and_then(|c| c.wave) {
                        Some(w) if w.regime == Regime::SmoothSoliton => {
                            worst = worst.max((w.g_star - exact).abs());
                        }
                        _ => worst = f64::INFINITY,
                    }
                    count += 1;
                }
            }
            let p0 = params(alpha, 0.0, 0.0, c1, 0.5 * c3, c3);
            for &a in &[0.1, 1.0, 5.0] {
                let regime = classify_wave(&p0, a).map(|c| c.regime);
                peakon_ok &= matches!(regime, Ok(Regime::Peakon { .. }));
            }
        }
    }
    o.check(worst <= CH_TOL, format!("c0 > 0: {count} cases, max |g* - (1 + c3 A/(c0 alpha^2))^(-3/2)| = {worst:.2e} (tol {CH_TOL:e})"));
    o.check(peakon_ok, "c0 = 0: every case classified as a peakon");
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new(4, "Peakon algebra");
    // DP: c2 = c3, c1 = 2 c3/alpha^2, c0 = gamma = 0. CH: c2 = c3/2, c1 = 3 c3/(2 alpha^2), c0 = gamma = 0.
    let families: [(&str, fn(f64, f64) -> StructuralParams); 2] = [
        ("DP", |alpha, c3| params(alpha, 0.0, 0.0, 2.0 * c3 / (alpha * alpha), c3, c3)),
        ("CH", |alpha, c3| params(alpha, 0.0, 0.0, 1.5 * c3 / (alpha * alpha), 0.5 * c3, c3)),
    ];
    for (name, make) in families {
        let mut worst_balance = 0.0f64;
        let mut arbitrary = true;
        let mut worst_v = 0.0f64;
        for &alpha in &[0.5, 1.0, 2.0, 1.5] {
            for &c3 in &[1.0, 2.5] {
                let p = make(alpha, c3);
                let d = p.derived();
                worst_balance = worst_balance.max(rel(d.r * p.c1() * alpha * alpha, p.c3()));
                arbitrary &= matches!(peakon_amplitude(&p), Ok(PeakonAmplitude::Arbitrary));
                for &a in &[0.3, 1.7] {
                    if let Ok(spec) = PeakonSpec::new(&p, Some(a)) {
                        worst_v = worst_v.max((spec.velocity - (p.c0() + d.r * p.c1() * a)).abs());
                    } else {
                        worst_v = f64::INFINITY;
                    }
                }
            }
        }
        o.check(
            worst_balance <= PEAKON_BALANCE_RTOL && arbitrary,
            format!("{name}: c3 = r c1 alpha^2 and gamma_alpha = 0 (max rel residual {worst_balance:.1e}), arbitrary amplitude"),
        );
        o.check(
            worst_v <= PEAKON_VELOCITY_TOL,
            format!("{name}: max |V - (c0 + r c1 A)| = {worst_v:.1e}"),
        );
    }
    // Fixed-amplitude peakons with alpha > 0.
    let mut worst_v = 0.0f64;
    for &(alpha, gamma, c0, c1, c2, c3) in &[(1.0, 1.0, 0.5, 1.0, 1.0, 2.0), (0.5, 2.0, 1.0, 3.0, 2.0, 1.0), (2.0, 0.3, 0.0, 0.4, 1.0, 4.0)] {
        let p = params(alpha, gamma, c0, c1, c2, c3);
        match PeakonSpec::new(&p, None) {
            Ok(s) => worst_v = worst_v.max((s.velocity - (c0 + p.derived().r * c1 * s.amplitude)).abs()),
            Err(_) => worst_v = f64::INFINITY,
        }
    }
    o.check(
        worst_v <= PEAKON_VELOCITY_TOL,
        format!("alpha > 0, fixed amplitude: max |V - (c0 + r c1 A)| = {worst_v:.1e}"),
    );
    // alpha = 0: A = gamma/c3, V = c0 + r gamma c1/c3.
    let (mut worst_a, mut worst_v) = (0.0f64, 0.0f64);
    for &(gamma, c0, c1, c2, c3) in &[(10.0, 1.0, 1.0, 1.0, 4.0), (1.0, 0.0, 1.0, 1.0, 1.0), (2.5, 0.7, 3.0, 0.5, 1.5)] {
        let p = params(0.0, gamma, c0, c1, c2, c3);
        let r = p.derived().r;
        match PeakonSpec::new(&p, None) {
            Ok(s) => {
                worst_a = worst_a.max((s.amplitude - gamma / c3).abs());
                worst_v = worst_v.max((s.velocity - (c0 + r * gamma * c1 / c3)).abs());
            }
            Err(_) => worst_a = f64::INFINITY,
        }
    }
    o.check(
        worst_a <= PEAKON_VELOCITY_TOL && worst_v <= PEAKON_VELOCITY_TOL,
        format!("alpha = 0: max |A - gamma/c3| = {worst_a:.1e}, max |V - (c0 + r gamma c1/c3)| = {worst_v:.1e}"),
    );
    o
}

/// RK4 on `g'' = g − (2 − q) g^{1−r} + (1 − q) g^{1−2r}` from `g(0) = g*`, `g'(0) = 0`,
/// sampled every `sub` steps.
fn shoot(g_star: f64, q: f64, r: f64, h: f64, steps: usize, sub: usize) -> Vec<f64> {
    let acc = |g: f64| g - (2.0 - q) * g.powf(1.0 - r) + (1.0 - q) * g.powf(1.0 - 2.0 * r);
    let (mut g, mut v) = (g_star, 0.0);
    let mut out = vec![g];
    for k in 1..=steps {
        let (k1g, k1v) = (v, acc(g));
        let (k2g, k2v) = (v + 0.5 * h * k1v, acc(g + 0.5 * h * k1g));
        let (k3g, k3v) = (v + 0.5 * h * k2v, acc(g + 0.5 * h * k2g));
        let (k4g, k4v) = (v + h * k3v, acc(g + h * k3g));
        g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if k % sub == 0 {
            out.push(g);
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new(5, "Example-2 profile: residual, shooting, tail rate");
    let p = example2();
    let w = classify_wave(&p, 1.2).unwrap().wave.unwrap();
    let opts = ProfileOptions {
        nodes: PROFILE_NODES,
        ..ProfileOptions::default()
    };
    let prof = soliton_profile(&p, &w, &opts).unwrap();
    let res = profile_residual(&prof, &p);
    o.check(
        res <= PROFILE_RESIDUAL_TOL,
        format!("max traveling-wave residual {res:.2e} on {PROFILE_NODES} nodes (tol {PROFILE_RESIDUAL_TOL:e})"),
    );

    let r = p.derived().r;
    let gp = integrate_profile(w.g_star, w.q, r, opts.tail_tol, PROFILE_NODES.div_ceil(2)).unwrap();
    let h = gp.eta[1] - gp.eta[0];
    // Shooting leaves the separatrix exponentially; compare while 1 − g ≥ 1e-4.
    let cutoff = gp.gap.iter().position(|&d| d < 1e-4).unwrap();
    let sub = 50;
    let g_shoot = shoot(w.g_star, w.q, r, h / sub as f64, cutoff * sub, sub);
    let dev = (0..=cutoff).map(|k| (g_shoot[k] - gp.g[k]).abs()).fold(0.0, f64::max);
    o.check(
        dev <= SHOOTING_TOL,
        format!("max |g_quadrature - g_shooting| = {dev:.2e} for eta <= {:.2} (tol {SHOOTING_TOL:e})", gp.eta[cutoff]),
    );

    let sqrt_q = w.q.sqrt();
    let sqrt_rq = (r * w.q).sqrt();
    o.check(
        rel(prof.decay_rate, sqrt_q) <= TAIL_RATE_RTOL,
        format!(
            "tail rate {:.6} vs sqrt(q) = {sqrt_q:.6}: rel err {:.2e} (tol {TAIL_RATE_RTOL}); vs sqrt(r q) = {sqrt_rq:.6}: rel err {:.2e}",
            prof.decay_rate,
            rel(prof.decay_rate, sqrt_q),
            rel(prof.decay_rate, sqrt_rq)
        ),
    );
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new(6, "Identities of F");
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let mut worst = 0.0f64;
    for _ in 0..F_IDENTITY_SAMPLES {
        let r = rng.gen_range(0.05..0.95);
        let g = rng.gen_range(1e-3..1.0);
        let f = eval_f(g, &FPoly::new(r, r)).unwrap();
        worst = worst.max((f - g * g * (g.powf(-r) - 1.0).powi(2)).abs());
    }
    o.check(
        worst <= F_IDENTITY_TOL,
        format!("{F_IDENTITY_SAMPLES} samples: max |F(g, r) - g^2 (g^-r - 1)^2| = {worst:.1e}"),
    );
    let (mut w0, mut w1) = (0.0f64, 0.0f64);
    for _ in 0..F_IDENTITY_SAMPLES {
        let r = rng.gen_range(0.05..0.95);
        let q = rng.gen_range(0.0..1.0);
        let f = FPoly::new(r, q);
        w0 = w0.max(f.value(1.0).abs());
        w1 = w1.max(f.derivative(1.0).abs());
    }
    o.check(
        w0 <= F_IDENTITY_TOL && w1 <= F_IDENTITY_TOL,
        format!("{F_IDENTITY_SAMPLES} random q: max |F(1, q)| = {w0:.1e}, max |F'(1, q)| = {w1:.1e}"),
    );
    o
}

fn single_wave(p: StructuralParams, a: f64, length: f64, nodes: usize, t_end: f64, snapshot: f64, dt: Option<f64>) -> Trajectory {
    let config = SimConfig {
        params: p,
        grid: Grid::new(length, nodes).unwrap(),
        t_end,
        cfl: 0.5,
        snapshot_interval: snapshot,
        initial: InitialCondition::Waves {
            waves: vec![WaveInit {
                amplitude: a,
                center: 0.5 * length,
            }],
        },
        filter: None,
        seam_tol: 1e-8,
        dt,
    };
    run_simulation(&config).expect("simulation")
}

fn max_diff_on_coarse(coarse: &[f64], fine: &[f64]) -> f64 {
    coarse
        .iter()
        .enumerate()
        .map(|(j, c)| (c - fine[2 * j]).abs())
        .fold(0.0, f64::max)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_7(mass: &mut MassLog) -> Outcome {
    let mut o = Outcome::new(7, "Single-soliton propagation and self-convergence");
    let p = example2();
    let a = 1.2;
    let w = classify_wave(&p, a).unwrap().wave.unwrap();
    let v = velocity_from_root(&p, a, w.g_star);
    let length = 40.0;
    let start = Instant::now();
    let traj = single_wave(p, a, length, TRANSIT_NODES, length / v, 0.25, None);
    mass.add("single transit", &traj);
    // Unwrapped crest track.
    let mut xs = Vec::new();
    let mut ts = Vec::new();
    let mut amp_drift = 0.0f64;
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for rec in &traj.records {
        let Some(pk) = rec.peaks.first() else { continue };
        if let Some(x0) = prev {
            let jump = pk.x - x0;
            if jump < -0.5 * length {
                offset += length;
            } else if jump > 0.5 * length {
                offset -= length;
            }
        }
        prev = Some(pk.x);
        xs.push(pk.x + offset);
        ts.push(rec.t);
        amp_drift = amp_drift.max(rel(pk.value, a));
    }
    let n = ts.len() as f64;
    let (mt, mx) = (ts.iter().sum::<f64>() / n, xs.iter().sum::<f64>() / n);
    let slope = ts.iter().zip(&xs).map(|(t, x)| (t - mt) * (x - mx)).sum::<f64>()
        / ts.iter().map(|t| (t - mt).powi(2)).sum::<f64>();
    o.check(
        rel(slope, v) <= TRANSIT_VELOCITY_RTOL,
        format!("crest velocity {slope:.6} vs {v:.6}: rel err {:.2e} (tol {TRANSIT_VELOCITY_RTOL})", rel(slope, v)),
    );
    o.check(
        amp_drift <= TRANSIT_AMPLITUDE_RTOL,
        format!("max crest-height drift {amp_drift:.2e} over t = {:.3} (tol {TRANSIT_AMPLITUDE_RTOL})", length / v),
    );

    // Space: fixed dt from the finest grid, N = 1024, 2048, 4096 on L = 10.
    let (len_c, t_c) = (10.0, 0.25);
    let finest = single_wave(p, a, len_c, 4096, t_c, t_c, None);
    let dt = finest.dt;
    let mid = single_wave(p, a, len_c, 2048, t_c, t_c, Some(dt));
    let coarse = single_wave(p, a, len_c, 1024, t_c, t_c, Some(dt));
    for (label, t) in [("space N=1024", &coarse), ("space N=2048", &mid), ("space N=4096", &finest)] {
        mass.add(label, t);
    }
    let e1 = max_diff_on_coarse(&coarse.last().u, &mid.last().u);
    let e2 = max_diff_on_coarse(&mid.last().u, &finest.last().u);
    let order_x = (e1 / e2).log2();
    o.check(
        (order_x - SPACE_ORDER).abs() <= ORDER_TOL,
        format!("observed spatial order {order_x:.3} (differences {e1:.2e}, {e2:.2e}; expected {SPACE_ORDER} +- {ORDER_TOL})"),
    );

    // Time: N = 1024, dt0 from the stability estimate at cfl 0.5, then halved twice.
    let base = single_wave(p, a, len_c, 1024, t_c, t_c, None);
    let dt0 = base.dt;
    let half = single_wave(p, a, len_c, 1024, t_c, t_c, Some(0.5 * dt0));
    let quarter = single_wave(p, a, len_c, 1024, t_c, t_c, Some(0.25 * dt0));
    for (label, t) in [("time dt0", &base), ("time dt0/2", &half), ("time dt0/4", &quarter)] {
        mass.add(label, t);
    }
    let d1 = max_diff(&base.last().u, &half.last().u);
    let d2 = max_diff(&half.last().u, &quarter.last().u);
    let order_t = (d1 / d2).log2();
    o.check(
        (order_t - TIME_ORDER).abs() <= ORDER_TOL,
        format!("observed temporal order {order_t:.3} (differences {d1:.2e}, {d2:.2e}; expected {TIME_ORDER} +- {ORDER_TOL})"),
    );
    let elapsed = start.elapsed();
    o.check(
        elapsed < TRANSIT_TIME_LIMIT,
        format!("runtime {elapsed:.1?} (limit {TRANSIT_TIME_LIMIT:?})"),
    );
    o
}

fn criterion_8(mass: &mut MassLog) -> Outcome {
    let mut o = Outcome::new(8, "Conservation and the energy balance");
    // CH coefficients: c3 = 2 c2, c1 = 3 c3/(2 alpha^2), gamma = 0, c0 > 0.
    let p = params(1.0, 0.0, 1.0, 3.0, 1.0, 2.0);
    let a = 1.0;
    let w = classify_wave(&p, a).unwrap().wave.unwrap();
    let length = 40.0;
    let traj = single_wave(p, a, length, CH_ENERGY_NODES, length / w.velocity, 0.5, None);
    mass.add("CH transit", &traj);
    let e0 = traj.records[0].energy;
    let drift = traj
        .records
        .iter()
        .map(|r| rel(r.energy, e0))
        .fold(0.0, f64::max);
    o.check(
        drift <= CH_ENERGY_DRIFT,
        format!("c3 = 2 c2: max relative energy drift {drift:.2e} over one transit, N = {CH_ENERGY_NODES} (tol {CH_ENERGY_DRIFT:e})"),
    );

    // c3 != 2 c2: asymmetric data, dE/dt by fourth-order differences against D.
    let p = example2();
    let grid = Grid::new(10.0, 2048).unwrap();
    let u0: Vec<f64> = grid
        .x()
        .iter()
        .map(|&x| 0.6 * (-((x - 4.0) / 0.4f64).powi(2)).exp() + 0.3 * (-((x - 4.6) / 0.25f64).powi(2)).exp())
        .collect();
    let mut stepper = Stepper::new(&p, &grid).unwrap();
    let h = 2e-5;
    let mut u = u0;
    let mut series = Vec::new();
    for k in 0..=2400 {
        if k % 600 >= 596 || k % 600 <= 4 {
            let state = GridState::new(grid, k as f64 * h, u.clone()).unwrap();
            series.push((k, balance_terms(&state, &p)));
        }
        stepper.step(&mut u, h);
    }
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for centre in [600usize, 1200, 1800] {
        let at = |k: usize| series.iter().find(|(j, _)| *j == k).map(|s| s.1).unwrap();
        let de = (at(centre - 2).energy - 8.0 * at(centre - 1).energy + 8.0 * at(centre + 1).energy
            - at(centre + 2).energy)
            / (12.0 * h);
        let d = at(centre).dissipation;
        worst = worst.max(rel(de, d));
        detail.push(format!("t={:.3}: dE/dt {de:.4e}, D {d:.4e}", centre as f64 * h));
    }
    o.check(
        worst <= BALANCE_RTOL,
        format!("c3 != 2 c2: max |dE/dt - D|/|D| = {worst:.2e} (tol {BALANCE_RTOL}); {}", detail.join("; ")),
    );

    let mut all_ok = true;
    let mut worst_label = String::new();
    let mut worst_ratio = 0.0f64;
    for (label, d, steps) in &mass.0 {
        let allowed = MASS_DRIFT_PER_1E4_STEPS * (*steps as f64 / 1e4).max(1.0);
        let ratio = d / allowed;
        all_ok &= ratio <= 1.0;
        if ratio >= worst_ratio {
            worst_ratio = ratio;
            worst_label = format!("{label}: drift {d:.2e} over {steps} steps");
        }
    }
    o.check(
        all_ok,
        format!(
            "mass drift within {MASS_DRIFT_PER_1E4_STEPS:e} per 1e4 steps in all {} runs (worst {worst_label})",
            mass.0.len()
        ),
    );
    o
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/scenarios").join(name)
}

fn criterion_9(mass: &mut MassLog) -> Outcome {
    let mut o = Outcome::new(9, "Two-soliton collisions of the shipped scenarios");
    for name in ["fig2.toml", "fig3.toml"] {
        let start = Instant::now();
        let result = LoadedScenario::load(&scenario_path(name)).and_then(|s| {
            let params = s.file.params;
            let (config, windows, _) = s.sim_config(params)?;
            let traj = run_simulation(&config)?;
            let report = measure_collision(&traj, &windows)?;
            Ok((traj, report))
        });
        let elapsed = start.elapsed();
        match result {
            Ok((traj, report)) => {
                mass.add(name, &traj);
                let dev = report.max_amplitude_deviation();
                let amps: Vec<String> = report
                    .waves
                    .iter()
                    .map(|w| format!("{:.4} -> {:.4}", w.initial_amplitude.unwrap_or(w.amplitude_pre), w.amplitude_post))
                    .collect();
                o.check(
                    report.waves.len() == 2 && dev <= COLLISION_AMPLITUDE_RTOL,
                    format!(
                        "{name}: two waves emerge, amplitudes {} (max rel change {dev:.2e}, tol {COLLISION_AMPLITUDE_RTOL})",
                        amps.join(", ")
                    ),
                );
            }
            Err(e) => o.check(false, format!("{name}: {e:#}")),
        }
        o.check(
            elapsed < COLLISION_TIME_LIMIT,
            format!("{name}: runtime {elapsed:.1?} (limit {COLLISION_TIME_LIMIT:?})"),
        );
    }
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new(10, "Amplitude bounds through Psi(A)");
    // r = 2/3 (c2 = c3/2), gamma_alpha > 0, alpha > 0.
    let families = [
        params(1.0, 1.0, 0.0, 1.0, 0.5, 1.0),
        params(2.0, 0.0, 1.0, 3.0, 1.5, 3.0),
        params(0.5, 2.0, 0.3, 4.0, 1.0, 2.0),
    ];
    let (mut tested, mut violations) = (0, 0);
    for p in &families {
        for k in 1..=400 {
            let a = 0.025 * k as f64;
            if let Ok(v) = psi(p, a) {
                tested += 1;
                if !(v < a) {
                    violations += 1;
                }
            }
        }
    }
    o.check(
        tested > 0 && violations == 0,
        format!("r = 2/3: Psi(A) < A at {tested} tested amplitudes ({violations} violations)"),
    );
    // alpha = 0: Psi(A) = A identically, so the strict bound carries no information.
    let p0 = params(0.0, 3.0, 1.0, 1.0, 1.0, 2.0);
    let worst = (1..=60)
        .map(|k| 0.025 * k as f64)
        .map(|a| psi(&p0, a).map_or(f64::INFINITY, |v| rel(v, a)))
        .fold(0.0, f64::max);
    o.check(
        worst <= 4.0 * f64::EPSILON,
        format!("r = 2/3, alpha = 0: Psi(A) = A to {worst:.1e} relative for A < gamma/c3"),
    );
    // r = 1/2 (c2 = c3): NoWave for A >= 4 gamma_alpha / (3 c3).
    let families = [
        params(1.0, 1.0, 0.0, 1.0, 1.0, 1.0),
        params(0.0, 2.0, 1.0, 1.0, 2.0, 2.0),
        params(0.5, 1.0, 1.0, 1.0, 3.0, 3.0),
        params(1.0, 0.5, 1.0, 4.0, 1.0, 1.0),
    ];
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in &families {
        let ga = p.derived().gamma_alpha;
        let bound = 4.0 * ga / (3.0 * p.c3());
        for factor in [1.0 + BOUNDARY_RTOL, 1.01, 1.1, 1.5, 2.0, 4.0] {
            let a = bound * factor;
            checked += 1;
            match classify_wave(p, a) {
                Ok(c) if c.regime == Regime::NoWave => {}
                Ok(c) => failures.push(format!(
                    "alpha={} gamma={} c0={} c1={} c3={} A={a:.6}: {}{}",
                    p.alpha(),
                    p.gamma(),
                    p.c0(),
                    p.c1(),
                    p.c3(),
                    c.regime,
                    c.wave.map(|w| format!(" (g* = {:.5})", w.g_star)).unwrap_or_default()
                )),
                Err(e) => failures.push(format!("A={a}: {e}")),
            }
        }
    }
    let shown: Vec<&str> = failures.iter().take(3).map(String::as_str).collect();
    o.check(
        failures.is_empty(),
        format!(
            "r = 1/2: NoWave at {} of {checked} amplitudes A >= 4 gamma_alpha/(3 c3){}",
            checked - failures.len(),
            if shown.is_empty() {
                String::new()
            } else {
                format!("; e.g. {}", shown.join("; "))
            }
        ),
    );
    o
}

fn main() -> ExitCode {
    let mut mass = MassLog::default();
    let mut outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(&mut mass),
    ];
    let c9 = criterion_9(&mut mass);
    outcomes.push(criterion_8(&mut mass));
    outcomes.push(c9);
    outcomes.push(criterion_10());
    outcomes.sort_by_key(|o| o.id);

    println!();
    for o in &outcomes {
        o.print();
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id.to_string()).collect();
    println!(
        "\nacceptance: {} passed, {} failed{}",
        outcomes.len() - failed.len(),
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(" ({})", failed.join(", "))
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
