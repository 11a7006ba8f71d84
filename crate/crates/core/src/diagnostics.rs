//! Balance-law monitoring, peak tracking, tail fitting and collision
//! elasticity measurement.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, linear_fit};
use crate::params::StructuralParams;
use crate::pdesim::{Grid, GridState, Trajectory};
use crate::twave::{fit_tail_rate, Profile};

/// Energy `E = ∫u² + α²∫(ε u_x)²` and its production rate
/// `D = ε^{-1}(c3 − 2c2)∫(ε u_x)³`, so that `dE/dt = D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceRecord {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
}

/// Rectangle-rule integrals with central-difference `u_x` (spectrally accurate
/// for periodic data).
pub fn balance_terms(state: &GridState, params: &StructuralParams) -> BalanceRecord {
    let (energy, dissipation) = energy_and_rate(&state.u, state.grid.dx(), params);
    BalanceRecord {
        t: state.t,
        energy,
        dissipation,
    }
}

pub(crate) fn energy_and_rate(u: &[f64], dx: f64, params: &StructuralParams) -> (f64, f64) {
    let n = u.len();
    let eps = params.epsilon();
    let a2 = params.alpha() * params.alpha();
    let eux = |i: usize| eps * (u[(i + 1) % n] - u[(i + n - 1) % n]) / (2.0 * dx);
    let e = compensated_sum((0..n).map(|i| {
        let w = eux(i);
        u[i] * u[i] + a2 * w * w
    })) * dx;
    let cubic = compensated_sum((0..n).map(|i| eux(i).powi(3))) * dx;
    let d = (params.c3() - 2.0 * params.c2()) * cubic / eps;
    (e, d)
}

/// `Σ u dx`.
pub fn mass(u: &[f64], dx: f64) -> f64 {
    compensated_sum(u.iter().copied()) * dx
}

/// Sub-grid crest location strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakMode {
    /// Three-point parabola through the grid maximum.
    Quadratic,
    /// Crossing of straight lines fitted to `ln u` on three nodes either side
    /// of the grid maximum; exact for `A e^{−k|x − x0|}`.
    Cusp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub x: f64,
    pub value: f64,
    pub index: usize,
}

/// Local maxima with `u >= min_height`, sorted by decreasing value.
pub fn find_peaks(u: &[f64], grid: &Grid, mode: PeakMode, min_height: f64) -> Vec<Peak> {
    let n = u.len();
    let dx = grid.dx();
    let at = |k: isize| u[k.rem_euclid(n as isize) as usize];
    let mut peaks: Vec<Peak> = (0..n)
        .filter(|&i| {
            let k = i as isize;
            u[i] >= min_height && u[i] > at(k - 1) && u[i] >= at(k + 1)
        })
        .map(|i| {
            let k = i as isize;
            let xi = i as f64 * dx;
            let (off, value) = match mode {
                PeakMode::Quadratic => {
                    let (l, c, r) = (at(k - 1), at(k), at(k + 1));
                    let curv = l - 2.0 * c + r;
                    if curv < 0.0 {
                        let s = 0.5 * (l - r) / curv;
                        (s * dx, c - 0.25 * (l - r) * s)
                    } else {
                        (0.0, c)
                    }
                }
                PeakMode::Cusp => cusp_crest(&at, k, dx).unwrap_or((0.0, u[i])),
            };
            Peak {
                x: (xi + off).rem_euclid(grid.length()),
                value,
                index: i,
            }
        })
        .collect();
    peaks.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.index.cmp(&b.index)));
    peaks
}

fn cusp_crest(at: &impl Fn(isize) -> f64, k: isize, dx: f64) -> Option<(f64, f64)> {
    let side = |ks: [isize; 3]| -> Option<(f64, f64)> {
        let xs: Vec<f64> = ks.iter().map(|&j| (j - k) as f64 * dx).collect();
        let ys: Vec<f64> = ks.iter().map(|&j| at(j)).collect();
        if ys.iter().any(|&y| y <= 0.0) {
            return None;
        }
        let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        linear_fit(&xs, &ls)
    };
    let (al, bl) = side([k - 3, k - 2, k - 1])?;
    let (ar, br) = side([k + 1, k + 2, k + 3])?;
    if !(bl > 0.0 && br < 0.0) {
        return None;
    }
    let x = (ar - al) / (bl - br);
    if x.abs() > dx {
        return None;
    }
    Some((x, (al + bl * x).exp()))
}

/// Exponential decay rate of a profile's tail over its last resolved decade.
pub fn fit_decay_rate(profile: &Profile) -> Result<f64> {
    fit_tail_rate(profile.half_eta(), profile.half_omega())
}

/// How the pre- and post-collision windows are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CollisionWindows {
    /// Waves interact while their crests are closer than `separation`
    /// (default `10 ε / (r β)`) or fewer than two crests are visible. The pre
    /// window is the first half of the time before the interaction, the post
    /// window the second half of the time after it.
    Auto { separation: Option<f64> },
    /// Explicit time intervals.
    Explicit { pre: [f64; 2], post: [f64; 2] },
}

impl Default for CollisionWindows {
    fn default() -> Self {
        CollisionWindows::Auto { separation: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveTrack {
    /// 0 for the larger wave, 1 for the smaller.
    pub label: usize,
    pub initial_amplitude: Option<f64>,
    pub amplitude_pre: f64,
    pub amplitude_post: f64,
    pub velocity_pre: f64,
    pub velocity_post: f64,
    pub rel_amplitude_change: f64,
    pub rel_velocity_change: f64,
    /// Post-window crest line minus the extrapolated pre-window line, at the
    /// centre of the interaction.
    pub phase_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionReport {
    pub waves: Vec<WaveTrack>,
    pub pre_window: [f64; 2],
    pub post_window: [f64; 2],
    pub interaction_window: Option<[f64; 2]>,
    pub min_separation: f64,
}

impl CollisionReport {
    /// Largest `|A_post − A_init| / A_init` over both waves; pre-window
    /// amplitudes stand in when initial ones are unknown.
    pub fn max_amplitude_deviation(&self) -> f64 {
        self.waves
            .iter()
            .map(|w| {
                let a0 = w.initial_amplitude.unwrap_or(w.amplitude_pre);
                ((w.amplitude_post - a0) / a0).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "pre window  [{:.4}, {:.4}]\npost window [{:.4}, {:.4}]",
            self.pre_window[0], self.pre_window[1], self.post_window[0], self.post_window[1]
        );
        match self.interaction_window {
            Some([a, b]) => {
                let _ = writeln!(s, "interaction [{a:.4}, {b:.4}]");
            }
            None => {
                let _ = writeln!(s, "interaction none");
            }
        }
        let _ = writeln!(s, "min separation {:.6}", self.min_separation);
        for w in &self.waves {
            let _ = writeln!(
                s,
                "wave {}: A {:.6} -> {:.6} ({:+.3e}), V {:.6} -> {:.6} ({:+.3e}), phase shift {:+.6}",
                w.label,
                w.amplitude_pre,
                w.amplitude_post,
                w.rel_amplitude_change,
                w.velocity_pre,
                w.velocity_post,
                w.rel_velocity_change,
                w.phase_shift
            );
        }
        let _ = writeln!(
            s,
            "max amplitude deviation {:.3e}",
            self.max_amplitude_deviation()
        );
        s
    }
}

fn periodic_distance(a: f64, b: f64, length: f64) -> f64 {
    let d = (a - b).rem_euclid(length);
    d.min(length - d)
}

/// Crest pair of a snapshot, largest first, if two crests are visible.
fn crest_pair(traj: &Trajectory, index: usize, min_height: f64) -> Option<[Peak; 2]> {
    let peaks = find_peaks(
        &traj.snapshots[index].u,
        &traj.grid,
        traj.peak_mode,
        min_height,
    );
    (peaks.len() >= 2).then(|| [peaks[0], peaks[1]])
}

/// Two-wave elasticity measurement.
pub fn measure_collision(traj: &Trajectory, windows: &CollisionWindows) -> Result<CollisionReport> {
    if traj.waves.len() != 2 {
        return Err(Error::TrackingLost(format!(
            "collision measurement needs exactly two waves, trajectory has {}",
            traj.waves.len()
        )));
    }
    if traj.snapshots.len() < 6 {
        return Err(Error::TrackingLost("too few snapshots".into()));
    }
    let length = traj.grid.length();
    let min_amp = traj.waves.iter().map(|w| w.amplitude).fold(f64::INFINITY, f64::min);
    let min_height = 0.25 * min_amp;
    let pairs: Vec<Option<[Peak; 2]>> = (0..traj.snapshots.len())
        .map(|i| crest_pair(traj, i, min_height))
        .collect();
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
    let t0 = times[0];
    let t_last = *times.last().expect("snapshots");

    let seps: Vec<Option<f64>> = pairs
        .iter()
        .map(|p| p.map(|[a, b]| periodic_distance(a.x, b.x, length)))
        .collect();
    let min_separation = seps.iter().map(|s| s.unwrap_or(0.0)).fold(f64::INFINITY, f64::min);

    let (pre, post, interaction) = match *windows {
        CollisionWindows::Explicit { pre, post } => (pre, post, None),
        CollisionWindows::Auto { separation } => {
            let d = traj.params.derived();
            let d_int = separation.unwrap_or(10.0 * traj.params.epsilon() / (d.r * d.beta));
            let interacting: Vec<usize> = seps
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_none_or(|v| v < d_int))
                .map(|(i, _)| i)
                .collect();
            match (interacting.first(), interacting.last()) {
                (Some(&a), Some(&b)) => {
                    let (ts, te) = (times[a], times[b]);
                    (
                        [t0, t0 + 0.5 * (ts - t0)],
                        [te + 0.5 * (t_last - te), t_last],
                        Some([ts, te]),
                    )
                }
                _ => {
                    let mid = 0.5 * (t0 + t_last);
                    ([t0, mid], [mid, t_last], None)
                }
            }
        }
    };
    let select = |w: [f64; 2]| -> Vec<usize> {
        (0..times.len())
            .filter(|&i| times[i] >= w[0] && times[i] <= w[1])
            .collect()
    };
    let pre_idx = select(pre);
    let post_idx = select(post);
    if pre_idx.len() < 3 || post_idx.len() < 3 {
        return Err(Error::TrackingLost(format!(
            "windows too short: {} pre and {} post snapshots",
            pre_idx.len(),
            post_idx.len()
        )));
    }

    let series = |idx: &[usize], label: usize| -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let mut ts = Vec::with_capacity(idx.len());
        let mut xs: Vec<f64> = Vec::with_capacity(idx.len());
        let mut amps = Vec::with_capacity(idx.len());
        for &i in idx {
            let pair = pairs[i].ok_or_else(|| {
                Error::TrackingLost(format!(
                    "crests merged at t = {} outside the interaction window",
                    times[i]
                ))
            })?;
            let p = pair[label];
            let mut x = p.x;
            if let Some(&prev) = xs.last() {
                x += length * ((prev - x) / length).round();
            }
            ts.push(times[i]);
            xs.push(x);
            amps.push(p.value);
        }
        Ok((ts, xs, amps))
    };

    let t_mid = interaction.map_or(0.5 * (pre[1] + post[0]), |[a, b]| 0.5 * (a + b));
    let mut waves = Vec::with_capacity(2);
    for label in 0..2 {
        let (tp, xp, ap) = series(&pre_idx, label)?;
        let (tq, mut xq, aq) = series(&post_idx, label)?;
        let (b_pre, v_pre) = linear_fit(&tp, &xp)
            .ok_or_else(|| Error::TrackingLost("degenerate pre-window fit".into()))?;
        // Place the post track on the branch nearest the free-propagation prediction.
        let predicted = b_pre + v_pre * tq[0];
        let wrap = length * ((predicted - xq[0]) / length).round();
        for x in &mut xq {
            *x += wrap;
        }
        let (b_post, v_post) = linear_fit(&tq, &xq)
            .ok_or_else(|| Error::TrackingLost("degenerate post-window fit".into()))?;
        let a_pre = ap.iter().sum::<f64>() / ap.len() as f64;
        let a_post = aq.iter().sum::<f64>() / aq.len() as f64;
        let initial = {
            let mut amps: Vec<f64> = traj.waves.iter().map(|w| w.amplitude).collect();
            amps.sort_by(|a, b| b.total_cmp(a));
            Some(amps[label])
        };
        waves.push(WaveTrack {
            label,
            initial_amplitude: initial,
            amplitude_pre: a_pre,
            amplitude_post: a_post,
            velocity_pre: v_pre,
            velocity_post: v_post,
            rel_amplitude_change: (a_post - a_pre) / a_pre,
            rel_velocity_change: (v_post - v_pre) / v_pre,
            phase_shift: (b_post + v_post * t_mid) - (b_pre + v_pre * t_mid),
        });
    }
    Ok(CollisionReport {
        waves,
        pre_window: pre,
        post_window: post,
        interaction_window: interaction,
        min_separation,
    })
}
