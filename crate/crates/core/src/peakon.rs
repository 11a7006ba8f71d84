//! Closed-form peakons `u = A exp(−r β |x − V t| / ε)` and the jump
//! conditions a derivative discontinuity at the crest must satisfy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{nearly_equal, StructuralParams, DEFAULT_BOUNDARY_RTOL};
use crate::twave::{Profile, ProfileKind};

/// Relative tolerance on the peakon balance `c3 A − γ_α = r c1 α² A` for a
/// constructed [`PeakonSpec`].
pub const BALANCE_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PeakonAmplitude {
    /// The structural constants fix a unique amplitude.
    Fixed(f64),
    /// `c3 = r α² c1` and `γ_α = 0`: every `A > 0` is admissible.
    Arbitrary,
}

/// Amplitude admitted by the balance `c3 A − γ_α = r c1 α² A`, i.e.
/// `A = γ_α / (c3 − r α² c1)`.
pub fn peakon_amplitude(params: &StructuralParams) -> Result<PeakonAmplitude> {
    let d = params.derived();
    let c3 = params.c3();
    let rac = d.r * params.alpha() * params.alpha() * params.c1();
    let balanced = nearly_equal(c3, rac, DEFAULT_BOUNDARY_RTOL);
    let no_background = d.gamma_alpha <= DEFAULT_BOUNDARY_RTOL * c3;
    match (balanced, no_background) {
        (true, true) => Ok(PeakonAmplitude::Arbitrary),
        (true, false) => Err(Error::NoPeakon(format!(
            "c3 = r*alpha^2*c1 = {rac} but gamma_alpha = {} > 0",
            d.gamma_alpha
        ))),
        (false, true) => Err(Error::NoPeakon(format!(
            "gamma_alpha = 0 with c3 = {c3} != r*alpha^2*c1 = {rac} forces A = 0"
        ))),
        (false, false) => {
            let a = d.gamma_alpha / (c3 - rac);
            if a > 0.0 && a.is_finite() {
                Ok(PeakonAmplitude::Fixed(a))
            } else {
                Err(Error::NoPeakon(format!(
                    "gamma_alpha / (c3 - r*alpha^2*c1) = {a} is not positive (c3 < r*alpha^2*c1)"
                )))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakonSpec {
    pub amplitude: f64,
    pub velocity: f64,
    pub r: f64,
    pub beta: f64,
    pub arbitrary_amplitude: bool,
}

impl PeakonSpec {
    /// Peakon of `params`. `amplitude` is required when the amplitude is
    /// arbitrary and, if given otherwise, must match the fixed one.
    pub fn new(params: &StructuralParams, amplitude: Option<f64>) -> Result<Self> {
        let (a, arbitrary) = match (peakon_amplitude(params)?, amplitude) {
            (PeakonAmplitude::Arbitrary, Some(a)) if a > 0.0 && a.is_finite() => (a, true),
            (PeakonAmplitude::Arbitrary, Some(a)) => {
                return Err(Error::InvalidAmplitude(format!("A = {a} must be > 0")))
            }
            (PeakonAmplitude::Arbitrary, None) => {
                return Err(Error::NoPeakon(
                    "peakon amplitude is arbitrary; an amplitude must be supplied".into(),
                ))
            }
            (PeakonAmplitude::Fixed(a), None) => (a, false),
            (PeakonAmplitude::Fixed(a), Some(b)) => {
                if !nearly_equal(a, b, DEFAULT_BOUNDARY_RTOL) {
                    return Err(Error::NoPeakon(format!(
                        "requested A = {b} but the structural constants fix A = {a}"
                    )));
                }
                (a, false)
            }
        };
        let d = params.derived();
        let spec = Self {
            amplitude: a,
            velocity: params.c0() + d.r * params.c1() * a,
            r: d.r,
            beta: d.beta,
            arbitrary_amplitude: arbitrary,
        };
        let resid = spec.balance_residual(params);
        if resid > BALANCE_RTOL {
            return Err(Error::NoPeakon(format!(
                "balance c3*A - gamma_alpha = r*c1*alpha^2*A violated (relative {resid:e})"
            )));
        }
        Ok(spec)
    }

    /// `|c3 A − γ_α − r c1 α² A|` relative to the largest of the three terms.
    pub fn balance_residual(&self, params: &StructuralParams) -> f64 {
        let d = params.derived();
        let lhs = params.c3() * self.amplitude;
        let rhs = self.r * params.c1() * params.alpha() * params.alpha() * self.amplitude;
        let scale = lhs.max(d.gamma_alpha).max(rhs);
        (lhs - d.gamma_alpha - rhs).abs() / scale
    }

    /// `ω(η) = exp(−r |η|)`.
    pub fn omega(&self, eta: f64) -> f64 {
        (-self.r * eta.abs()).exp()
    }

    /// Sampled profile on `2 n − 1` symmetric nodes reaching `ω = tail_tol`.
    pub fn profile(&self, nodes: usize, tail_tol: f64) -> Result<Profile> {
        if nodes < 5 || nodes % 2 == 0 {
            return Err(Error::Domain(format!(
                "profile grid needs an odd node count >= 5, got {nodes}"
            )));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::Domain(format!("tail_tol = {tail_tol} outside (0, 1)")));
        }
        let half = nodes.div_ceil(2);
        let eta_max = -tail_tol.ln() / self.r;
        let eta: Vec<f64> = (0..half)
            .map(|k| eta_max * k as f64 / (half - 1) as f64)
            .collect();
        let omega: Vec<f64> = eta.iter().map(|&e| self.omega(e)).collect();
        let slope: Vec<f64> = omega.iter().map(|w| -self.r * w).collect();
        Profile::from_half(
            &eta,
            &omega,
            &slope,
            self.amplitude,
            self.velocity,
            tail_tol,
            ProfileKind::Peakon,
        )
    }
}

/// `u(x, t) = A exp(−r β |x − V t| / ε)` on the real line.
pub fn peakon_profile(
    spec: &PeakonSpec,
    params: &StructuralParams,
    x: &[f64],
    t: f64,
) -> Vec<f64> {
    let k = spec.r * spec.beta / params.epsilon();
    x.iter()
        .map(|&xi| spec.amplitude * (-k * (xi - spec.velocity * t).abs()).exp())
        .collect()
}

/// Residuals of the crest jump conditions
/// `(1 − p)[W'] = 0` and `(1 − p)[W'] − (c2/c3)[(W')²] = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpReport {
    pub first: f64,
    pub second: f64,
}

impl JumpReport {
    pub fn max_abs(&self) -> f64 {
        self.first.abs().max(self.second.abs())
    }
}

/// Jump residuals for `W = p ω` with one-sided slopes `ω'(±0)`.
pub fn jump_residuals(p: f64, c2: f64, c3: f64, slope_right: f64, slope_left: f64) -> JumpReport {
    let (wr, wl) = (p * slope_right, p * slope_left);
    let jump = wr - wl;
    let jump_sq = wr * wr - wl * wl;
    JumpReport {
        first: (1.0 - p) * jump,
        second: (1.0 - p) * jump - c2 / c3 * jump_sq,
    }
}

/// Jump conditions of the closed-form peakon: `p = 1`, `ω'(±0) = ∓r`.
pub fn verify_jump_conditions(spec: &PeakonSpec, params: &StructuralParams) -> JumpReport {
    jump_residuals(1.0, params.c2(), params.c3(), -spec.r, spec.r)
}

/// Max residual of the reduced equation
/// `(1 − W) W'' = (1 − r)/r · W'² + r (q W − W²)` with `W = ω`, `q = r`,
/// on each half-line, using fourth-order differences of the exact samples
/// at nodes at least two steps away from the crest.
pub fn peakon_ode_residual(r: f64, eta_max: f64, nodes_per_side: usize) -> f64 {
    let n = nodes_per_side.max(6);
    let h = eta_max / (n - 1) as f64;
    let w = |e: f64| (-r * e.abs()).exp();
    let mut worst: f64 = 0.0;
    for sign in [1.0, -1.0] {
        for k in 2..n - 2 {
            let e = sign * k as f64 * h;
            let (m2, m1, c, p1, p2) = (w(e - 2.0 * h), w(e - h), w(e), w(e + h), w(e + 2.0 * h));
            let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
            let d2 = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
            let resid = (1.0 - c) * d2 - (1.0 - r) / r * d1 * d1 - r * (r * c - c * c);
            worst = worst.max(resid.abs());
        }
    }
    worst
}
