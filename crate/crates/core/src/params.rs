//! Structural constants of the gDP model, derived scales, and the
//! solitary-wave regime classifier.
//!
//! The model is
//!
//! ```text
//! ∂t(u − α²ε²uxx) + ∂x(c0 u + c1 u² − c2 ε² ux² + ε²(γ − c3 u) uxx) = 0
//! ```
//!
//! and a solitary wave `u = A ω(β(x − Vt)/ε)` with `ω(0) = 1` is classified
//! by *constructing* it: the self-consistency equation for the profile's
//! turning point `g*` is solved first and the result is inspected. The
//! closed inequalities bounding the admissible amplitudes are evaluated
//! afterwards as a cross-check only.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::twave;

/// Relative tolerance for the measure-zero boundary cases (`p = 1`, `Ψ(A) = A`,
/// `c3 = r α² c1`).
pub const DEFAULT_BOUNDARY_RTOL: f64 = 1e-9;

/// `|a − b| <= rtol · max(|a|, |b|)`.
pub fn nearly_equal(a: f64, b: f64, rtol: f64) -> bool {
    a == b || (a - b).abs() <= rtol * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    alpha: f64,
    gamma: f64,
    c0: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    epsilon: f64,
}

/// The six structural constants plus the dispersion scale ε.
///
/// Construction enforces `α, γ, c0 ≥ 0`, `α + γ > 0`, `c1, c2, c3 > 0` and
/// `ε > 0`; a value of this type is always admissible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct StructuralParams {
    alpha: f64,
    gamma: f64,
    c0: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    epsilon: f64,
}

impl TryFrom<RawParams> for StructuralParams {
    type Error = Error;

    fn try_from(p: RawParams) -> Result<Self> {
        Self::new(p.alpha, p.gamma, p.c0, p.c1, p.c2, p.c3, p.epsilon)
    }
}

impl From<StructuralParams> for RawParams {
    fn from(p: StructuralParams) -> Self {
        RawParams {
            alpha: p.alpha,
            gamma: p.gamma,
            c0: p.c0,
            c1: p.c1,
            c2: p.c2,
            c3: p.c3,
            epsilon: p.epsilon,
        }
    }
}

impl StructuralParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        gamma: f64,
        c0: f64,
        c1: f64,
        c2: f64,
        c3: f64,
        epsilon: f64,
    ) -> Result<Self> {
        let named = [
            ("alpha", alpha),
            ("gamma", gamma),
            ("c0", c0),
            ("c1", c1),
            ("c2", c2),
            ("c3", c3),
            ("epsilon", epsilon),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
        }
        for (name, v) in [("alpha", alpha), ("gamma", gamma), ("c0", c0)] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be >= 0")));
            }
        }
        if gamma + alpha <= 0.0 {
            return Err(Error::InvalidParameter(
                "gamma + alpha must be > 0 (alpha = gamma = 0 is excluded)".into(),
            ));
        }
        for (name, v) in [("c1", c1), ("c2", c2), ("c3", c3), ("epsilon", epsilon)] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(Self {
            alpha,
            gamma,
            c0,
            c1,
            c2,
            c3,
            epsilon,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn c3(&self) -> f64 {
        self.c3
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Same structural constants with a different dispersion scale.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(
            self.alpha, self.gamma, self.c0, self.c1, self.c2, self.c3, epsilon,
        )
    }

    pub fn derived(&self) -> DerivedConstants {
        derive_constants(self)
    }

    /// `c3 = r α² c1` and `γ_α = 0`: peakons of every amplitude exist.
    ///
    /// `γ_α` is compared with `rtol · c3`, i.e. against the scale of `c3 A`
    /// at unit amplitude.
    pub fn admits_arbitrary_peakon(&self, rtol: f64) -> bool {
        let d = self.derived();
        let balanced = nearly_equal(self.c3, d.r * self.alpha * self.alpha * self.c1, rtol);
        balanced && d.gamma_alpha <= rtol * self.c3
    }
}

/// Scales derived from the structural constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// `c3 / (c2 + c3)`, always in (0, 1).
    pub r: f64,
    /// `sqrt(c1 (c2 + c3)) / c3`.
    pub beta: f64,
    /// `γ + α² c0`.
    pub gamma_alpha: f64,
    /// `c3 / (α² c1)`; absent for α = 0.
    pub theta: Option<f64>,
}

impl DerivedConstants {
    /// The peakon-section form of β, `sqrt(c1 / (r c3))`; equal to [`Self::beta`].
    pub fn beta_from_r(&self, params: &StructuralParams) -> f64 {
        (params.c1 / (self.r * params.c3)).sqrt()
    }
}

pub fn derive_constants(params: &StructuralParams) -> DerivedConstants {
    let StructuralParams {
        alpha,
        gamma,
        c0,
        c1,
        c2,
        c3,
        ..
    } = *params;
    let a2 = alpha * alpha;
    DerivedConstants {
        r: c3 / (c2 + c3),
        beta: (c1 * (c2 + c3)).sqrt() / c3,
        gamma_alpha: gamma + a2 * c0,
        theta: (alpha > 0.0).then(|| c3 / (a2 * c1)),
    }
}

/// Kind of solitary wave admitted by `(params, A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// Smooth even wave with exponential tails.
    SmoothSoliton,
    /// Continuous wave with a derivative jump at the crest.
    Peakon { arbitrary_amplitude: bool },
    /// Boundary case `Ψ(A) = A`: tails decay algebraically. Detected, not constructed.
    AlgebraicDecay,
    NoWave,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::SmoothSoliton => write!(f, "smooth soliton"),
            Regime::Peakon {
                arbitrary_amplitude: true,
            } => write!(f, "peakon (arbitrary amplitude)"),
            Regime::Peakon { .. } => write!(f, "peakon"),
            Regime::AlgebraicDecay => write!(f, "algebraically decaying wave"),
            Regime::NoWave => write!(f, "no solitary wave"),
        }
    }
}

/// The condition that decided the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// α > 0: the self-consistency equation has a root `g* ∈ (0, 1)` with `q > 0`.
    SelfConsistentRoot,
    /// α > 0: `c3 A − γ_α = r c1 α² A` (C1 = 0), so `g* = 0`.
    PeakonBalance,
    /// α > 0: `C1 < 0` or no sign change on (0, 1).
    NoSelfConsistentRoot,
    /// α > 0: the root has `q = 0`, equivalently `Ψ(A) = A`.
    PsiEqualsAmplitude,
    /// α = 0: `p = c3 A / γ < 1`.
    SubcriticalAmplitude,
    /// α = 0: `p = 1`.
    CriticalAmplitude,
    /// α = 0: `p > 1`.
    SupercriticalAmplitude,
}

impl Criterion {
    pub fn describe(&self) -> &'static str {
        match self {
            Criterion::SelfConsistentRoot => "self-consistency root g* in (0,1) with q > 0",
            Criterion::PeakonBalance => "c3*A - gamma_alpha = r*c1*alpha^2*A (C1 = 0, g* = 0)",
            Criterion::NoSelfConsistentRoot => "C1 < 0: no self-consistency root in [0,1)",
            Criterion::PsiEqualsAmplitude => "Psi(A) = A (q = 0)",
            Criterion::SubcriticalAmplitude => "alpha = 0 and p = c3*A/gamma < 1",
            Criterion::CriticalAmplitude => "alpha = 0 and p = c3*A/gamma = 1",
            Criterion::SupercriticalAmplitude => "alpha = 0 and p = c3*A/gamma > 1",
        }
    }
}

/// A classified solitary wave that exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSpec {
    pub regime: Regime,
    pub amplitude: f64,
    pub velocity: f64,
    /// `c3 A / (γ + α² V)`.
    pub p: f64,
    pub q: f64,
    pub g_star: f64,
}

/// Result of [`classify_wave`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub regime: Regime,
    pub criterion: Criterion,
    /// Present unless the regime is [`Regime::NoWave`].
    pub wave: Option<WaveSpec>,
    /// `Ψ(A)` when it is defined.
    pub psi: Option<f64>,
    /// Disagreements with the closed amplitude bounds and root-scan ambiguities.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub boundary_rtol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            boundary_rtol: DEFAULT_BOUNDARY_RTOL,
        }
    }
}

pub fn classify_wave(params: &StructuralParams, amplitude: f64) -> Result<Classification> {
    classify_wave_with(params, amplitude, &ClassifyOptions::default())
}

pub fn classify_wave_with(
    params: &StructuralParams,
    amplitude: f64,
    opts: &ClassifyOptions,
) -> Result<Classification> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidAmplitude(format!(
            "amplitude must be positive and finite, got {amplitude}"
        )));
    }
    let mut out = if params.alpha > 0.0 {
        classify_alpha_pos(params, amplitude, opts)?
    } else {
        classify_alpha_zero(params, amplitude, opts)?
    };
    if let Some(msg) = closed_bounds_disagreement(params, amplitude, &out) {
        out.warnings.push(msg);
    }
    Ok(out)
}

fn classify_alpha_pos(
    params: &StructuralParams,
    a: f64,
    opts: &ClassifyOptions,
) -> Result<Classification> {
    let d = params.derived();
    let theta = d.theta.expect("alpha > 0");
    let scan = twave::ScanOptions {
        boundary_rtol: opts.boundary_rtol,
        ..Default::default()
    };
    match twave::solve_g_star_alpha_pos_with(params, a, &scan) {
        Ok(sol) => {
            let velocity = twave::wave_velocity(params, a, sol.root())?;
            if sol.g_star == 0.0 {
                let regime = Regime::Peakon {
                    arbitrary_amplitude: params.admits_arbitrary_peakon(opts.boundary_rtol),
                };
                return Ok(Classification {
                    regime,
                    criterion: Criterion::PeakonBalance,
                    wave: Some(WaveSpec {
                        regime,
                        amplitude: a,
                        velocity,
                        p: 1.0,
                        q: sol.q,
                        g_star: 0.0,
                    }),
                    psi: Some(d.gamma_alpha / params.c3),
                    warnings: sol.warnings,
                });
            }
            let p = 1.0 - sol.g_star.powf(d.r);
            let psi = d.gamma_alpha * p / params.c3;
            // (A − Ψ)/A = q/θ, so Ψ(A) = A ⇔ q = 0.
            let regime = if sol.q <= opts.boundary_rtol * theta {
                Regime::AlgebraicDecay
            } else {
                Regime::SmoothSoliton
            };
            let criterion = if regime == Regime::AlgebraicDecay {
                Criterion::PsiEqualsAmplitude
            } else {
                Criterion::SelfConsistentRoot
            };
            Ok(Classification {
                regime,
                criterion,
                wave: Some(WaveSpec {
                    regime,
                    amplitude: a,
                    velocity,
                    p,
                    q: sol.q,
                    g_star: sol.g_star,
                }),
                psi: Some(psi),
                warnings: sol.warnings,
            })
        }
        Err(Error::NoRoot(msg)) => Ok(Classification {
            regime: Regime::NoWave,
            criterion: Criterion::NoSelfConsistentRoot,
            wave: None,
            psi: None,
            warnings: vec![msg],
        }),
        Err(e) => Err(e),
    }
}

fn classify_alpha_zero(
    params: &StructuralParams,
    a: f64,
    opts: &ClassifyOptions,
) -> Result<Classification> {
    if params.gamma <= 0.0 {
        return Err(Error::DegenerateParameters(
            "alpha = 0 requires gamma > 0".into(),
        ));
    }
    let d = params.derived();
    let p = params.c3 * a / params.gamma;
    if nearly_equal(p, 1.0, opts.boundary_rtol) {
        let regime = Regime::Peakon {
            arbitrary_amplitude: false,
        };
        return Ok(Classification {
            regime,
            criterion: Criterion::CriticalAmplitude,
            wave: Some(WaveSpec {
                regime,
                amplitude: a,
                velocity: params.c0 + d.r * params.gamma * params.c1 / params.c3,
                p: 1.0,
                q: d.r,
                g_star: 0.0,
            }),
            psi: Some(a),
            warnings: Vec::new(),
        });
    }
    if p > 1.0 {
        return Ok(Classification {
            regime: Regime::NoWave,
            criterion: Criterion::SupercriticalAmplitude,
            wave: None,
            psi: None,
            warnings: Vec::new(),
        });
    }
    let sol = twave::solve_q_star_alpha_zero(params, a)?;
    let velocity = twave::wave_velocity(params, a, sol)?;
    let regime = Regime::SmoothSoliton;
    Ok(Classification {
        regime,
        criterion: Criterion::SubcriticalAmplitude,
        wave: Some(WaveSpec {
            regime,
            amplitude: a,
            velocity,
            p,
            q: sol.q,
            g_star: sol.g_star,
        }),
        // With α = 0, Ψ(A) = γ p / c3 = A identically.
        psi: Some(a),
        warnings: Vec::new(),
    })
}

/// `Ψ(A) = γ_α (1 − g*(A)^r) / c3`.
///
/// For α = 0 this equals `A` whenever `p ≤ 1`; for `p > 1` no turning point
/// exists and an error is returned.
pub fn psi(params: &StructuralParams, amplitude: f64) -> Result<f64> {
    let d = params.derived();
    if params.alpha > 0.0 {
        let sol = twave::solve_g_star_alpha_pos(params, amplitude)?;
        Ok(d.gamma_alpha * (1.0 - sol.g_star.powf(d.r)) / params.c3)
    } else {
        let p = params.c3 * amplitude / params.gamma;
        if p > 1.0 {
            return Err(Error::InvalidAmplitude(format!(
                "p = c3*A/gamma = {p} > 1: g* undefined"
            )));
        }
        Ok(d.gamma_alpha * p / params.c3)
    }
}

/// Existence predicted by the closed amplitude bounds, when their hypotheses apply.
///
/// Only the α > 0 case is checked: with α = 0 the lower bound collapses to
/// `A < A` and the bounds say nothing useful.
pub fn closed_bounds_prediction(
    params: &StructuralParams,
    amplitude: f64,
    psi: Option<f64>,
) -> Option<bool> {
    if params.alpha <= 0.0 {
        return None;
    }
    let d = params.derived();
    let rac = d.r * params.alpha * params.alpha * params.c1;
    let c3 = params.c3;
    if d.gamma_alpha == 0.0 {
        return Some(false);
    }
    let lower_ok = psi.map(|ps| ps < amplitude);
    if nearly_equal(c3, rac, DEFAULT_BOUNDARY_RTOL) {
        lower_ok
    } else if c3 > rac {
        let upper = d.gamma_alpha / (c3 - rac);
        Some(lower_ok.unwrap_or(false) && amplitude < upper)
    } else {
        None
    }
}

fn closed_bounds_disagreement(
    params: &StructuralParams,
    amplitude: f64,
    cls: &Classification,
) -> Option<String> {
    let predicted = closed_bounds_prediction(params, amplitude, cls.psi)?;
    let constructed = cls.regime == Regime::SmoothSoliton;
    (predicted != constructed).then(|| {
        format!(
            "closed amplitude bounds predict {} soliton but construction gives {}",
            if predicted { "a" } else { "no" },
            cls.regime
        )
    })
}
