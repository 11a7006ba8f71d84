use serde::Serialize;

use super::fpoly::SelfConsistencyPoly;
use crate::error::{Error, Result};
use crate::numerics::roots::{brent, sign_changes, BrentTol};
use crate::numerics::{exp_m1_m_x, ln_1m_p_p};
use crate::params::{StructuralParams, DEFAULT_BOUNDARY_RTOL};

/// Turning point `g*` of the profile together with the exponent `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveRoot {
    pub g_star: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Number of uniform scan intervals on [0, 1].
    pub scan_points: usize,
    /// Stop refinement once `|F| <= f_tol`.
    pub f_tol: f64,
    /// Final bracket width.
    pub x_tol: f64,
    /// Relative tolerance for declaring `C1 = 0`.
    pub boundary_rtol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            scan_points: 4096,
            f_tol: 1e-13,
            x_tol: 1e-12,
            boundary_rtol: DEFAULT_BOUNDARY_RTOL,
        }
    }
}

/// Solution of the α > 0 self-consistency equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GStarSolution {
    pub g_star: f64,
    pub q: f64,
    /// Every root found on (0, 1) with its `q`, including rejected ones.
    pub candidates: Vec<WaveRoot>,
    pub warnings: Vec<String>,
}

impl GStarSolution {
    pub fn root(&self) -> WaveRoot {
        WaveRoot {
            g_star: self.g_star,
            q: self.q,
        }
    }
}

/// `θ`, `ξ` and the self-consistency function for `(params, A)`; needs α > 0.
pub fn self_consistency(params: &StructuralParams, amplitude: f64) -> Result<SelfConsistencyPoly> {
    let alpha = params.alpha();
    if alpha <= 0.0 {
        return Err(Error::Domain("self-consistency equation needs alpha > 0".into()));
    }
    if !(amplitude > 0.0) {
        return Err(Error::InvalidAmplitude(format!("A = {amplitude} must be > 0")));
    }
    let d = params.derived();
    let a2c1 = alpha * alpha * params.c1();
    let theta = params.c3() / a2c1;
    let xi = d.gamma_alpha / (a2c1 * amplitude);
    Ok(SelfConsistencyPoly::new(d.r, theta, xi))
}

pub fn solve_g_star_alpha_pos(params: &StructuralParams, amplitude: f64) -> Result<GStarSolution> {
    solve_g_star_alpha_pos_with(params, amplitude, &ScanOptions::default())
}

/// Root `g* ∈ [0, 1)` of `F(g*, q(g*)) = 0` with `q(g) = θ − ξ(1 − g^r)`.
///
/// `g* = 0` is returned exactly when `C1 = r(r − θ + ξ)` vanishes to the
/// boundary tolerance (the peakon balance). Otherwise (0, 1) is scanned on a
/// uniform grid and each sign change is refined by Brent's method; roots with
/// `q ≤ 0` are rejected.
pub fn solve_g_star_alpha_pos_with(
    params: &StructuralParams,
    amplitude: f64,
    opts: &ScanOptions,
) -> Result<GStarSolution> {
    let sc = self_consistency(params, amplitude)?;
    let r = sc.r;
    let balance = r - sc.theta + sc.xi;
    let scale = r.max(sc.theta).max(sc.xi);
    if balance.abs() <= opts.boundary_rtol * scale {
        return Ok(GStarSolution {
            g_star: 0.0,
            q: sc.q_of(0.0),
            candidates: vec![WaveRoot {
                g_star: 0.0,
                q: sc.q_of(0.0),
            }],
            warnings: Vec::new(),
        });
    }
    if sc.c1 < 0.0 {
        return Err(Error::NoRoot(format!(
            "C1 = {:e} < 0: no root of the self-consistency equation in [0, 1)",
            sc.c1
        )));
    }
    let n = opts.scan_points.max(2);
    let nodes: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|&g| sc.eval(g)).collect();
    // Φ = (1 − r)(2 − r) F, so scale the residual target accordingly.
    let tol = BrentTol {
        xtol: opts.x_tol,
        ftol: opts.f_tol * (1.0 - r) * (2.0 - r),
        max_iter: 300,
    };
    let mut candidates = Vec::new();
    for (i, j) in sign_changes(&values) {
        let g = if i == j {
            nodes[i]
        } else {
            brent(|g| sc.eval(g), nodes[i], nodes[j], tol)?
        };
        if g > 0.0 && g < 1.0 {
            candidates.push(polish_in_p(params, amplitude, g).unwrap_or(WaveRoot {
                g_star: g,
                q: sc.q_of(g),
            }));
        }
    }
    let mut warnings = Vec::new();
    let accepted: Vec<WaveRoot> = candidates.iter().copied().filter(|c| c.q > 0.0).collect();
    if candidates.len() > accepted.len() {
        warnings.push(format!(
            "{} root(s) rejected because q <= 0",
            candidates.len() - accepted.len()
        ));
    }
    let Some(first) = accepted.first().copied() else {
        return Err(Error::NoRoot(format!(
            "no root with q > 0 on (0, 1) (C1 = {:e}, {} candidate(s))",
            sc.c1,
            candidates.len()
        )));
    };
    if accepted.len() > 1 {
        warnings.push(format!(
            "self-consistency equation has {} admissible roots {:?}; using g* = {}",
            accepted.len(),
            accepted.iter().map(|c| c.g_star).collect::<Vec<_>>(),
            first.g_star
        ));
    }
    Ok(GStarSolution {
        g_star: first.g_star,
        q: first.q,
        candidates,
        warnings,
    })
}

/// Re-solves the self-consistency condition near `g` in the variable
/// `p = 1 − g^r`, where it reads `α² c1 A q(p) + γ_α p − c3 A = 0` with
/// `q(p) = (1 − r) 𝔉 / 𝔊` the exact zero condition of `F`. Unlike
/// `θ − ξ (1 − g^r)`, this stays well conditioned as `α → 0`.
fn polish_in_p(params: &StructuralParams, amplitude: f64, g: f64) -> Option<WaveRoot> {
    let d = params.derived();
    let r = d.r;
    let a2c1a = params.alpha().powi(2) * params.c1() * amplitude;
    let c3a = params.c3() * amplitude;
    let q_of = |p: f64| {
        let (g_frak, f_frak) = linear_coefficients(p, r);
        (1.0 - r) * f_frak / g_frak
    };
    let h = |p: f64| a2c1a * q_of(p) + d.gamma_alpha * p - c3a;
    let p0 = -(r * g.ln()).exp_m1();
    let root = [1e-8, 1e-6, 1e-4, 1e-2].iter().find_map(|&rel| {
        let (lo, hi) = (p0 * (1.0 - rel), (p0 * (1.0 + rel)).min(1.0 - 1e-15));
        if !(lo > 0.0 && lo < hi) || h(lo) * h(hi) > 0.0 {
            return None;
        }
        let tol = BrentTol {
            xtol: 4.0 * f64::EPSILON * p0,
            ftol: 0.0,
            max_iter: 200,
        };
        brent(h, lo, hi, tol).ok()
    })?;
    let q = q_of(root);
    let g_star = ((-root).ln_1p() / r).exp();
    (q.is_finite() && g_star > 0.0 && g_star < 1.0).then_some(WaveRoot { g_star, q })
}

/// The α = 0 reduction: `g* = (1 − p)^{1/r}` with `p = c3 A / γ`, and `q*`
/// from the linear equation `q 𝔊 = (1 − r) 𝔉`.
pub fn solve_q_star_alpha_zero(params: &StructuralParams, amplitude: f64) -> Result<WaveRoot> {
    if params.alpha() != 0.0 {
        return Err(Error::Domain("alpha = 0 reduction called with alpha > 0".into()));
    }
    if params.gamma() <= 0.0 {
        return Err(Error::DegenerateParameters("alpha = 0 requires gamma > 0".into()));
    }
    if !(amplitude > 0.0) {
        return Err(Error::InvalidAmplitude(format!("A = {amplitude} must be > 0")));
    }
    let r = params.derived().r;
    let p = params.c3() * amplitude / params.gamma();
    if p >= 1.0 {
        return Err(Error::InvalidAmplitude(format!(
            "p = c3*A/gamma = {p} >= 1: no smooth soliton"
        )));
    }
    let (g_frak, f_frak) = linear_coefficients(p, r);
    let q = (1.0 - r) * f_frak / g_frak;
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::NoRoot(format!("q* = {q} is not positive (p = {p})")));
    }
    Ok(WaveRoot {
        g_star: (1.0 - p).powf(1.0 / r),
        q,
    })
}

/// `(𝔊, 𝔉)` of the α = 0 linear equation. Both vanish to second order as
/// `p → 0`, so they are assembled from `ln(1 − p) + p` and `e^L − 1 − L`
/// with `L = 2(r − 1)/r · ln(1 − p) = ln g*^{2(r − 1)}`.
pub fn linear_coefficients(p: f64, r: f64) -> (f64, f64) {
    let k = 2.0 * (r - 1.0) / r;
    let lp = ln_1m_p_p(p);
    let l = k * (lp - p);
    let e2 = exp_m1_m_x(l);
    let g_frak = -k * lp - e2;
    let f_frak = 2.0 * lp - r / (1.0 - r) * e2 + p * p * (2.0 - r) / r;
    (g_frak, f_frak)
}

/// Phase velocity of the wave with turning point `root`.
///
/// α > 0: `V = (c3 A / (1 − g*^r) − γ) / α²`, evaluated in the equivalent form
/// `V = c0 + q c1 A / (1 − g*^r)` which holds on the self-consistency curve
/// and avoids dividing a cancellation by α². α = 0: `V = c0 + q γ c1 / c3`.
pub fn wave_velocity(params: &StructuralParams, amplitude: f64, root: WaveRoot) -> Result<f64> {
    let alpha = params.alpha();
    if alpha > 0.0 {
        let r = params.derived().r;
        let p = -(r * root.g_star.ln()).exp_m1();
        if !(p > 0.0) {
            return Err(Error::DegenerateParameters(format!(
                "g* = {} gives p = {p}; velocity undefined",
                root.g_star
            )));
        }
        Ok(params.c0() + root.q * params.c1() * amplitude / p)
    } else {
        Ok(params.c0() + root.q * params.gamma() * params.c1() / params.c3())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twave::FPoly;

    fn example2() -> StructuralParams {
        StructuralParams::new(2.0, 0.0, 1.0, 3.0, 1.0, 5.0, 0.1).unwrap()
    }

    #[test]
    fn example2_root_meets_tolerances() {
        let sol = solve_g_star_alpha_pos(&example2(), 1.2).unwrap();
        let r = 5.0 / 6.0;
        let f = FPoly::new(r, sol.q);
        assert!(f.value(sol.g_star).abs() <= 1e-13);
        assert!((sol.g_star - 0.5070).abs() < 5e-4);
        assert_eq!(sol.candidates.len(), 1);
    }

    #[test]
    fn negative_c1_has_no_root() {
        // r = 1/2, θ = 1, γ_α = 1: C1 < 0 once A > 2.
        let p = StructuralParams::new(1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.1).unwrap();
        assert!(matches!(solve_g_star_alpha_pos(&p, 2.5), Err(Error::NoRoot(_))));
        assert!(solve_g_star_alpha_pos(&p, 1.9).is_ok());
    }

    #[test]
    fn dp_balance_gives_zero_root() {
        let dp = StructuralParams::new(1.5, 0.0, 0.0, 2.0 / 2.25, 1.0, 1.0, 0.1).unwrap();
        let sol = solve_g_star_alpha_pos(&dp, 0.8).unwrap();
        assert_eq!(sol.g_star, 0.0);
        assert!((sol.q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn alpha_zero_rejects_critical_amplitude() {
        let p = StructuralParams::new(0.0, 10.0, 1.0, 1.0, 1.0, 4.0, 0.1).unwrap();
        assert!(matches!(
            solve_q_star_alpha_zero(&p, 2.5),
            Err(Error::InvalidAmplitude(_))
        ));
    }

    #[test]
    fn velocity_requires_p_positive() {
        let root = WaveRoot { g_star: 1.0, q: 0.3 };
        assert!(matches!(
            wave_velocity(&example2(), 1.0, root),
            Err(Error::DegenerateParameters(_))
        ));
    }
}
