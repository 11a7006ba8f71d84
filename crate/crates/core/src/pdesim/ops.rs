use crate::error::Result;
use crate::numerics::tridiag::CyclicTridiagonal;
use crate::params::StructuralParams;

use super::Grid;

/// Periodic second-order central first derivative.
pub fn d1(u: &[f64], out: &mut [f64], dx: f64) {
    let n = u.len();
    let s = 0.5 / dx;
    out[0] = s * (u[1] - u[n - 1]);
    for i in 1..n - 1 {
        out[i] = s * (u[i + 1] - u[i - 1]);
    }
    out[n - 1] = s * (u[0] - u[n - 2]);
}

/// Periodic second-order central second derivative.
pub fn d2(u: &[f64], out: &mut [f64], dx: f64) {
    let n = u.len();
    let s = 1.0 / (dx * dx);
    out[0] = s * (u[1] - 2.0 * u[0] + u[n - 1]);
    for i in 1..n - 1 {
        out[i] = s * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
    }
    out[n - 1] = s * (u[0] - 2.0 * u[n - 1] + u[n - 2]);
}

/// Prefactored periodic `I − α² ε² D2`; the identity when `α = 0`.
#[derive(Debug, Clone)]
pub struct Helmholtz {
    solver: Option<CyclicTridiagonal>,
}

impl Helmholtz {
    pub fn new(alpha: f64, epsilon: f64, grid: &Grid) -> Result<Self> {
        if alpha == 0.0 {
            return Ok(Self { solver: None });
        }
        let n = grid.nodes();
        let kappa = (alpha * epsilon / grid.dx()).powi(2);
        let off = vec![-kappa; n];
        let diag = vec![1.0 + 2.0 * kappa; n];
        Ok(Self {
            solver: Some(CyclicTridiagonal::factor(&off, &diag, &off)?),
        })
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        if let Some(s) = &self.solver {
            s.solve_in_place(rhs);
        }
    }
}

/// Solves `(I − α² ε² D2) y = rhs` on the periodic grid.
pub fn helmholtz_solve(rhs: &[f64], alpha: f64, epsilon: f64, grid: &Grid) -> Result<Vec<f64>> {
    let mut y = rhs.to_vec();
    Helmholtz::new(alpha, epsilon, grid)?.solve_in_place(&mut y);
    Ok(y)
}

/// Method-of-lines right-hand side with reusable work buffers.
///
/// The total flux
/// `G = c0 u + c1 u² − (c2 − c3)(ε D1 u)² + ε² D2(γ u − c3 u²/2)`
/// is assembled pointwise and `u_t = −(I − α²ε² D2)^{-1} D1 G`.
#[derive(Debug, Clone)]
pub struct Rhs {
    params: StructuralParams,
    dx: f64,
    helmholtz: Helmholtz,
    ux: Vec<f64>,
    inner: Vec<f64>,
    flux: Vec<f64>,
}

impl Rhs {
    pub fn new(params: &StructuralParams, grid: &Grid) -> Result<Self> {
        let n = grid.nodes();
        Ok(Self {
            params: *params,
            dx: grid.dx(),
            helmholtz: Helmholtz::new(params.alpha(), params.epsilon(), grid)?,
            ux: vec![0.0; n],
            inner: vec![0.0; n],
            flux: vec![0.0; n],
        })
    }

    pub fn eval(&mut self, u: &[f64], out: &mut [f64]) {
        let p = &self.params;
        let eps = p.epsilon();
        let eps2 = eps * eps;
        let (c0, c1, c2, c3, gamma) = (p.c0(), p.c1(), p.c2(), p.c3(), p.gamma());
        d1(u, &mut self.ux, self.dx);
        for (v, &ui) in self.inner.iter_mut().zip(u) {
            *v = gamma * ui - 0.5 * c3 * ui * ui;
        }
        d2(&self.inner, &mut self.flux, self.dx);
        for i in 0..u.len() {
            let ui = u[i];
            let ex = eps * self.ux[i];
            self.flux[i] = c0 * ui + c1 * ui * ui - (c2 - c3) * ex * ex + eps2 * self.flux[i];
        }
        d1(&self.flux, out, self.dx);
        for v in out.iter_mut() {
            *v = -*v;
        }
        self.helmholtz.solve_in_place(out);
    }
}

/// Classical four-stage Runge–Kutta on [`Rhs`].
#[derive(Debug, Clone)]
pub struct Stepper {
    rhs: Rhs,
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
}

impl Stepper {
    pub fn new(params: &StructuralParams, grid: &Grid) -> Result<Self> {
        let n = grid.nodes();
        Ok(Self {
            rhs: Rhs::new(params, grid)?,
            k: std::array::from_fn(|_| vec![0.0; n]),
            stage: vec![0.0; n],
        })
    }

    pub fn rhs(&mut self, u: &[f64], out: &mut [f64]) {
        self.rhs.eval(u, out);
    }

    pub fn step(&mut self, u: &mut [f64], dt: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        let stage = &mut self.stage;
        self.rhs.eval(u, k1);
        for i in 0..u.len() {
            stage[i] = u[i] + 0.5 * dt * k1[i];
        }
        self.rhs.eval(stage, k2);
        for i in 0..u.len() {
            stage[i] = u[i] + 0.5 * dt * k2[i];
        }
        self.rhs.eval(stage, k3);
        for i in 0..u.len() {
            stage[i] = u[i] + dt * k3[i];
        }
        self.rhs.eval(stage, k4);
        let w = dt / 6.0;
        for i in 0..u.len() {
            u[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
    }
}

/// Mass-preserving fourth-difference smoothing `u ← u − (σ/16) δ⁴u`.
pub fn apply_filter(u: &mut [f64], strength: f64, scratch: &mut Vec<f64>) {
    let n = u.len();
    scratch.clear();
    scratch.extend((0..n).map(|i| {
        let at = |k: isize| u[(i as isize + k).rem_euclid(n as isize) as usize];
        at(-2) - 4.0 * at(-1) + 6.0 * at(0) - 4.0 * at(1) + at(2)
    }));
    let s = strength / 16.0;
    for (ui, d4) in u.iter_mut().zip(scratch.iter()) {
        *ui -= s * d4;
    }
}

/// Upper bound of `|λ|` over the discrete Fourier modes of the scheme
/// linearised about a state with `max|u| = u_max` and `max|u_x| = ux_max`.
///
/// For mode angle θ the central operators have symbols `D1 → i sinθ/dx` and
/// `D2 → −4 sin²(θ/2)/dx²`, giving
/// `|λ| ≤ (sinθ/dx)(a + b sinθ/dx + d m/dx²) / (1 + κ m)` with `m = 4 sin²(θ/2)`.
pub fn spectral_radius(params: &StructuralParams, grid: &Grid, u_max: f64, ux_max: f64) -> f64 {
    let dx = grid.dx();
    let eps2 = params.epsilon().powi(2);
    let a = params.c0() + 2.0 * params.c1() * u_max;
    let b = 2.0 * (params.c2() - params.c3()).abs() * eps2 * ux_max;
    let d = eps2 * (params.gamma() + params.c3() * u_max);
    let kappa = params.alpha().powi(2) * eps2 / (dx * dx);
    let samples = 512;
    (0..=samples)
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / samples as f64;
            let s = theta.sin();
            let m = 4.0 * (0.5 * theta).sin().powi(2);
            (s / dx) * (a + b * s / dx + d * m / (dx * dx)) / (1.0 + kappa * m)
        })
        .fold(0.0, f64::max)
}
