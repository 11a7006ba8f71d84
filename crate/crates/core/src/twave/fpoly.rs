use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::exp_m1_m_x_m_x2;

/// The potential `F(g, q)` of the first-order profile equation `g' = sqrt(F)`:
///
/// ```text
/// F(g, q) = g² − 2(2−q)/(2−r) g^{2−r} + (1−q)/(1−r) g^{2−2r} − C(q),
/// C(q)    = r (r − q) / ((1 − r)(2 − r)).
/// ```
///
/// `g = 1` is a double zero for every `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FPoly {
    pub r: f64,
    pub q: f64,
    pub c: f64,
}

/// Below this `|ln g|`, [`FPoly::value_at_gap`] switches to the cancellation-free series.
pub(crate) const LOG_BRANCH: f64 = 0.25;

impl FPoly {
    pub fn new(r: f64, q: f64) -> Self {
        assert!(r > 0.0 && r < 1.0, "r = {r} outside (0, 1)");
        Self {
            r,
            q,
            c: r * (r - q) / ((1.0 - r) * (2.0 - r)),
        }
    }

    fn coefficients(&self) -> [(f64, f64); 3] {
        let r = self.r;
        let q = self.q;
        [
            (1.0, 2.0),
            (-2.0 * (2.0 - q) / (2.0 - r), 2.0 - r),
            ((1.0 - q) / (1.0 - r), 2.0 - 2.0 * r),
        ]
    }

    /// `F(g, q)`; requires `g > 0`.
    pub fn eval(&self, g: f64) -> Result<f64> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::Domain(format!("F(g, q) needs g > 0, got g = {g}")));
        }
        Ok(self.value(g))
    }

    /// `F(g, q)` without the domain check. Close to `g = 1` the value is
    /// assembled from `rq·u² + O(u³)` with `u = −ln g`, avoiding the
    /// catastrophic cancellation of the raw power sum.
    pub fn value(&self, g: f64) -> f64 {
        let u = -g.ln();
        if u.abs() < 0.25 {
            self.value_log(u)
        } else {
            self.coefficients()
                .iter()
                .map(|(k, m)| k * g.powf(*m))
                .sum::<f64>()
                - self.c
        }
    }

    /// `F(1 − w, q)` accurate to relative precision even for tiny `w`.
    pub fn value_at_gap(&self, w: f64) -> f64 {
        let u = -(-w).ln_1p();
        if u.abs() < LOG_BRANCH {
            self.value_log(u)
        } else {
            self.value(1.0 - w)
        }
    }

    fn value_log(&self, u: f64) -> f64 {
        // Σ k_i (e^{−m_i u} − 1) with the linear terms cancelling identically
        // and the quadratic ones summing to r q u².
        let tail: f64 = self
            .coefficients()
            .iter()
            .map(|(k, m)| k * exp_m1_m_x_m_x2(-m * u))
            .sum();
        self.r * self.q * u * u + tail
    }

    /// `∂F/∂g = 2 g^{1−2r} (g^r − 1)(g^r − (1 − q))`.
    pub fn derivative(&self, g: f64) -> f64 {
        let gr = g.powf(self.r);
        2.0 * g.powf(1.0 - 2.0 * self.r) * (gr - 1.0) * (gr - (1.0 - self.q))
    }

    /// `F(g0 + δ) − F(g0)` evaluated term by term as `g0^m · expm1(m ln(1 + δ/g0))`.
    pub fn increment(&self, g0: f64, delta: f64) -> f64 {
        let l = (delta / g0).ln_1p();
        self.coefficients()
            .iter()
            .map(|(k, m)| k * g0.powf(*m) * (m * l).exp_m1())
            .sum()
    }

    /// Relative condition number of [`FPoly::increment`] for small steps from
    /// `g0`: `Σ |k m g0^{m−1}| / |F'(g0)|`.
    pub(crate) fn increment_condition(&self, g0: f64) -> f64 {
        let scale: f64 = self
            .coefficients()
            .iter()
            .map(|(k, m)| (k * m * g0.powf(m - 1.0)).abs())
            .sum();
        scale / self.derivative(g0).abs()
    }

    /// Relative condition number of [`FPoly::value`] at `g`: `(Σ |k g^m| + |C|) / |F(g)|`.
    pub(crate) fn value_condition(&self, g: f64) -> f64 {
        let scale: f64 = self.coefficients().iter().map(|(k, m)| (k * g.powf(*m)).abs()).sum();
        (scale + self.c.abs()) / self.value(g).abs()
    }

    /// Critical points in `g > 0`: always `g = 1`, plus `g = (1 − q)^{1/r}`
    /// when `0 < q < 1` (for `q = 0` the two coincide).
    pub fn critical_points(&self) -> Vec<f64> {
        let mut out = vec![1.0];
        if self.q > 0.0 && self.q < 1.0 {
            out.insert(0, (1.0 - self.q).powf(1.0 / self.r));
        }
        out
    }
}

/// `F(g, q)` with domain checking.
pub fn eval_f(g: f64, fpoly: &FPoly) -> Result<f64> {
    fpoly.eval(g)
}

/// The self-consistency function obtained by substituting
/// `q(g) = θ − ξ (1 − g^r)` into `(1 − r)(2 − r) F(g, q)`:
///
/// ```text
/// Φ(g) = ρ1 g² − ρ2 g^{2−r} + ρ3 g^{2−2r} + ρ4 g^r − C1.
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfConsistencyPoly {
    pub r: f64,
    pub theta: f64,
    pub xi: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    pub rho4: f64,
    pub c1: f64,
}

impl SelfConsistencyPoly {
    pub fn new(r: f64, theta: f64, xi: f64) -> Self {
        Self {
            r,
            theta,
            xi,
            rho1: (1.0 - r) * (2.0 - r + 2.0 * xi),
            rho2: 2.0 * (1.0 - r) * (2.0 - theta) + (4.0 - 3.0 * r) * xi,
            rho3: (2.0 - r) * (1.0 - theta + xi),
            rho4: r * xi,
            c1: r * (r - theta + xi),
        }
    }

    pub fn eval(&self, g: f64) -> f64 {
        if g == 0.0 {
            return -self.c1;
        }
        let r = self.r;
        self.rho1 * g * g - self.rho2 * g.powf(2.0 - r) + self.rho3 * g.powf(2.0 - 2.0 * r)
            + self.rho4 * g.powf(r)
            - self.c1
    }

    /// `q(g) = θ − ξ (1 − g^r)`.
    pub fn q_of(&self, g: f64) -> f64 {
        self.theta - self.xi * (1.0 - g.powf(self.r))
    }
}
