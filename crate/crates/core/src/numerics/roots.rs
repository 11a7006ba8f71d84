//! Bracketing scalar root finding.

use crate::error::{Error, Result};

/// Stopping criteria for [`brent`].
#[derive(Debug, Clone, Copy)]
pub struct BrentTol {
    /// Absolute width of the final bracket.
    pub xtol: f64,
    /// Residual bound required together with the width target; 0 disables it.
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for BrentTol {
    fn default() -> Self {
        Self {
            xtol: 1e-14,
            ftol: 0.0,
            max_iter: 200,
        }
    }
}

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Combines inverse quadratic interpolation, secant steps and bisection; every
/// iterate stays inside the current bracket, so convergence is guaranteed for
/// any continuous `f`. Iteration stops when the bracket is narrower than
/// `tol.xtol` (plus a few ulps of the root) *and* `|f| <= tol.ftol`, or when
/// `f` vanishes exactly.
pub fn brent<F>(mut f: F, a: f64, b: f64, tol: BrentTol) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!(
            "interval [{a}, {b}] does not bracket a root (f = {fa}, {fb})"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.xtol;
        let xm = 0.5 * (c - b);
        let narrow = xm.abs() <= tol1;
        if fb == 0.0 || (narrow && (tol.ftol <= 0.0 || fb.abs() <= tol.ftol)) {
            return Ok(b);
        }
        // Bracket exhausted in floating point: b is the best available point.
        if xm.abs() <= 2.0 * f64::EPSILON * b.abs().max(f64::MIN_POSITIVE) {
            return Ok(b);
        }
        if narrow {
            // Width target met but the residual is not: plain bisection.
            d = xm;
            e = d;
        } else if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 || narrow { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NoRoot(format!("function not finite at {b}")));
        }
    }
    Err(Error::NoRoot(format!(
        "Brent iteration did not converge in {} steps",
        tol.max_iter
    )))
}

/// Every sign change of `values` on `nodes`, as index pairs `(i, i + 1)`.
/// Exact zeros are reported as degenerate brackets `(i, i)`.
pub fn sign_changes(values: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..values.len() {
        if values[i] == 0.0 {
            out.push((i, i));
        } else if i + 1 < values.len()
            && values[i + 1] != 0.0
            && values[i].signum() != values[i + 1].signum()
        {
            out.push((i, i + 1));
        }
    }
    out
}
