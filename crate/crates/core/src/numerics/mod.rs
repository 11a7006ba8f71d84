//! Scalar numerical building blocks: root bracketing, adaptive quadrature,
//! periodic tridiagonal solves, and cancellation-free elementary functions.

pub mod quad;
pub mod roots;
pub mod tridiag;

/// `e^x - 1 - x`, accurate to a few ulps for small `|x|`.
pub fn exp_m1_m_x(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // Σ_{n≥2} xⁿ/n!; 14 terms reach machine precision for |x| < 0.1.
        let mut term = 0.5 * x * x;
        let mut sum = term;
        for n in 3..18 {
            term *= x / n as f64;
            sum += term;
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// `e^x - 1 - x - x²/2`, accurate for small `|x|`.
pub fn exp_m1_m_x_m_x2(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let mut term = x * x * x / 6.0;
        let mut sum = term;
        for n in 4..24 {
            term *= x / n as f64;
            sum += term;
        }
        sum
    } else {
        x.exp_m1() - x - 0.5 * x * x
    }
}

/// `ln(1 - p) + p`, accurate for small `|p|`.
pub fn ln_1m_p_p(p: f64) -> f64 {
    if p.abs() < 0.1 {
        // -Σ_{n≥2} pⁿ/n
        let mut pow = p * p;
        let mut sum = 0.0;
        for n in 2..40 {
            sum -= pow / n as f64;
            pow *= p;
        }
        sum
    } else {
        (-p).ln_1p() + p
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Ordinary least-squares fit `y ≈ a + b x`; returns `(a, b)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    Some((my - b * mx, b))
}
