//! Tridiagonal and cyclic (periodic) tridiagonal solvers.

use crate::error::{Error, Result};

/// LU factors of a tridiagonal matrix (Thomas algorithm without pivoting).
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    sub: Vec<f64>,
    /// Reciprocal pivots.
    inv_pivot: Vec<f64>,
    /// Normalised super-diagonal `c_i / pivot_i`.
    gam: Vec<f64>,
}

impl Tridiagonal {
    /// Factor the matrix with sub-diagonal `sub[i] = A[i][i-1]` (entry 0 unused),
    /// diagonal `diag` and super-diagonal `sup[i] = A[i][i+1]` (last entry unused).
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self> {
        let n = diag.len();
        assert!(sub.len() == n && sup.len() == n, "tridiagonal band lengths differ");
        let mut inv_pivot = vec![0.0; n];
        let mut gam = vec![0.0; n];
        let mut pivot = diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = diag[i] - sub[i] * gam[i - 1];
            }
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularSystem(format!("zero pivot in row {i}")));
            }
            inv_pivot[i] = 1.0 / pivot;
            gam[i] = sup[i] * inv_pivot[i];
        }
        Ok(Self {
            sub: sub.to_vec(),
            inv_pivot,
            gam,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `x` (holding the right-hand side) with the solution.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.len();
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.gam[i] * x[i + 1];
        }
    }
}

/// Periodic tridiagonal system with corner entries, solved by a rank-one
/// (Sherman–Morrison) correction of an ordinary tridiagonal factorization.
///
/// Row `i` reads `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]` with
/// indices taken modulo `n`.
#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    inner: Tridiagonal,
    /// `v = (1, 0, …, 0, corner_top / gamma)`; only the two nonzero weights are kept.
    v_first: f64,
    v_last: f64,
    /// `z = A'^{-1} u` for the correction vector `u = (gamma, 0, …, 0, corner_bottom)`.
    z: Vec<f64>,
    denom: f64,
}

impl CyclicTridiagonal {
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n < 3 {
            return Err(Error::SingularSystem(format!(
                "cyclic system needs at least 3 rows, got {n}"
            )));
        }
        // A = A' + u vᵀ with u = (γ, 0, …, 0, β), v = (1, 0, …, 0, α/γ).
        let alpha = sup[n - 1]; // A[n-1][0]
        let beta = sub[0]; // A[0][n-1]
        let gamma = -diag[0];
        let mut d = diag.to_vec();
        d[0] -= gamma;
        d[n - 1] -= alpha * beta / gamma;
        let inner = Tridiagonal::factor(sub, &d, sup)?;
        let mut z = vec![0.0; n];
        z[0] = gamma;
        z[n - 1] = alpha;
        inner.solve_in_place(&mut z);
        let v_first = 1.0;
        let v_last = beta / gamma;
        let denom = 1.0 + v_first * z[0] + v_last * z[n - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::SingularSystem(
                "Sherman–Morrison denominator vanished".into(),
            ));
        }
        Ok(Self {
            inner,
            v_first,
            v_last,
            z,
            denom,
        })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.len();
        self.inner.solve_in_place(x);
        let factor = (self.v_first * x[0] + self.v_last * x[n - 1]) / self.denom;
        for (xi, zi) in x.iter_mut().zip(&self.z) {
            *xi -= factor * zi;
        }
    }
}
