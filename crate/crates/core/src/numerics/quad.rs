//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Options for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 0.0,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss estimate.
/// Returns `(value, error, ∫|f|)`.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut absolute = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (fl, fr) = (f(center - dx), f(center + dx));
        kronrod += WGK[j] * (fl + fr);
        absolute += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fl + fr);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err, absolute * half.abs())
}

/// Error estimates below this multiple of `ε ∫|f|` are round-off.
const ROUNDOFF_FACTOR: f64 = 50.0;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    absolute: f64,
}

/// Globally adaptive quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below `max(abs_tol, rel_tol * |I|)`, or below the round-off
/// floor `50 ε ∫|f|` when that is larger. Panels are summed in
/// left-to-right order so the result does not depend on the refinement
/// history. `a > b` is allowed and flips the sign.
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    let (value, error, absolute) = gk15(&mut f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value,
        error,
        absolute,
    }];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        let total: f64 = panels.iter().map(|p| p.value).sum();
        if !total.is_finite() {
            return Err(Error::QuadratureFailure(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        let floor = ROUNDOFF_FACTOR * f64::EPSILON * panels.iter().map(|p| p.absolute).sum::<f64>();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs()).max(floor);
        if total_err <= target {
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(QuadResult {
                value,
                error: total_err,
                intervals: panels.len(),
            });
        }
        if panels.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "error estimate {total_err:e} above {target:e} after {} panels on [{a}, {b}]",
                panels.len()
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::QuadratureFailure(format!(
                "panel [{}, {}] cannot be split further",
                p.a, p.b
            )));
        }
        let (lv, le, la) = gk15(&mut f, p.a, mid);
        let (rv, re, ra) = gk15(&mut f, mid, p.b);
        panels.push(Panel {
            a: p.a,
            b: mid,
            value: lv,
            error: le,
            absolute: la,
        });
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: rv,
            error: re,
            absolute: ra,
        });
    }
}
