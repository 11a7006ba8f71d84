use proptest::prelude::*;

use gdp_core::numerics::tridiag::CyclicTridiagonal;
use gdp_core::pdesim::{helmholtz_solve, Grid, Rhs};
use gdp_core::twave::{soliton_profile, FPoly, ProfileOptions};
use gdp_core::{classify_wave, Regime, StructuralParams};

fn params() -> impl Strategy<Value = StructuralParams> {
    (0.0..2.5f64, 0.0..3.0f64, 0.0..2.0f64, 0.2..4.0f64, 0.2..4.0f64, 0.2..4.0f64)
        .prop_filter("alpha + gamma > 0", |t| t.0 + t.1 > 0.05)
        .prop_map(|(a, g, c0, c1, c2, c3)| StructuralParams::new(a, g, c0, c1, c2, c3, 0.1).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn smooth_solitons_satisfy_their_defining_relations(p in params(), a in 0.01..4.0f64) {
        let c = classify_wave(&p, a).unwrap();
        match c.regime {
            Regime::SmoothSoliton => {
                let w = c.wave.unwrap();
                let r = p.derived().r;
                prop_assert!(w.g_star > 0.0 && w.g_star < 1.0);
                prop_assert!(w.q > 0.0 && w.q < 1.0);
                prop_assert!(FPoly::new(r, w.q).value(w.g_star).abs() < 1e-9);
                let denom = p.gamma() + p.alpha().powi(2) * w.velocity;
                prop_assert!((w.p - p.c3() * a / denom).abs() < 1e-9 * w.p.max(1.0));
                prop_assert!((w.g_star.powf(r) - (1.0 - w.p)).abs() < 1e-9);
            }
            Regime::NoWave => prop_assert!(c.wave.is_none()),
            _ => prop_assert!(c.wave.is_some()),
        }
    }

    #[test]
    fn classification_is_deterministic(p in params(), a in 0.01..4.0f64) {
        prop_assert_eq!(classify_wave(&p, a).unwrap(), classify_wave(&p, a).unwrap());
    }

    #[test]
    fn f_decreases_to_its_double_root_at_one(r in 0.05..0.95f64, q in 0.01..0.99f64) {
        // g1 = (1 - q)^{1/r} is a local maximum and g = 1 a double root with
        // F''(1) = 2rq > 0, so F is positive and decreasing on (g1, 1).
        let f = FPoly::new(r, q);
        let g1 = (1.0 - q).powf(1.0 / r);
        let mut prev = f.value(g1);
        for k in 1..20 {
            let g = g1 + (1.0 - g1) * k as f64 / 20.0;
            let v = f.value(g);
            prop_assert!(v > 0.0 && v < prev, "F({g}) = {v}");
            prev = v;
        }
    }

    #[test]
    fn cyclic_tridiagonal_residual_is_small(
        n in 3usize..64,
        seed in proptest::collection::vec(-1.0..1.0f64, 256),
    ) {
        let sub: Vec<f64> = (0..n).map(|i| seed[i]).collect();
        let sup: Vec<f64> = (0..n).map(|i| seed[64 + i]).collect();
        let diag: Vec<f64> = (0..n).map(|i| 2.5 + seed[128 + i]).collect();
        let rhs: Vec<f64> = (0..n).map(|i| seed[192 + i]).collect();
        let m = CyclicTridiagonal::factor(&sub, &diag, &sup).unwrap();
        let mut x = rhs.clone();
        m.solve_in_place(&mut x);
        for i in 0..n {
            let lhs = sub[i] * x[(i + n - 1) % n] + diag[i] * x[i] + sup[i] * x[(i + 1) % n];
            prop_assert!((lhs - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn helmholtz_preserves_the_mean(alpha in 0.0..3.0f64, vals in proptest::collection::vec(-1.0..1.0f64, 32)) {
        let g = Grid::new(5.0, 32).unwrap();
        let y = helmholtz_solve(&vals, alpha, 0.2, &g).unwrap();
        let (sy, sv): (f64, f64) = (y.iter().sum(), vals.iter().sum());
        prop_assert!((sy - sv).abs() < 1e-12);
    }

    #[test]
    fn semi_discrete_rhs_conserves_mass(p in params(), vals in proptest::collection::vec(-1.0..1.0f64, 64)) {
        let g = Grid::new(8.0, 64).unwrap();
        let mut rhs = Rhs::new(&p, &g).unwrap();
        let mut out = vec![0.0; 64];
        rhs.eval(&vals, &mut out);
        let scale: f64 = out.iter().map(|v: &f64| v.abs()).sum::<f64>().max(1.0);
        prop_assert!(out.iter().sum::<f64>().abs() < 1e-12 * scale);
    }

    #[test]
    fn wrap_lands_in_the_half_open_period(x in -100.0..100.0f64, c in -50.0..50.0f64) {
        let g = Grid::new(7.5, 16).unwrap();
        let d = g.wrap(x, c);
        prop_assert!((-3.75..3.75).contains(&d));
        let k = ((x - c - d) / 7.5).round();
        prop_assert!((x - c - d - 7.5 * k).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn soliton_profiles_are_even_monotone_and_normalised(p in params(), a in 0.05..2.0f64) {
        let c = classify_wave(&p, a).unwrap();
        prop_assume!(c.regime == Regime::SmoothSoliton);
        let wave = c.wave.unwrap();
        prop_assume!(wave.q > 0.02);
        let opts = ProfileOptions { nodes: 801, ..ProfileOptions::default() };
        let prof = soliton_profile(&p, &wave, &opts).unwrap();
        let n = prof.eta.len();
        let mid = prof.center();
        prop_assert_eq!(prof.omega[mid], 1.0);
        for k in 0..n {
            prop_assert_eq!(prof.omega[k], prof.omega[n - 1 - k]);
            prop_assert_eq!(prof.eta[k], -prof.eta[n - 1 - k]);
        }
        for k in mid..n - 1 {
            prop_assert!(prof.omega[k + 1] <= prof.omega[k]);
        }
        prop_assert!(prof.omega[n - 1] < 1e-6);
    }
}
