use num_complex::Complex64;
use proptest::prelude::*;

use nonexp::analysis::{fit_exponential, fit_power_law, ols};
use nonexp::io::{read_density, write_density};
use nonexp::model::{regular_boundary, InitialState, WBPotential};
use nonexp::spectral::{jost_modulus_sq, SpectralDensity};
use nonexp::specfun::{riccati_pair_with_derivatives, BesselOrder};
use nonexp::survival::{
    linear_grid, survival_exact, AsymptoticModel, Method, SeriesMeta, SurvivalSeries,
};

fn synthetic(times: Vec<f64>, p: impl Fn(f64) -> f64) -> SurvivalSeries {
    SurvivalSeries {
        values: times.iter().map(|&t| p(t)).collect(),
        times,
        method: Method::ExactQuadrature,
        meta: SeriesMeta::default(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_law_fit_is_exact(mu in 0.5f64..8.0, m in 1e-3f64..1e3, lo in 10.0f64..500.0, span in 1.5f64..4.0) {
        let times = linear_grid(lo, lo * span, 40);
        let hi = *times.last().unwrap();
        let s = synthetic(times, |t| m * t.powf(-mu));
        let fit = fit_power_law(&s, lo, hi).unwrap();
        prop_assert!((fit.mu_f - mu).abs() < 1e-9);
        prop_assert!((fit.m / m - 1.0).abs() < 1e-8);
        prop_assert!(fit.rms_residual < 1e-10);
        prop_assert_eq!(fit.n_points, 40);
    }

    #[test]
    fn exponential_fit_is_exact(rate in 1e-3f64..0.5) {
        let s = synthetic(linear_grid(1.0, 50.0, 30), |t| (-rate * t).exp());
        let (r, rms) = fit_exponential(&s, 1.0, 50.0).unwrap();
        prop_assert!((r - rate).abs() < 1e-12);
        prop_assert!(rms < 1e-12);
    }

    #[test]
    fn fit_is_deterministic(seed in proptest::collection::vec(0.5f64..1.5, 20..60)) {
        let times: Vec<f64> = (0..seed.len()).map(|i| 400.0 + 10.0 * i as f64).collect();
        let hi = *times.last().unwrap();
        let s = SurvivalSeries {
            values: seed.iter().zip(&times).map(|(w, t)| w * t.powf(-3.0)).collect(),
            times,
            method: Method::ExactQuadrature,
            meta: SeriesMeta::default(),
        };
        let a = fit_power_law(&s, 400.0, hi).unwrap();
        let b = fit_power_law(&s.clone(), 400.0, hi).unwrap();
        prop_assert_eq!(a.mu_f.to_bits(), b.mu_f.to_bits());
        prop_assert_eq!(a.m.to_bits(), b.m.to_bits());
    }

    #[test]
    fn ols_recovers_lines(a in -5.0f64..5.0, b in -3.0f64..3.0) {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * 0.7).collect();
        let ys: Vec<f64> = xs.iter().map(|x| a + b * x).collect();
        let (fa, fb, rms) = ols(&xs, &ys);
        prop_assert!((fa - a).abs() < 1e-12 && (fb - b).abs() < 1e-12 && rms < 1e-12);
    }

    #[test]
    fn jost_modulus_real_positive(beta in -0.45f64..1.2, k in 0.01f64..3.4) {
        let pot = WBPotential::standard(beta).unwrap();
        let p = jost_modulus_sq(&pot, Complex64::from(k)).unwrap();
        prop_assert!(p.re > 0.0 && p.im.abs() < 1e-10 * p.re);
    }

    #[test]
    fn boundary_even_in_k(beta in -0.45f64..1.2, k in 0.01f64..5.0) {
        let pot = WBPotential::standard(beta).unwrap();
        let p = regular_boundary(&pot, Complex64::from(k));
        let m = regular_boundary(&pot, Complex64::from(-k));
        prop_assert_eq!(p.phi, m.phi);
        prop_assert_eq!(p.dphi, m.dphi);
    }

    #[test]
    fn wronskian_is_one(beta in -0.45f64..1.5, x in 0.1f64..25.0) {
        let v = riccati_pair_with_derivatives(BesselOrder::new(beta).unwrap(), Complex64::from(x)).unwrap();
        prop_assert!((v.wronskian() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn density_csv_round_trips(rows in proptest::collection::vec((any::<f64>(), any::<f64>()), 0..50)) {
        let rows: Vec<(f64, f64)> = rows.into_iter().filter(|(a, b)| a.is_finite() && b.is_finite()).collect();
        let mut buf = Vec::new();
        write_density(&mut buf, &rows).unwrap();
        let back = read_density(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (x, y) in rows.iter().zip(&back) {
            prop_assert_eq!(x.0.to_bits(), y.0.to_bits());
            prop_assert_eq!(x.1.to_bits(), y.1.to_bits());
        }
    }

    #[test]
    fn model_json_round_trips(pairs in proptest::collection::vec((-1e6f64..1e6, 0.5f64..6.0), 1..6)) {
        let m = AsymptoticModel { coeffs: pairs, origin: nonexp::survival::ModelOrigin::Series };
        prop_assert_eq!(AsymptoticModel::from_json(&m.to_json()).unwrap(), m);
    }
}

proptest! {
    // Each case builds a quadrature band, so keep the count small.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn survival_is_a_probability(beta in -0.4f64..1.0, t in 0.0f64..1500.0) {
        let pot = WBPotential::standard(beta).unwrap();
        let d = SpectralDensity::new(pot, InitialState::ground(&pot)).unwrap();
        let p = survival_exact(&d, &[t]).unwrap().values[0];
        prop_assert!(p >= 0.0 && p <= 1.0 + 1e-12, "P({t}) = {p}");
    }
}
