use asymptotics_lab::*;
use numerics_core::ln_gamma;
use proptest::prelude::*;
use sector_geometry::Sector;

#[test]
fn classifier_battery_is_all_correct() {
    let report = run_classifier_battery(&ClassifyOptions::default(), 0.05, 0.1);
    for e in &report.entries {
        println!("{:<40} {:?} -> {:?} {}", e.label, e.truth, e.verdict, if e.correct { "ok" } else { "WRONG" });
    }
    assert_eq!(report.correct, 20, "{report:#?}");
}

#[test]
fn q_relative_norm_never_exceeds_sup_norm() {
    for (i, f) in norm_fixtures(0x0a11, 50).iter().enumerate() {
        let c = compare_norms(f).unwrap();
        assert!(c.holds(), "fixture {i}: {c:?}");
    }
}

#[test]
fn norm_axioms_on_fixtures() {
    let fx = norm_fixtures(0xbead, 20);
    for pair in fx.windows(2) {
        let (f, g) = (&pair[0], &pair[1]);
        let norm = &f.norm;
        let n_terms = norm.n_norm;
        let eval = |s: &PolynomialSeries, n: usize, x: C64| if n < s.coeffs.len() { s.eval(n, x) } else { C64::new(0.0, 0.0) };
        for variant in [NormVariant::Sup, NormVariant::QRelative] {
            let spec = NormSpec { variant, ..norm.clone() };
            let nf = series_norm(&spec, |n, x| Ok(eval(&f.series, n, x))).unwrap().value;
            let ng = series_norm(&spec, |n, x| Ok(eval(&g.series, n, x))).unwrap().value;
            let nsum = series_norm(&spec, |n, x| Ok(eval(&f.series, n, x) + eval(&g.series, n, x))).unwrap().value;
            assert!(nsum <= (nf + ng) * (1.0 + 1e-12), "triangle: {nsum} > {nf} + {ng}");
            let lambda = C64::new(-1.5, 2.0);
            let nscaled = series_norm(&spec, |n, x| Ok(lambda * eval(&f.series, n, x))).unwrap().value;
            assert!((nscaled - lambda.norm() * nf).abs() <= 1e-12 * nscaled.max(1e-300), "homogeneity");
            assert!(n_terms + 1 == series_norm(&spec, |n, x| Ok(eval(&f.series, n, x))).unwrap().sups.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classifier_is_scale_invariant(idx in 0usize..20, ln_c in -20.0f64..20.0) {
        let opts = ClassifyOptions::default();
        let seq = &classifier_battery()[idx];
        let scaled: Vec<f64> = seq.magnitudes.iter().map(|a| a * ln_c.exp()).collect();
        let a = classify_growth(&seq.magnitudes, None, None, &opts).unwrap();
        let b = classify_growth(&scaled, None, None, &opts).unwrap();
        let kind = |v: &Verdict| std::mem::discriminant(v);
        prop_assert_eq!(kind(&a.verdict), kind(&b.verdict));
        prop_assert!((a.s - b.s).abs() < 1e-6, "{} vs {}", a.s, b.s);
    }
}

/// `Θ(ε) = 2·e^{−3/|ε|²}` with no z-dependence: the norm is `2e^{−3/|ε|²}`
/// exactly, so the k = 2 fit recovers `A = 2`, `B = 3`.
#[test]
fn synthetic_cocycle_fit_recovers_constants() {
    let base = Sector::new(0.0, 0.4, Some(1.0)).unwrap();
    let norm = NormSpec::new(NormVariant::QRelative, BaseVariable::T, base, 1.5, 1.0, 4).unwrap();
    let probes: Vec<C64> = (0..9).map(|i| C64::from_polar(0.3 + 0.05 * i as f64, 0.2)).collect();
    let samples = cocycle_from(&probes, &norm, |n, probe, _| {
        Ok(if n == 0 { C64::new(2.0 * (-3.0 / probe.norm_sqr()).exp(), 0.0) } else { C64::new(0.0, 0.0) })
    })
    .unwrap();
    for (s, p) in samples.iter().zip(&probes) {
        let exact = 2.0 * (-3.0 / p.norm_sqr()).exp();
        assert!((s.norm / exact - 1.0).abs() < 1e-12);
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.magnitude, s.norm)).collect();
    let fit = fit_exponential_flatness(&pts, 2.0).unwrap();
    assert!(fit.pass && fit.flat, "{fit:?}");
    assert!((fit.b.unwrap() - 3.0).abs() < 1e-6 && (fit.a - 2.0).abs() < 1e-5, "{fit:?}");
    assert!(fit.r2.unwrap() > 0.999_999);
    let free = fit_exponential_flatness_free_k(&pts, 0.3, 6.0).unwrap();
    assert!((free.model_k() - 2.0).abs() < 0.02, "{free:?}");
}

trait ModelK {
    fn model_k(&self) -> f64;
}

impl ModelK for FlatnessFit {
    fn model_k(&self) -> f64 {
        match self.model {
            FlatnessModel::ExpFlat { k } => k,
            FlatnessModel::Mixed { k, .. } => k as f64,
        }
    }
}

#[test]
fn flatness_fit_is_exact_for_each_order() {
    for k in [1.0, 2.0, 3.0] {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| 0.3 + 0.04 * i as f64).map(|x| (x, 0.7 * (-1.3 / x.powf(k)).exp())).collect();
        let fit = fit_exponential_flatness(&pts, k).unwrap();
        assert!((fit.b.unwrap() - 1.3).abs() < 1e-8 && (fit.a - 0.7).abs() < 1e-8, "k = {k}: {fit:?}");
    }
}

#[test]
fn mixed_bound_recovers_its_own_envelope() {
    let (a, b, k, q) = (0.5f64, 2.0f64, 1u32, 1.3f64);
    let samples: Vec<(u32, f64, f64)> = (1..=5u32)
        .flat_map(|n| {
            [0.05, 0.1, 0.15, 0.2].map(move |x: f64| {
                let nf = n as f64;
                (n, x, a * b.powf(nf) * ln_gamma(nf / k as f64).unwrap().exp() * q.powf(nf * nf / 2.0) * x.powf(nf))
            })
        })
        .collect();
    let fit = check_mixed_bound(&samples, k, q).unwrap();
    assert!(fit.pass, "{fit:?}");
    assert!((fit.a / a - 1.0).abs() < 1e-6 && (fit.b.unwrap() / b - 1.0).abs() < 1e-6, "{fit:?}");
    let mut broken = samples.clone();
    broken.push((6, 0.2, 1e6 * a * b.powi(6) * 120.0 * q.powf(18.0) * 0.2f64.powi(6)));
    assert!(check_mixed_bound(&broken, k, q).unwrap().slack.unwrap().max > 0.0);
}
