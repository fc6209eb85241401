use asymptotics_lab::*;
use problem_model::ProblemSpec;
use sector_geometry::{AdmissibleConfig, Variant};
use solution_assembler::{assemble, toy1_admissible, AssemblyOptions, SectorialSolution};

fn setup(variant: Variant, n_max: usize) -> (ProblemSpec, AdmissibleConfig, Vec<SectorialSolution>) {
    let spec = ProblemSpec::toy1();
    let cfg = toy1_admissible(&spec, variant, &[]).unwrap();
    let opts = AssemblyOptions::default();
    let sols = (0..cfg.covering.sectors.len()).map(|p| assemble(&spec, &cfg, p, &[], n_max, &opts).unwrap()).collect();
    (spec, cfg, sols)
}

fn model_k(fit: &FlatnessFit) -> f64 {
    match fit.model {
        FlatnessModel::ExpFlat { k } => k,
        FlatnessModel::Mixed { k, .. } => k as f64,
    }
}

#[test]
fn cocycles_are_exponentially_flat() {
    let (spec, cfg, sols) = setup(Variant::EpsilonCovering, 8);
    for p in 0..3 {
        let (a, b) = (&sols[p], &sols[(p + 1) % 3]);
        let (dir, _) = overlap_ray(&cfg.covering.sectors[p], &cfg.covering.sectors[(p + 1) % 3]).unwrap();
        let probes: Vec<C64> = (0..9).map(|i| C64::from_polar(0.02 + 0.01 * i as f64, dir)).collect();
        let norm = NormSpec::new(NormVariant::QRelative, BaseVariable::T, cfg.companion, spec.q, a.r1, 8).unwrap();
        let samples = cocycle(a, b, &probes, &norm).unwrap();
        assert!(samples.windows(2).all(|w| w[1].norm > w[0].norm && w[0].norm > 0.0), "pair {p} not increasing");
        assert!(samples.iter().all(|s| s.arc_margin.unwrap() > 0.0 && s.tail < 1e-6 * s.norm));
        let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.magnitude, s.norm)).collect();
        let fit = fit_exponential_flatness(&pts, 1.0).unwrap();
        assert!(fit.pass && fit.flat && fit.b.unwrap() > 0.0 && fit.r2.unwrap() >= 0.99, "pair {p}: {fit:?}");
        let free = fit_exponential_flatness_free_k(&pts, 0.1, 6.0).unwrap();
        assert!((model_k(&free) - 1.0).abs() <= 0.15, "pair {p}: {free:?}");
    }
}

#[test]
fn cocycle_of_a_solution_with_itself_vanishes() {
    let (spec, cfg, sols) = setup(Variant::EpsilonCovering, 4);
    let probe = C64::from_polar(0.05, cfg.covering.sectors[0].bisector);
    let norm = NormSpec::new(NormVariant::Sup, BaseVariable::T, cfg.companion, spec.q, sols[0].r1, 4).unwrap();
    let s = cocycle(&sols[0], &sols[0], &[probe], &norm).unwrap();
    assert_eq!(s[0].norm, 0.0);
}

#[test]
fn cocycle_rejects_bad_inputs() {
    let (spec, cfg, sols) = setup(Variant::EpsilonCovering, 4);
    let norm = NormSpec::new(NormVariant::QRelative, BaseVariable::T, cfg.companion, spec.q, sols[0].r1, 4).unwrap();
    // 0 and 1 overlap around 60°, not on the bisector of 0
    let outside = C64::from_polar(0.05, cfg.covering.sectors[0].bisector - 0.5);
    assert!(matches!(cocycle(&sols[0], &sols[1], &[outside], &norm), Err(LabError::Domain(_))));
    let wrong_base = NormSpec { base_variable: BaseVariable::Epsilon, ..norm.clone() };
    let inside = C64::from_polar(0.05, 60f64.to_radians());
    assert!(matches!(cocycle(&sols[0], &sols[1], &[inside], &wrong_base), Err(LabError::Domain(_))));
    let too_long = NormSpec { n_norm: 5, ..norm };
    assert!(matches!(cocycle(&sols[0], &sols[1], &[inside], &too_long), Err(LabError::Domain(_))));
}

fn rs(variant: Variant, nv: NormVariant, mode: RsMode) -> RsReport {
    let (spec, cfg, sols) = setup(variant, 8);
    let sol = &sols[0];
    let expansion = FormalExpansion::new(&spec, 8, 4, variant).unwrap();
    let base_variable = if variant == Variant::EpsilonCovering { BaseVariable::T } else { BaseVariable::Epsilon };
    let own = cfg.covering.sectors[0];
    let probes: Vec<C64> = (0..5).map(|i| C64::from_polar(own.radius.unwrap() * (0.15 + 0.15 * i as f64), own.bisector + 0.3)).collect();
    let norm = NormSpec::new(nv, base_variable, cfg.companion, spec.q, sol.r1, 8).unwrap();
    let samples = remainder_samples(sol, &expansion, &norm, &[0, 1, 2, 3, 4], &probes).unwrap();
    rs_error_bound_check(&samples, mode, spec.k, spec.q).unwrap()
}

#[test]
fn remainder_bounds_hold_for_the_toy() {
    for variant in [Variant::EpsilonCovering, Variant::TCovering] {
        let g = rs(variant, NormVariant::QRelative, RsMode::Gevrey);
        assert!(g.pass && g.c.unwrap().is_finite() && g.m.unwrap().is_finite(), "{variant:?}: {g:?}");
        let m = rs(variant, NormVariant::Sup, RsMode::Mixed);
        assert!(m.pass && m.c.unwrap().is_finite() && m.m.unwrap().is_finite(), "{variant:?}: {m:?}");
        assert_eq!(g.orders, vec![0, 1, 2, 3, 4]);
    }
}

#[test]
fn remainder_samples_check_consistency() {
    let (spec, cfg, sols) = setup(Variant::EpsilonCovering, 4);
    let e = FormalExpansion::new(&spec, 4, 2, Variant::EpsilonCovering).unwrap();
    let norm = NormSpec::new(NormVariant::Sup, BaseVariable::T, cfg.companion, spec.q, sols[0].r1, 4).unwrap();
    let probe = [C64::from_polar(0.05, 0.1)];
    assert!(matches!(remainder_samples(&sols[0], &e, &norm, &[3], &probe), Err(LabError::Domain(_))));
    let t_exp = FormalExpansion::new(&spec, 4, 2, Variant::TCovering).unwrap();
    assert!(matches!(remainder_samples(&sols[0], &t_exp, &norm, &[1], &probe), Err(LabError::Domain(_))));
}

#[test]
fn heine_coefficients_read_as_gevrey_one() {
    let (spec, cfg, sols) = setup(Variant::EpsilonCovering, 2);
    let t = C64::from_polar(0.9 * cfg.companion.radius.unwrap(), cfg.companion.bisector);
    let a = heine_coefficients(&sols, 2, t, 60, &HeineOptions::default()).unwrap();
    // the z² coefficient depends on (εt)³ only; its formal ε-coefficients are
    // (q/2)(−1)^{j+1} Γ(3j) t^{3j} for m = 3j, up to the geometric part the
    // truncated rays add
    for m in [45usize, 51, 57, 60] {
        let exact = 0.5 * spec.q * numerics_core::ln_gamma(m as f64).unwrap().exp() * t.norm().powi(m as i32);
        assert!((a[m].norm() / exact - 1.0).abs() < 1e-2, "m = {m}: {} vs {exact}", a[m].norm());
    }
    let mags = growth_magnitudes(&a, 20, 1e-8);
    let c = classify_growth(&mags, Some(spec.q), Some(spec.k), &ClassifyOptions::default()).unwrap();
    let Verdict::Gevrey { s } = c.verdict else { panic!("{c:?}") };
    assert!((s - 1.0).abs() < 0.05, "{c:?}");
    assert_eq!(c.expected_s, Some(1.0));
}
