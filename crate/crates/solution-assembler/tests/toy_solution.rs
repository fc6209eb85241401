use problem_model::{cauchy_to_physical, CauchyData, ProblemSpec};
use sector_geometry::Variant;
use solution_assembler::{assemble, evaluate, pde_residual, toy1_admissible, AssemblyError, AssemblyOptions, SectorialSolution, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn build(spec: &ProblemSpec, probes: &[(C64, C64)], n: usize) -> SectorialSolution {
    let config = toy1_admissible(spec, Variant::EpsilonCovering, probes).unwrap();
    assemble(spec, &config, 0, probes, n, &AssemblyOptions::default()).unwrap()
}

#[test]
fn leading_coefficient_is_the_cauchy_datum() {
    let spec = ProblemSpec::toy1();
    let sol = build(&spec, &[(c(0.5), c(0.05))], 8);
    let e = evaluate(&sol, c(0.5), c(0.0), c(0.05)).unwrap();
    assert!((e.value - c(0.025)).norm() < 1e-12, "{}", e.value);
    let phi = cauchy_to_physical(&spec.cauchy, spec.k, c(0.05), c(0.5)).unwrap();
    assert!((e.value - phi[0]).norm() / phi[0].norm() < 1e-8);
    assert!(sol.r1 > 0.0 && sol.r1.is_finite());
}

#[test]
fn cauchy_consistency_off_axis() {
    let spec = ProblemSpec::toy1();
    let (t, eps) = (C64::from_polar(0.4, 0.1), C64::from_polar(0.08, -0.6));
    let sol = build(&spec, &[(t, eps)], 6);
    let e = evaluate(&sol, t, c(0.0), eps).unwrap();
    let phi = cauchy_to_physical(&spec.cauchy, spec.k, eps, t).unwrap();
    assert!((e.value - phi[0]).norm() / phi[0].norm() < 1e-8);
}

#[test]
fn odd_terms_vanish() {
    let spec = ProblemSpec::toy1();
    let sol = build(&spec, &[(c(0.5), c(0.05))], 8);
    let e = evaluate(&sol, c(0.5), c(0.1), c(0.05)).unwrap();
    for (n, term) in e.terms.iter().enumerate() {
        if n % 2 == 1 {
            assert_eq!(*term, c(0.0), "n={n}");
        } else {
            assert!(term.norm() > 0.0, "n={n}");
        }
    }
    let sum: C64 = e.terms.iter().sum();
    assert_eq!(sum, e.value);
    assert!(e.remainder < 1e-6 * e.value.norm());
}

#[test]
fn zero_data_gives_zero() {
    let mut spec = ProblemSpec::toy1();
    spec.cauchy = CauchyData::zero(1);
    let sol = build(&spec, &[(c(0.3), c(0.05))], 6);
    let e = evaluate(&sol, c(0.3), c(0.05), c(0.05)).unwrap();
    assert_eq!(e.value, c(0.0));
    assert_eq!(e.remainder, 0.0);
    let r = pde_residual(&sol, &spec, c(0.3), c(0.05), c(0.05)).unwrap();
    assert_eq!(r.residual, c(0.0));
    assert_eq!(r.relative, 0.0);
}

#[test]
fn domain_errors() {
    let spec = ProblemSpec::toy1();
    let sol = build(&spec, &[(c(0.5), c(0.05))], 4);
    let far = C64::new(2.0 * sol.r1, 0.0);
    assert!(matches!(evaluate(&sol, c(0.5), far, c(0.05)), Err(AssemblyError::Domain(_))));
    // ε outside the first covering sector
    assert!(matches!(evaluate(&sol, c(0.5), c(0.0), c(-0.05)), Err(AssemblyError::Domain(_))));
    // t outside the companion sector
    assert!(matches!(evaluate(&sol, C64::new(0.0, 0.5), c(0.0), c(0.05)), Err(AssemblyError::Domain(_))));
    // q t leaves the unit companion sector
    assert!(matches!(pde_residual(&sol, &spec, c(0.9), c(0.01), c(0.05)), Err(AssemblyError::Domain(_))));
}

#[test]
fn residual_at_interior_point() {
    let spec = ProblemSpec::toy1();
    let p = (c(0.3), c(0.05));
    let sol = build(&spec, &[p], 8);
    let r = pde_residual(&sol, &spec, p.0, c(0.05), p.1).unwrap();
    assert!(r.relative <= 1e-6, "{r:?}");
    assert!(r.commutation <= 1e-5, "{r:?}");
}

#[test]
fn minimal_truncation_residual_is_the_tail() {
    let spec = ProblemSpec::toy1();
    let (t, z, eps) = (c(0.3), c(0.2), c(0.1));
    let coarse = pde_residual(&build(&spec, &[(t, eps)], 1), &spec, t, z, eps).unwrap();
    let fine = pde_residual(&build(&spec, &[(t, eps)], 2), &spec, t, z, eps).unwrap();
    assert!(fine.relative < 1e-3 * coarse.relative, "{coarse:?} {fine:?}");
    assert!(coarse.remainder >= 0.9 * coarse.relative, "{coarse:?}");
}

#[test]
fn direction_independence() {
    let spec = ProblemSpec::toy1();
    let (t, eps) = (c(0.4), c(0.06));
    let sol = build(&spec, &[(t, eps)], 6);
    let a = sol.coefficients_along(t, eps, 0.0).unwrap();
    let b = sol.coefficients_along(t, eps, 0.5).unwrap();
    let z = c(0.1);
    let (va, vb) = (sol.sum_series(&a, z).value, sol.sum_series(&b, z).value);
    assert!((va - vb).norm() / va.norm() <= 1e-8, "{va} {vb}");
}

#[test]
fn csv_dump_has_one_row_per_probe_and_z() {
    let spec = ProblemSpec::toy1();
    let probes = [(c(0.3), c(0.05)), (c(0.5), c(0.05))];
    let sol = build(&spec, &probes, 4);
    let csv = sol.to_csv(&[c(0.0), c(0.1)]);
    assert_eq!(csv.lines().count(), 1 + 4);
    assert!(csv.starts_with("t_re,t_im,z_re,z_im,eps_re,eps_im,u_re,u_im,remainder"));
}

#[test]
fn t_covering_variant() {
    let spec = ProblemSpec::toy1();
    let t = C64::from_polar(0.3, 2.0);
    let eps = C64::from_polar(0.05, 0.1);
    let config = toy1_admissible(&spec, Variant::TCovering, &[(t, eps)]).unwrap();
    let sol = assemble(&spec, &config, 1, &[(t, eps)], 6, &AssemblyOptions::default()).unwrap();
    let e = evaluate(&sol, t, c(0.0), eps).unwrap();
    assert!((e.value - eps * t).norm() / (eps * t).norm() < 1e-8);
    let r = pde_residual(&sol, &spec, t, c(0.05), eps).unwrap();
    assert!(r.relative <= 1e-6, "{r:?}");
    // t in another covering sector
    assert!(matches!(evaluate(&sol, c(0.3), c(0.0), eps), Err(AssemblyError::Domain(_))));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn value_at_zero_matches_cauchy_data(rt in 0.1f64..0.8, at in -0.15f64..0.15, re in 0.01f64..0.12, ae in -1.2f64..1.2) {
            let spec = ProblemSpec::toy1();
            let (t, eps) = (C64::from_polar(rt, at), C64::from_polar(re, ae));
            let sol = build(&spec, &[(t, eps)], 2);
            let e = evaluate(&sol, t, c(0.0), eps).unwrap();
            let phi = cauchy_to_physical(&spec.cauchy, spec.k, eps, t).unwrap();
            prop_assert!((e.value - phi[0]).norm() / phi[0].norm() < 1e-8);
        }
    }
}
