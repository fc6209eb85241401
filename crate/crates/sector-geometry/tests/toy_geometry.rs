use sector_geometry::{build_admissible, choose_direction, GoodCovering, Sector, Variant, C64};

fn d(x: f64) -> f64 {
    x.to_radians()
}

fn p() -> Vec<C64> {
    vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
}

fn covering() -> GoodCovering {
    GoodCovering::uniform(&[0.0, d(120.0), d(240.0)], d(75.0), 0.125).unwrap()
}

fn borel(h: f64) -> Vec<Sector> {
    [0.0, 120.0, 240.0].iter().map(|&b| Sector::unbounded(d(b), d(h)).unwrap()).collect()
}

fn probes() -> Vec<(C64, C64)> {
    let mut out = Vec::new();
    for ta in [-9.0, 0.0, 9.0] {
        for tr in [0.1, 0.5, 0.95] {
            for ea in (0..72).map(|i| i as f64 * 5.0) {
                for er in [0.01, 0.06, 0.12] {
                    out.push((C64::from_polar(tr, d(ta)), C64::from_polar(er, d(ea))));
                }
            }
        }
    }
    out
}

#[test]
fn toy_configuration_is_admissible() {
    let companion = Sector::from_degrees(0.0, 10.0, Some(1.0)).unwrap();
    let cfg = build_admissible(covering(), companion, borel(55.0), &p(), 1, &probes(), Variant::EpsilonCovering).unwrap();
    for m in &cfg.margins {
        assert!(m.unwrap() >= 0.5, "{m:?}");
    }
    // every probe respects its recorded margin
    for (t, e) in probes() {
        if let Some(i) = cfg.sector_of(t, e) {
            let (g, m) = choose_direction(&cfg.borel_sectors[i], 1, (e * t).arg()).unwrap();
            assert!((g - (e * t).arg()).cos() >= cfg.margins[i].unwrap() - 1e-12);
            assert!(m >= cfg.margins[i].unwrap());
        }
    }
}

#[test]
fn root_inside_wide_sector() {
    let companion = Sector::from_degrees(0.0, 10.0, Some(1.0)).unwrap();
    let err = build_admissible(covering(), companion, borel(65.0), &p(), 1, &probes(), Variant::EpsilonCovering).unwrap_err();
    assert!(err.to_string().contains("60.000"), "{err}");
}

#[test]
fn empty_probe_grid_warns() {
    let companion = Sector::from_degrees(0.0, 10.0, Some(1.0)).unwrap();
    let cfg = build_admissible(covering(), companion, borel(55.0), &p(), 1, &[], Variant::EpsilonCovering).unwrap();
    assert!(cfg.margins.iter().all(Option::is_none));
    assert!(!cfg.warnings.is_empty());
}
