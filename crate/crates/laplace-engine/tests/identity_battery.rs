use laplace_engine::{identity_battery, C64, IDENTITY_NAMES};

#[test]
fn random_polynomial_battery() {
    let r = identity_battery(20241019, 20).unwrap();
    for i in 0..4 {
        assert!(r.pass[i], "{} residual {:e}", IDENTITY_NAMES[i], r.worst[i]);
    }
}

#[test]
fn homogeneity_at_three_scales() {
    let t = C64::from_polar(0.25, 0.2);
    for k in 1..=3u32 {
        for h in 1..=3u32 {
            let base = laplace_engine::laplace_ray(&|u: C64| u.powu(h), k, t.arg(), t, &Default::default()).unwrap();
            for lambda in [0.5, 1.5, 3.0] {
                let v = laplace_engine::laplace_ray(&|u: C64| u.powu(h), k, t.arg(), t * lambda, &Default::default()).unwrap();
                let want = base * lambda.powi(h as i32);
                assert!((v - want).norm() <= 1e-10 * want.norm(), "k={k} h={h} λ={lambda}");
            }
        }
    }
}
