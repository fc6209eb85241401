//! Seeded battery of the four operational identities on random polynomials
//! of degree ≤ 4, for k ∈ {1, 2, 3}.

use numerics_core::{gamma_real, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{
    check_convolution_identity, check_derivative_identity, check_dilation_identity, check_monomial_identity_with, IdentityOptions,
    Result,
};

/// Worst relative residuals, in the order monomial, derivative, dilation, convolution.
pub const IDENTITY_TOLERANCES: [f64; 4] = [1e-7, 1e-5, 1e-6, 1e-5];
pub const IDENTITY_NAMES: [&str; 4] = ["monomial", "derivative", "dilation", "convolution"];

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityBatteryReport {
    pub draws: usize,
    pub worst: [f64; 4],
    pub pass: [bool; 4],
}

impl IdentityBatteryReport {
    pub fn all_pass(&self) -> bool {
        self.pass.iter().all(|p| *p)
    }
}

fn random_poly(rng: &mut ChaCha8Rng) -> Vec<C64> {
    let deg = rng.gen_range(1..=4);
    let mut c = vec![C64::new(0.0, 0.0)];
    for _ in 0..deg {
        let r: f64 = rng.gen::<f64>().sqrt();
        c.push(C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU)));
    }
    c
}

fn eval(c: &[C64], u: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |a, &x| a * u + x)
}

/// `draws` random polynomials per k. The monomial check compares against
/// `gamma`, so a faulty Γ can be injected.
pub fn identity_battery_with<G: Fn(f64) -> Result<f64> + Copy>(seed: u64, draws: usize, gamma: G) -> Result<IdentityBatteryReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = IdentityOptions::default();
    let mut worst = [0.0f64; 4];
    for k in 1..=3u32 {
        for _ in 0..draws {
            let c = random_poly(&mut rng);
            let t = C64::from_polar(rng.gen_range(0.1..0.4), rng.gen_range(-0.5..0.5));
            let f = |u: C64| eval(&c, u);
            let h = rng.gen_range(1..=4);
            worst[0] = worst[0].max(check_monomial_identity_with(h, k, t, gamma)?);
            worst[1] = worst[1].max(check_derivative_identity(f, k, t, 1e-3 * t.norm(), &opts)?);
            worst[2] = worst[2].max(check_dilation_identity(f, k, 1, 1.2, t, &opts)?);
            let m = rng.gen_range(1..=3);
            worst[3] = worst[3].max(check_convolution_identity(m, f, k, t, &opts)?);
        }
    }
    let pass = std::array::from_fn(|i| worst[i] <= IDENTITY_TOLERANCES[i]);
    Ok(IdentityBatteryReport { draws: 3 * draws, worst, pass })
}

pub fn identity_battery(seed: u64, draws: usize) -> Result<IdentityBatteryReport> {
    identity_battery_with(seed, draws, |x| Ok(gamma_real(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbed_gamma_fails_only_the_monomial_check() {
        let r = identity_battery_with(3, 2, |x| Ok(gamma_real(x)? * (1.0 + 1e-4))).unwrap();
        assert!(!r.pass[0] && r.pass[1..].iter().all(|p| *p), "{r:?}");
    }
}
