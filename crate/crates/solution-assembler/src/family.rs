use std::collections::HashMap;
use std::sync::Mutex;

use borel_solver::CoefficientRay;
use laplace_engine::{laplace_ray, laplace_tail, LaplaceOptions, RayIntegrand};
use numerics_core::{GrowthEnvelope, C64};

use crate::Result;

/// Multiplier applied to `ω_n` before the transform.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    One,
    /// `P(k u^k)` given by its coefficients in `u`.
    Symbol(Vec<C64>),
    /// `(k u^k)^ℓ`.
    KPower(u32),
}

impl Weight {
    fn key(&self) -> u32 {
        match self {
            Weight::One => 0,
            Weight::Symbol(_) => 1,
            Weight::KPower(l) => 2 + l,
        }
    }

    pub fn at(&self, u: C64, k: u32) -> C64 {
        match self {
            Weight::One => C64::new(1.0, 0.0),
            Weight::Symbol(c) => c.iter().rev().fold(C64::new(0.0, 0.0), |acc, x| acc * u + x),
            Weight::KPower(l) => (u.powu(k) * k as f64).powu(*l),
        }
    }
}

/// The coefficients `ω_0, …, ω_N` on one direction for one ε, ready for
/// Laplace transforms.
#[derive(Debug)]
pub struct RayFamily {
    pub eps: C64,
    pub gamma: f64,
    pub r_out: f64,
    pub k: u32,
    pub rays: Vec<CoefficientRay>,
    pub order: usize,
    envelopes: Mutex<HashMap<(usize, u32), GrowthEnvelope>>,
}

struct Integrand<'a> {
    ray: &'a CoefficientRay,
    weight: &'a Weight,
    k: u32,
    order: usize,
    envelope: GrowthEnvelope,
}

impl RayIntegrand for Integrand<'_> {
    fn value(&self, u: C64) -> laplace_engine::Result<C64> {
        Ok(self.weight.at(u, self.k) * self.ray.value(u.norm(), self.order)?)
    }

    fn reach(&self) -> f64 {
        self.ray.max_radius()
    }

    fn envelope(&self) -> Option<GrowthEnvelope> {
        Some(self.envelope)
    }
}

impl RayFamily {
    pub fn new(eps: C64, gamma: f64, r_out: f64, k: u32, rays: Vec<CoefficientRay>, order: usize) -> Self {
        RayFamily { eps, gamma, r_out, k, rays, order, envelopes: Mutex::new(HashMap::new()) }
    }

    pub fn n_max(&self) -> usize {
        self.rays.len() - 1
    }

    pub fn is_zero(&self, n: usize) -> bool {
        self.rays[n].samples.values().iter().all(|v| *v == C64::new(0.0, 0.0))
    }

    fn envelope(&self, n: usize, weight: &Weight) -> Result<GrowthEnvelope> {
        let key = (n, weight.key());
        if let Some(e) = self.envelopes.lock().unwrap().get(&key) {
            return Ok(*e);
        }
        let ray = &self.rays[n].samples;
        let samples: Vec<(f64, f64)> = ray
            .radii()
            .iter()
            .zip(ray.values())
            .map(|(r, v)| (*r, (weight.at(ray.point(*r), self.k) * v).norm()))
            .collect();
        let (env, _) = GrowthEnvelope::fit(&samples, 1.0, 1.0)?;
        self.envelopes.lock().unwrap().insert(key, env);
        Ok(env)
    }

    fn integrand<'a>(&'a self, n: usize, weight: &'a Weight) -> Result<Integrand<'a>> {
        Ok(Integrand { ray: &self.rays[n], weight, k: self.k, order: self.order, envelope: self.envelope(n, weight)? })
    }

    /// `L_k(weight · ω_n)(T)` along this family's direction.
    pub fn laplace(&self, n: usize, weight: &Weight, t: C64, opts: &LaplaceOptions) -> Result<C64> {
        if self.is_zero(n) {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(laplace_ray(&self.integrand(n, weight)?, self.k, self.gamma, t, opts)?)
    }

    /// The part of [`RayFamily::laplace`] beyond radius `start`.
    pub fn laplace_tail(&self, n: usize, weight: &Weight, t: C64, start: f64, opts: &LaplaceOptions) -> Result<C64> {
        if self.is_zero(n) {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(laplace_tail(&self.integrand(n, weight)?, self.k, self.gamma, t, start, opts)?)
    }
}
