use std::f64::consts::PI;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::specfun::kanter_ln_a;

/// One-sided stable law with `E e^{−μS} = e^{−μ^ν}`, `0 < ν < 1`.
///
/// Kanter's form of the Chambers–Mallows–Stuck construction:
/// `S = (A(U)/E)^{(1−ν)/ν}` with `U` uniform on `(0, π)` and `E ~ Exp(1)`.
#[derive(Debug, Clone, Copy)]
pub struct PositiveStable {
    nu: f64,
}

impl PositiveStable {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::invalid("PositiveStable", "nu outside (0, 1)"));
        }
        Ok(PositiveStable { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl Distribution<f64> for PositiveStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = PI * rng.sample::<f64, _>(Open01);
        let e: f64 = rng.sample(Exp1);
        let q = 1.0 - self.nu;
        ((q / self.nu) * (kanter_ln_a(self.nu, u) - e.ln())).exp()
    }
}

pub fn sample_stable_positive<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> Result<f64> {
    Ok(PositiveStable::new(nu)?.sample(rng))
}
