//! Passage times `φ_k^ν` of the fractional linear birth process.

use rand::distr::Open01;
use rand::Rng;
use rand_distr::Distribution;

use super::PositiveStable;
use crate::error::{Error, Result};
use crate::laws::phi_cdf;
use crate::specfun::SeriesAccuracy;

/// Smallest accepted grid.
pub const MIN_PHI_GRID: usize = 1 << 10;
/// Grid used by [`sample_phi`] callers that have no preference.
pub const DEFAULT_PHI_GRID: usize = 1 << 14;

const LEFT_MASS: f64 = 1e-12;
const RIGHT_MASS: f64 = 1e-9;
const MONOTONE_SLACK: f64 = 1e-12;

/// Inverse-CDF sampler on a log-spaced grid of `P{φ_k^ν ≤ t}`.
///
/// Between grid points the quantile is interpolated linearly in `ln t`, so
/// the bias is of the order of the squared grid spacing in `ln t`. The two
/// tails outside the grid are extended with their leading power laws,
/// `t^{νk}` on the left and `t^{−ν}` on the right.
#[derive(Debug, Clone)]
pub struct PhiTable {
    k: u32,
    nu: f64,
    ln_t: Vec<f64>,
    cdf: Vec<f64>,
}

impl PhiTable {
    pub fn new(k: u32, nu: f64, lambda_beta: f64, grid: usize) -> Result<Self> {
        let op = "PhiTable";
        if k == 0 {
            return Err(Error::invalid(op, "k must be >= 1"));
        }
        if grid < MIN_PHI_GRID {
            return Err(Error::invalid(op, format!("grid must be >= {MIN_PHI_GRID}")));
        }
        if !(nu > 0.0 && nu <= 1.0) || !(lambda_beta > 0.0) {
            return Err(Error::invalid(op, "need 0 < nu <= 1 and lambda_beta > 0"));
        }
        let acc = SeriesAccuracy::new(1e-10, 1_000_000)?;
        let cdf_at = |ln_t: f64| phi_cdf(k, ln_t.exp(), nu, lambda_beta, acc);

        // bracket [t_lo, t_hi] in factors of 16 around the classical scale
        let centre = ((1.0 + (k as f64).ln()) / lambda_beta).ln() / nu;
        let mut lo = centre;
        while cdf_at(lo)? > LEFT_MASS {
            lo -= std::f64::consts::LN_2 * 4.0;
        }
        let mut hi = centre;
        while 1.0 - cdf_at(hi)? > RIGHT_MASS {
            hi += std::f64::consts::LN_2 * 4.0;
            if hi > 700.0 {
                return Err(Error::TabulationFailure { op, index: grid - 1 });
            }
        }

        let ln_t: Vec<f64> = (0..grid).map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64).collect();
        let mut cdf = Vec::with_capacity(grid);
        for (i, &x) in ln_t.iter().enumerate() {
            let c = cdf_at(x)?;
            let prev = cdf.last().copied().unwrap_or(0.0);
            if !(c >= prev - MONOTONE_SLACK) || c > 1.0 + MONOTONE_SLACK {
                return Err(Error::TabulationFailure { op, index: i });
            }
            cdf.push(c.max(prev).min(1.0));
        }
        Ok(PhiTable { k, nu, ln_t, cdf })
    }

    pub fn grid(&self) -> usize {
        self.ln_t.len()
    }

    /// Quantile at probability `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.cdf.len();
        let (c0, c1) = (self.cdf[0], self.cdf[n - 1]);
        if u <= c0 {
            let p = self.nu * self.k as f64;
            return (self.ln_t[0] + (u / c0).ln() / p).exp();
        }
        if u >= c1 {
            return (self.ln_t[n - 1] + ((1.0 - c1) / (1.0 - u)).ln() / self.nu).exp();
        }
        let j = self.cdf.partition_point(|&c| c < u).clamp(1, n - 1);
        let (a, b) = (self.cdf[j - 1], self.cdf[j]);
        let w = if b > a { (u - a) / (b - a) } else { 0.5 };
        (self.ln_t[j - 1] + w * (self.ln_t[j] - self.ln_t[j - 1])).exp()
    }
}

impl Distribution<f64> for PhiTable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.sample(Open01))
    }
}

/// One draw of `φ_k^ν` from a freshly built table; build a [`PhiTable`] once
/// for repeated draws.
pub fn sample_phi<R: Rng + ?Sized>(k: u32, nu: f64, lambda_beta: f64, rng: &mut R, grid: usize) -> Result<f64> {
    Ok(PhiTable::new(k, nu, lambda_beta, grid)?.sample(rng))
}

/// Exact draw of `φ_k^ν` as `M^{1/ν} S`, where `M` is the maximum of `k`
/// independent Exp(`λβ`) variables (the classical passage time) and `S` is
/// one-sided stable: both sides have Laplace transform
/// `k! Γ(1 + μ^ν/λβ) / Γ(1 + k + μ^ν/λβ)`.
#[derive(Debug, Clone, Copy)]
pub struct PhiExact {
    k: u32,
    nu: f64,
    lambda_beta: f64,
    stable: Option<PositiveStable>,
}

impl PhiExact {
    pub fn new(k: u32, nu: f64, lambda_beta: f64) -> Result<Self> {
        if k == 0 || !(nu > 0.0 && nu <= 1.0) || !(lambda_beta > 0.0) {
            return Err(Error::invalid("PhiExact", "need k >= 1, 0 < nu <= 1, lambda_beta > 0"));
        }
        let stable = if nu < 1.0 { Some(PositiveStable::new(nu)?) } else { None };
        Ok(PhiExact {
            k,
            nu,
            lambda_beta,
            stable,
        })
    }
}

impl Distribution<f64> for PhiExact {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v: f64 = rng.sample(Open01);
        // max of k exponentials by inversion of (1 − e^{−λm})^k
        let m = -(-(v.ln() / self.k as f64).exp()).ln_1p() / self.lambda_beta;
        match self.stable {
            None => m,
            Some(s) => m.powf(1.0 / self.nu) * s.sample(rng),
        }
    }
}
