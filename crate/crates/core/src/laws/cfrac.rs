//! Random continued fractions `[X_1; X_2, …, X_n]` of i.i.d. standard Cauchy
//! variables, and their Poisson-randomized depth.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{fibonacci_ratio, poisson_pmf, SeriesAccuracy, GOLDEN_RATIO};

/// Cauchy scale `F_{n+1} / F_n` of a depth-`n` fraction.
pub fn cfrac_scale(n: u64) -> Result<f64> {
    fibonacci_ratio(n)
}

/// The same scale written as `φ + √5 Σ_{j ≥ 1} ρ^{nj}`, `ρ = (1 − φ)/φ`.
pub fn cfrac_scale_product_form(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("cfrac_scale_product_form", "n must be >= 1"));
    }
    let rho = (1.0 - GOLDEN_RATIO) / GOLDEN_RATIO;
    let q = rho.powi(n.min(i32::MAX as u64) as i32);
    Ok(GOLDEN_RATIO + 5f64.sqrt() * q / (1.0 - q))
}

// depth 0 is read as a single standard Cauchy variable
fn depth_scale(n: u64) -> f64 {
    if n == 0 {
        1.0
    } else {
        fibonacci_ratio(n).expect("n >= 1")
    }
}

/// Sums `Σ_n f(b_n) P{N(t) = n}` over the Poisson bulk.
fn poisson_mix<F>(op: &'static str, mean: f64, acc: &SeriesAccuracy, f: F) -> Result<f64>
where
    F: Fn(u64, f64) -> f64,
{
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::invalid(op, "lambda * t must be finite and >= 0"));
    }
    let lo = (mean - 40.0 * mean.sqrt() - 40.0).max(0.0).floor() as u64;
    let hi = (mean + 40.0 * mean.sqrt() + 60.0).ceil() as u64;
    if hi - lo > acc.max_terms as u64 {
        return Err(Error::NonConvergence { op, terms: acc.max_terms });
    }
    let mut s = 0.0;
    for n in lo..=hi {
        let w = poisson_pmf(n, mean);
        if w > 0.0 {
            s += w * f(n, depth_scale(n));
        }
    }
    Ok(s)
}

/// Density of `[X_1; …, X_{N(t)}]`, a Poisson mixture of centred Cauchy
/// laws with scales `F_{n+1}/F_n`.
pub fn cfrac_mixture_density(x: f64, t: f64, lambda: f64, acc: SeriesAccuracy) -> Result<f64> {
    poisson_mix("cfrac_mixture_density", lambda * t, &acc, |_, b| b / (PI * (x * x + b * b)))
}

/// Characteristic function `Σ_n e^{−|β| F_{n+1}/F_n} P{N(t) = n}`.
pub fn cfrac_charfn(beta: f64, t: f64, lambda: f64, acc: SeriesAccuracy) -> Result<f64> {
    poisson_mix("cfrac_charfn", lambda * t, &acc, |_, b| (-beta.abs() * b).exp())
}

/// Characteristic function through the infinite-product factorization
/// `e^{−|β|φ} Π_j e^{−|β| √5 ρ^{nj}}`.
pub fn cfrac_charfn_product_form(beta: f64, t: f64, lambda: f64, acc: SeriesAccuracy) -> Result<f64> {
    let rho = (1.0 - GOLDEN_RATIO) / GOLDEN_RATIO;
    let sqrt5 = 5f64.sqrt();
    let a = beta.abs();
    poisson_mix("cfrac_charfn", lambda * t, &acc, |n, b| {
        if n == 0 {
            return (-a * b).exp();
        }
        let q = rho.powi(n.min(i32::MAX as u64) as i32);
        let mut log_prod = 0.0;
        let mut qj = q;
        while qj.abs() > 1e-18 {
            log_prod -= a * sqrt5 * qj;
            qj *= q;
        }
        (-a * GOLDEN_RATIO + log_prod).exp()
    })
}
