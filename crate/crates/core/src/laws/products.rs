//! Multiplicative compound Poisson processes `N_π(t) = Π_{j ≤ N(t)} X_j`.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// `E N_π(t)^{η−1} = exp(λt (E X^{η−1} − 1))`, with `jump_mellin(s) = E X^s`.
pub fn product_mellin<M>(eta: f64, t: f64, lambda: f64, jump_mellin: M) -> f64
where
    M: Fn(f64) -> f64,
{
    (lambda * t * (jump_mellin(eta - 1.0) - 1.0)).exp()
}

/// `E X^s` for `X ~ Bernoulli(p)`, with `0^0 = 1`.
pub fn bernoulli_mellin(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        p
    }
}

/// `E X^s = Γ(−s/ν) / (ν Γ(−s))` for a positively skewed stable variable
/// with Laplace transform `e^{−μ^ν}`; finite for `s < ν`.
pub fn positive_stable_mellin(s: f64, nu: f64) -> Result<f64> {
    let op = "positive_stable_mellin";
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::invalid(op, "nu outside (0, 1)"));
    }
    if !(s < nu) {
        return Err(Error::invalid(op, format!("moment of order {s} is infinite")));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok(gamma(-s / nu) / (nu * gamma(-s)))
}

/// Mean and variance of `N_π(t)` given `m = E X` and `m₂ = E X²`.
pub fn product_moments(t: f64, lambda: f64, jump_mean: f64, jump_second: f64) -> (f64, f64) {
    let mean = (lambda * t * (jump_mean - 1.0)).exp();
    let var = (lambda * t * (jump_second - 1.0)).exp() - mean * mean;
    (mean, var)
}

/// `Cov(N_π(t), N_π(s))` for `0 ≤ s ≤ t`.
pub fn product_covariance(s: f64, t: f64, lambda: f64, jump_mean: f64, jump_second: f64) -> Result<f64> {
    if !(s >= 0.0 && s <= t) {
        return Err(Error::invalid("product_covariance", "need 0 <= s <= t"));
    }
    let m = jump_mean;
    let outer = (lambda * t * (m - 1.0)).exp();
    Ok(outer * ((lambda * s * (jump_second - m)).exp() - (lambda * s * (m - 1.0)).exp()))
}
