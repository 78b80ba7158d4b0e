//! The iterated Poisson process `N_α(N_β(t))`, its non-homogeneous and
//! reversed variants, and its first-passage times.

use statrs::function::gamma::gamma_lr;

use super::{CompositionParams, PmfTable, RateFunction};
use crate::error::{Error, Result};
use crate::specfun::{bell_polynomial, ln_factorial, poisson_pmf, SeriesAccuracy, SeriesSummer};

/// `P{N_α(N_β(t)) = k} = (λα^k/k!) e^{−λβt(1−e^{−λα})} 𝔅_k(λβ t e^{−λα})`.
pub fn iterated_poisson_pmf(k: u32, p: &CompositionParams) -> Result<f64> {
    compound_poisson_pmf(k, p.lambda_beta * p.t, p.lambda_alpha)
}

/// Law of a Poisson(`mean`) sum of Poisson(`jump_rate`) variables.
pub(crate) fn compound_poisson_pmf(k: u32, mean: f64, jump_rate: f64) -> Result<f64> {
    let x = mean * (-jump_rate).exp();
    let bell = bell_polynomial(k, x)?;
    if bell == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let ln_p = k as f64 * jump_rate.ln() - ln_factorial(k as u64) + mean * (-jump_rate).exp_m1()
        + bell.ln();
    Ok(ln_p.exp())
}

/// Table of [`iterated_poisson_pmf`] with tail mass below `tail_tol`.
pub fn iterated_poisson_table(p: &CompositionParams, tail_tol: f64) -> Result<PmfTable> {
    PmfTable::tabulate(0, 4096, tail_tol, |k| iterated_poisson_pmf(k as u32, p))
}

/// `E u^{N_α(N_β(t))} = exp(λβ t (e^{λα(u−1)} − 1))`.
pub fn iterated_poisson_pgf(u: f64, p: &CompositionParams) -> f64 {
    (p.lambda_beta * p.t * (p.lambda_alpha * (u - 1.0)).exp_m1()).exp()
}

/// Mean `λαλβt` and variance `λα(1+λα)λβt`.
pub fn iterated_poisson_moments(p: &CompositionParams) -> (f64, f64) {
    let m = p.lambda_beta * p.t;
    (p.lambda_alpha * m, p.lambda_alpha * (1.0 + p.lambda_alpha) * m)
}

/// Central-difference derivative of `p̂_k(t)` minus the right-hand side of the
/// forward equations `−λβ p̂_k + λβ e^{−λα} Σ_{m≤k} (λα^m/m!) p̂_{k−m}`.
pub fn iterated_pmf_dde_residual(k: u32, p: &CompositionParams, h: f64) -> Result<f64> {
    if !(h > 0.0 && p.t > h) {
        return Err(Error::invalid("iterated_pmf_dde_residual", "need 0 < h < t"));
    }
    let at = |t: f64| CompositionParams { t, ..*p };
    let fwd = iterated_poisson_pmf(k, &at(p.t + h))?;
    let bwd = iterated_poisson_pmf(k, &at(p.t - h))?;
    let deriv = (fwd - bwd) / (2.0 * h);
    let (la, lb) = (p.lambda_alpha, p.lambda_beta);
    let mut conv = 0.0;
    for m in 0..=k {
        conv += poisson_pmf(m as u64, la) * iterated_poisson_pmf(k - m, p)?;
    }
    // poisson_pmf already carries the e^{−λα}
    let rhs = -lb * iterated_poisson_pmf(k, p)? + lb * conv;
    Ok(deriv - rhs)
}

/// `E u^{N_α(𝔑(t))} = exp(Λ(t)(e^{λα(u−1)} − 1))` for an inner process with
/// intensity `rf`.
pub fn nonhom_composition_pgf(u: f64, rf: &RateFunction, lambda_alpha: f64, t: f64) -> f64 {
    (rf.cumulative(t) * (lambda_alpha * (u - 1.0)).exp_m1()).exp()
}

/// Law of `N_α(𝔑(t))` for an inner non-homogeneous process: the iterated
/// pmf with `λβ t` replaced by `Λ(t)`.
pub fn nonhom_composition_pmf(k: u32, rf: &RateFunction, lambda_alpha: f64, t: f64) -> Result<f64> {
    compound_poisson_pmf(k, rf.cumulative(t), lambda_alpha)
}

/// `E 𝔑(N_α(t)) = Σ_{j≥1} [Λ(j) − Λ(j−1)] P{N_α(t) ≥ j}`.
pub fn reversed_composition_mean(
    rf: &RateFunction,
    lambda_alpha: f64,
    t: f64,
    acc: SeriesAccuracy,
) -> Result<f64> {
    let op = "reversed_composition_mean";
    let mean = lambda_alpha * t;
    if mean == 0.0 {
        return Ok(0.0);
    }
    let mut sum = crate::specfun::NeumaierSum::new();
    for j in 1..=acc.max_terms {
        let tail = gamma_lr(j as f64, mean);
        if tail < acc.rel_tol && j as f64 > mean {
            return Ok(sum.value());
        }
        let increment = rf.cumulative(j as f64) - rf.cumulative(j as f64 - 1.0);
        sum.add(increment * tail);
    }
    Err(Error::NonConvergence {
        op,
        terms: acc.max_terms,
    })
}

/// Density of the first passage `T_k` of `N_α(N_β(·))` above level `k − 1`:
///
/// `λβ e^{−λα} e^{−λβ s} (λα^k/k!) Σ_j e^{−λα j} [(j+1)^k − j^k] (λβ s)^j / j!`.
///
/// The law is defective: it integrates to [`hitting_time_total_mass`].
pub fn hitting_time_density(k: u32, s: f64, p: &CompositionParams, acc: SeriesAccuracy) -> Result<f64> {
    let op = "hitting_time_density";
    if k == 0 {
        return Err(Error::invalid(op, "level must be >= 1"));
    }
    if !(s > 0.0) {
        return Err(Error::invalid(op, "s must be positive"));
    }
    let (la, lb) = (p.lambda_alpha, p.lambda_beta);
    let series = passage_series(op, k, la, Some(lb * s), &acc)?;
    let ln_pre = lb.ln() + k as f64 * la.ln() - ln_factorial(k as u64) - la;
    Ok(series * ln_pre.exp())
}

/// `P{T_k < ∞} = e^{−λα} (λα^k/k!) Σ_j e^{−λα j} [(j+1)^k − j^k]`, which is
/// strictly below one: the process may jump over level `k`.
pub fn hitting_time_total_mass(k: u32, lambda_alpha: f64, acc: SeriesAccuracy) -> Result<f64> {
    let op = "hitting_time_total_mass";
    if k == 0 {
        return Err(Error::invalid(op, "level must be >= 1"));
    }
    let series = passage_series(op, k, lambda_alpha, None, &acc)?;
    let prefactor = k as f64 * lambda_alpha.ln() - ln_factorial(k as u64) - lambda_alpha;
    Ok(series * prefactor.exp())
}

/// `Σ_j e^{−λα j} [(j+1)^k − j^k] w_j` with Poisson weights `w_j = e^{−x} x^j/j!`
/// (or `w_j = 1`).
fn passage_series(
    op: &'static str,
    k: u32,
    lambda_alpha: f64,
    x: Option<f64>,
    acc: &SeriesAccuracy,
) -> Result<f64> {
    let mut summer = SeriesSummer::new(acc);
    let kf = k as f64;
    for j in 0..acc.max_terms {
        let jf = j as f64;
        // (j+1)^k − j^k = j^k ((1 + 1/j)^k − 1), stable for large j
        let diff = if j == 0 {
            1.0
        } else {
            (kf * jf.ln()).exp() * (kf * (1.0 / jf).ln_1p()).exp_m1()
        };
        let weight = match x {
            Some(x) => poisson_pmf(j as u64, x),
            None => 1.0,
        };
        let term = diff * (-lambda_alpha * jf).exp() * weight;
        // Poisson weights rise before they decay
        let past_peak = x.map_or(true, |x| jf > x);
        if summer.add(term) && past_peak {
            return Ok(summer.value());
        }
    }
    Err(Error::NonConvergence {
        op,
        terms: summer.terms(),
    })
}
