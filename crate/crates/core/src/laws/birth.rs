//! Fractional pure-birth processes: the nonlinear law, the linear special
//! case, Poisson processes evaluated at them, and the inverse `φ_k^ν` of the
//! fractional linear birth process.

use statrs::function::gamma::ln_gamma;

use super::fractional::{linnik_pmf, ml_time_expectation};
use super::{guarded_sum, guarded_sum_within, BirthRates, CompositionParams, JumpLaw, PmfTable};
use crate::error::{Error, Result};
use crate::specfun::{
    binomial_exact, ln_binomial, ln_factorial, mittag_leffler, poisson_pmf, MlArgs, SeriesAccuracy,
    SeriesSummer, MAX_SERIES_AMPLIFICATION,
};

fn ml_survival(nu: f64, x: f64, acc: SeriesAccuracy) -> Result<f64> {
    mittag_leffler(MlArgs::new(nu, 1.0, -x)?, acc)
}

/// `P{𝒴^ν(t) = k | 𝒴^ν(0) = 1}` for the nonlinear fractional birth process
/// with rates `λ_1, …, λ_K`; requires `1 ≤ k ≤ K`.
pub fn frac_birth_pmf(k: usize, t: f64, nu: f64, rates: &BirthRates, acc: SeriesAccuracy) -> Result<f64> {
    let op = "frac_birth_pmf";
    if k == 0 || k > rates.len() {
        return Err(Error::invalid(op, format!("k = {k} outside 1..={}", rates.len())));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::invalid(op, "nu outside (0, 1]"));
    }
    if !(t >= 0.0) {
        return Err(Error::invalid(op, "t must be >= 0"));
    }
    let lam = &rates.as_slice()[..k];
    let tn = t.powf(nu);
    if k == 1 {
        return ml_survival(nu, lam[0] * tn, acc);
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let ln_prod: f64 = lam[..k - 1].iter().map(|l| l.ln()).sum();
    let mut terms = Vec::with_capacity(k);
    for m in 0..k {
        let mut ln_den = 0.0;
        let mut negative = false;
        for l in 0..k {
            if l != m {
                let d = lam[l] - lam[m];
                ln_den += d.abs().ln();
                negative ^= d < 0.0;
            }
        }
        let e = ml_survival(nu, lam[m] * tn, acc)?;
        let v = (ln_prod - ln_den).exp() * e;
        terms.push(if negative { -v } else { v });
    }
    guarded_sum(op, terms)
}

/// Table of [`frac_birth_pmf`] over `1..=K`; the remaining mass is the
/// probability of having passed the last tabulated rate.
pub fn frac_birth_table(t: f64, nu: f64, rates: &BirthRates, acc: SeriesAccuracy) -> Result<PmfTable> {
    let probs = (1..=rates.len())
        .map(|k| frac_birth_pmf(k, t, nu, rates, acc))
        .collect::<Result<Vec<_>>>()?;
    let tail = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    PmfTable::new(1, probs, tail)
}

const LINEAR_BIRTH_AMPLIFICATION: f64 = 10.0;

/// Fractional linear birth (Yule–Furry) law
/// `Σ_{j=1}^k C(k−1,j−1) (−1)^{j−1} E_{ν,1}(−λ j t^ν)`.
///
/// When the sum cancels the value is computed as the geometric law averaged
/// over the Mittag–Leffler time, `E e^{−xZ} (1 − e^{−xZ})^{k−1}`, `x = λt^ν`.
pub fn frac_linear_birth_pmf(k: u32, t: f64, nu: f64, lambda: f64, acc: SeriesAccuracy) -> Result<f64> {
    let op = "frac_linear_birth_pmf";
    if k == 0 {
        return Err(Error::invalid(op, "k must be >= 1"));
    }
    let tn = t.powf(nu);
    let n = k as f64 - 1.0;
    let terms = (1..=k)
        .map(|j| {
            let e = ml_survival(nu, lambda * j as f64 * tn, acc)?;
            let b = ln_binomial(n, j as f64 - 1.0).exp();
            Ok(if j % 2 == 1 { b * e } else { -b * e })
        })
        .collect::<Result<Vec<_>>>()?;
    // each E_{ν,1} carries ~1e-12 relative error, so allow little cancellation
    match guarded_sum_within(op, terms, LINEAR_BIRTH_AMPLIFICATION) {
        Err(Error::PrecisionLoss { .. }) => {}
        other => return other,
    }
    let x = lambda * tn;
    ml_time_expectation(op, nu, k as f64, |z| (-x * z + n * (-(-x * z).exp_m1()).ln()).exp(), &acc)
}

/// `E u^{N_α(𝒴^ν(t))}` from the law of the composition,
/// `Σ_n u^n Σ_r P{N_α(r) = n} P{𝒴^ν(t) = r}`, truncated at `r ≤ K`.
pub fn composed_birth_pgf(
    u: f64,
    t: f64,
    nu: f64,
    rates: &BirthRates,
    lambda_alpha: f64,
    acc: SeriesAccuracy,
) -> Result<f64> {
    let table = composed_birth_table(t, nu, rates, lambda_alpha, acc)?;
    Ok(table.pgf(u))
}

/// Law of `N_α(𝒴^ν(t))` with the birth process truncated at `K` rates.
pub fn composed_birth_table(
    t: f64,
    nu: f64,
    rates: &BirthRates,
    lambda_alpha: f64,
    acc: SeriesAccuracy,
) -> Result<PmfTable> {
    let birth = frac_birth_table(t, nu, rates, acc)?;
    let top = lambda_alpha * rates.len() as f64;
    let n_max = (top + 12.0 * (top + 1.0).sqrt() + 40.0).ceil() as u64;
    let probs: Vec<f64> = (0..=n_max)
        .map(|n| {
            birth
                .probs
                .iter()
                .enumerate()
                .map(|(i, &pr)| poisson_pmf(n, lambda_alpha * (i + 1) as f64) * pr)
                .sum()
        })
        .collect();
    PmfTable::new(0, probs, birth.tail_bound)
}

/// `Σ_r [E u^X]^r P{𝒴^ν(t) = r}`: the pgf of the random sum
/// `X_1 + … + X_{𝒴^ν(t)}` with i.i.d. jumps `X`.
pub fn birth_random_sum_pgf(
    u: f64,
    t: f64,
    nu: f64,
    rates: &BirthRates,
    jump: &JumpLaw,
    acc: SeriesAccuracy,
) -> Result<f64> {
    let z = jump.pgf(u);
    let birth = frac_birth_table(t, nu, rates, acc)?;
    let mut acc_sum = 0.0;
    let mut zr = 1.0;
    for &p in &birth.probs {
        zr *= z;
        acc_sum += zr * p;
    }
    Ok(acc_sum)
}

fn binom(k: u32, l: u32) -> f64 {
    binomial_exact(k as u64, l as u64).map_or_else(|| ln_binomial(k as f64, l as f64).exp(), |b| b as f64)
}

/// Density of `φ_k^ν`, the first time the fractional linear birth process
/// with rate `λβ` reaches `k`:
/// `Σ_l C(k,l) (−1)^{l−1} λβ l t^{ν−1} E_{ν,ν}(−λβ l t^ν)`.
pub fn phi_density(k: u32, t: f64, nu: f64, lambda_beta: f64, acc: SeriesAccuracy) -> Result<f64> {
    let op = "phi_density";
    if k == 0 {
        return Err(Error::invalid(op, "k must be >= 1"));
    }
    if !(t > 0.0) {
        return Err(Error::invalid(op, "t must be positive"));
    }
    let tn = t.powf(nu);
    let terms = (1..=k)
        .map(|l| {
            let rate = lambda_beta * l as f64;
            let e = mittag_leffler(MlArgs::new(nu, nu, -rate * tn)?, acc)?;
            let v = binom(k, l) * rate * t.powf(nu - 1.0) * e;
            Ok(if l % 2 == 1 { v } else { -v })
        })
        .collect::<Result<Vec<_>>>()?;
    guarded_sum(op, terms)
}

/// `P{φ_k^ν ≤ t} = Σ_l C(k,l) (−1)^{l−1} (1 − E_{ν,1}(−λβ l t^ν))`.
///
/// Where the alternating sum cancels (small `t`, or large `k`) the value is
/// computed as `E (1 − e^{−λβ t^ν Z})^k` over the Mittag–Leffler variable
/// `Z`, the same law written as a positive integral.
pub fn phi_cdf(k: u32, t: f64, nu: f64, lambda_beta: f64, acc: SeriesAccuracy) -> Result<f64> {
    let op = "phi_cdf";
    if k == 0 {
        return Err(Error::invalid(op, "k must be >= 1"));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    let x = lambda_beta * t.powf(nu);
    if k as f64 * x <= 20.0 {
        if let Some(v) = phi_cdf_series(k, x, nu, &acc) {
            return Ok(v);
        }
    }
    let terms = (1..=k)
        .map(|l| {
            let s = ml_survival(nu, x * l as f64, acc)?;
            let v = binom(k, l) * (1.0 - s);
            Ok(if l % 2 == 1 { v } else { -v })
        })
        .collect::<Result<Vec<_>>>()?;
    match guarded_sum_within(op, terms, MAX_SERIES_AMPLIFICATION) {
        Err(Error::PrecisionLoss { .. }) => {}
        other => return other,
    }
    let kf = k as f64;
    ml_time_expectation(op, nu, kf, |z| (kf * (-(-x * z).exp_m1()).ln()).exp(), &acc)
}

/// `k! Σ_{j≥k} (−1)^{j−k} S(j,k) x^j / Γ(νj+1)` with Stirling numbers of the
/// second kind, carried as `S(j,m)/k^j` to stay in range. `None` when the
/// sum cancels beyond the series amplification limit.
fn phi_cdf_series(k: u32, x: f64, nu: f64, acc: &SeriesAccuracy) -> Option<f64> {
    let kf = k as f64;
    let ku = k as usize;
    // scaled[m] = S(j, m) / k^j for the current j
    let mut scaled = vec![0.0f64; ku + 1];
    scaled[0] = 1.0;
    let ln_kx = (kf * x).ln();
    let ln_kfact = ln_factorial(k as u64);
    let mut summer = SeriesSummer::new(acc);
    for j in 1..=acc.max_terms {
        for m in (1..=ku.min(j)).rev() {
            scaled[m] = (m as f64 * scaled[m] + scaled[m - 1]) / kf;
        }
        scaled[0] = 0.0;
        if j < ku {
            continue;
        }
        let jf = j as f64;
        let mag = (ln_kfact + scaled[ku].ln() + jf * ln_kx - ln_gamma(nu * jf + 1.0)).exp();
        let term = if (j - ku) % 2 == 0 { mag } else { -mag };
        if summer.add(term) {
            let v = summer.value();
            return (summer.amplification() <= MAX_SERIES_AMPLIFICATION && v >= 0.0).then_some(v.min(1.0));
        }
    }
    None
}

/// `E u^{N_α(φ_k^ν)} = k · Beta(k, a + 1)` with `a = λα^ν (1−u)^ν / λβ`.
pub fn composed_phi_pgf(u: f64, k: u32, p: &CompositionParams) -> f64 {
    let a = (p.lambda_alpha * (1.0 - u)).powf(p.nu) / p.lambda_beta;
    (ln_factorial(k as u64) + ln_gamma(a + 1.0) - ln_gamma(a + 1.0 + k as f64)).exp()
}

/// The same pgf as the finite alternating sum
/// `Σ_l C(k,l) (−1)^{l−1} λβ l / ((λα(1−u))^ν + λβ l)`.
pub fn composed_phi_pgf_finite(u: f64, k: u32, p: &CompositionParams) -> Result<f64> {
    let s = (p.lambda_alpha * (1.0 - u)).powf(p.nu);
    guarded_sum(
        "composed_phi_pgf",
        (1..=k).map(|l| {
            let bl = p.lambda_beta * l as f64;
            let v = binom(k, l) * bl / (s + bl);
            if l % 2 == 1 {
                v
            } else {
                -v
            }
        }),
    )
}

/// Law of `N_α(φ_k^ν)` as the signed mixture
/// `Σ_l C(k,l) (−1)^{l−1} P{ξ_l = r}` of discrete Mittag–Leffler laws with
/// scales `l λβ / λα^ν`.
pub fn composed_phi_pmf(r: u32, k: u32, p: &CompositionParams, acc: SeriesAccuracy) -> Result<f64> {
    let op = "composed_phi_pmf";
    if k == 0 {
        return Err(Error::invalid(op, "k must be >= 1"));
    }
    let c = p.linnik_scale();
    let terms = (1..=k)
        .map(|l| {
            let v = binom(k, l) * linnik_pmf(op, r, 1, p.nu, l as f64 * c, &acc)?;
            Ok(if l % 2 == 1 { v } else { -v })
        })
        .collect::<Result<Vec<_>>>()?;
    guarded_sum(op, terms)
}

pub fn composed_phi_table(
    k: u32,
    p: &CompositionParams,
    max_len: usize,
    tail_tol: f64,
    acc: SeriesAccuracy,
) -> Result<PmfTable> {
    PmfTable::tabulate(0, max_len, tail_tol, |r| composed_phi_pmf(r as u32, k, p, acc))
}
