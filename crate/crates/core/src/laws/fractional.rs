//! Fractional Poisson counts, the inverse times `τ_k^ν`, and the processes
//! obtained by evaluating a Poisson or Yule process at `τ_k^ν`.

use std::cell::Cell;

use super::cut::cut_integral;
use super::{guarded_sum_within, CompositionParams, PmfTable, ALTERNATING_LOSS_LIMIT};
use crate::error::{Error, Result};
use crate::quad::{self, QuadTol};
use crate::specfun::{
    generalized_ml, kanter_ln_a, ln_binomial, ln_factorial, ln_rising, poisson_pmf, SeriesAccuracy, SeriesSummer,
    MAX_SERIES_AMPLIFICATION,
};

fn check_nu(op: &'static str, nu: f64) -> Result<()> {
    if nu > 0.0 && nu <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(op, format!("nu = {nu} outside (0, 1]")))
    }
}

fn check_positive(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(op, format!("{name} = {v} must be positive")))
    }
}

/// `P{N^ν(t) = m} = (λ t^ν)^m Σ_j C(j+m, j) (−λ t^ν)^j / Γ(ν(m+j)+1)`, i.e.
/// `x^m E^{m+1}_{ν,νm+1}(−x)` with `x = λ t^ν`.
pub fn frac_poisson_pmf(m: u32, t: f64, nu: f64, lambda_beta: f64, acc: SeriesAccuracy) -> Result<f64> {
    let op = "frac_poisson_pmf";
    check_nu(op, nu)?;
    check_positive(op, "lambda_beta", lambda_beta)?;
    if !(t >= 0.0) {
        return Err(Error::invalid(op, "t must be >= 0"));
    }
    if t == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    let x = lambda_beta * t.powf(nu);
    let mf = m as f64;
    match generalized_ml(nu, nu * mf + 1.0, mf + 1.0, -x, acc) {
        Ok(v) => Ok((mf * x.ln()).exp() * v),
        Err(_) if nu == 1.0 => Ok(poisson_pmf(m as u64, x)),
        Err(Error::NonConvergence { .. }) => frac_poisson_mixture(m, x, nu, &acc),
        Err(e) => Err(e),
    }
}

/// `E f(Z)` for the Mittag–Leffler variable `Z = S^{−ν}`
/// (`E e^{−μZ} = E_{ν,1}(−μ)`), written with Kanter's representation as
/// `(1/π) ∫_0^π ∫ e^{w − e^w} f((e^w / A(φ))^{1−ν}) dw dφ`.
///
/// `f` must be nonnegative and bounded by 1; `growth` bounds the power of
/// `z` with which it can grow near 0 and sets the upper cut in `w`.
pub(crate) fn ml_time_expectation<F>(op: &'static str, nu: f64, growth: f64, f: F, acc: &SeriesAccuracy) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if nu == 1.0 {
        return Ok(f(1.0));
    }
    let q = 1.0 - nu;
    let tol = acc.quad_tol();
    let w_hi = (1.0 + growth * q).ln() + 6.0;
    let w_points: Vec<f64> = (0..=((w_hi + 40.0) as usize)).map(|i| -40.0 + i as f64).chain([w_hi]).collect();
    let failed = Cell::new(false);
    let inner = |phi: f64| {
        let ln_a = kanter_ln_a(nu, phi);
        if !ln_a.is_finite() {
            return 0.0;
        }
        let g = |w: f64| {
            let v = (w - w.exp()).exp() * f((q * (w - ln_a)).exp());
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let r = quad::integrate_breaks(g, &w_points, tol);
        if !r.converged {
            failed.set(true);
        }
        r.value
    };
    let breaks: Vec<f64> = (0..=8).map(|i| std::f64::consts::PI * i as f64 / 8.0).collect();
    let r = quad::integrate_breaks(inner, &breaks, tol);
    if failed.get() {
        return Err(Error::NonConvergence { op, terms: tol.max_intervals });
    }
    Ok(r.require(op, tol.max_intervals)? / std::f64::consts::PI)
}

/// `E Poisson(m; x Z)` with `Z = S^{−ν} = (E / A(φ))^{1−ν}`, so that `x Z`
/// has the law of `λ L(t)`. Both integrands are positive.
fn frac_poisson_mixture(m: u32, x: f64, nu: f64, acc: &SeriesAccuracy) -> Result<f64> {
    let op = "frac_poisson_pmf";
    let q = 1.0 - nu;
    let mf = m as f64;
    let ln_mfact = ln_factorial(m as u64);
    let tol = acc.quad_tol();
    let failed = Cell::new(false);
    let inner = |phi: f64| {
        let ln_b = x.ln() - q * kanter_ln_a(nu, phi);
        if !ln_b.is_finite() {
            return 0.0;
        }
        // log-concave in w = ln E
        let h = |w: f64| w - w.exp() + mf * (ln_b + q * w) - (ln_b + q * w).exp() - ln_mfact;
        let dh = |w: f64| 1.0 - w.exp() + mf * q - q * (ln_b + q * w).exp();
        let curv = |w: f64| w.exp() + q * q * (ln_b + q * w).exp();
        let mut w = (1.0 + mf * q).ln();
        for _ in 0..200 {
            let step = dh(w) / curv(w);
            w += step.clamp(-5.0, 5.0);
            if step.abs() < 1e-12 {
                break;
            }
        }
        let peak = h(w);
        let width = curv(w).sqrt().recip().max(0.05);
        let mut lo = w;
        while h(lo) > peak - 50.0 {
            lo -= width;
        }
        let mut hi = w;
        while h(hi) > peak - 50.0 {
            hi += width;
        }
        let pieces = (((hi - lo) / width).ceil() as usize).clamp(2, 64);
        let points: Vec<f64> = (0..=pieces).map(|i| lo + (hi - lo) * i as f64 / pieces as f64).collect();
        let r = quad::integrate_breaks(|w| h(w).exp(), &points, tol);
        if !r.converged {
            failed.set(true);
        }
        r.value
    };
    let breaks: Vec<f64> = (0..=8).map(|i| std::f64::consts::PI * i as f64 / 8.0).collect();
    let r = quad::integrate_breaks(inner, &breaks, tol);
    if failed.get() {
        return Err(Error::NonConvergence { op, terms: tol.max_intervals });
    }
    Ok(r.require(op, tol.max_intervals)? / std::f64::consts::PI)
}

pub fn frac_poisson_table(
    t: f64,
    nu: f64,
    lambda_beta: f64,
    tail_tol: f64,
    acc: SeriesAccuracy,
) -> Result<PmfTable> {
    PmfTable::tabulate(0, 4096, tail_tol, |m| frac_poisson_pmf(m as u32, t, nu, lambda_beta, acc))
}

/// Density of `τ_k^ν`, the `k`-th arrival of a fractional Poisson process:
/// `λ^k s^{νk−1} E^k_{ν,νk}(−λ s^ν)`.
pub fn tau_density(k: u32, s: f64, nu: f64, lambda_beta: f64, acc: SeriesAccuracy) -> Result<f64> {
    let op = "tau_density";
    check_nu(op, nu)?;
    check_positive(op, "lambda_beta", lambda_beta)?;
    if k == 0 {
        return Err(Error::invalid(op, "k must be >= 1"));
    }
    if !(s > 0.0) {
        return Err(Error::invalid(op, "s must be positive"));
    }
    let kf = k as f64;
    let x = lambda_beta * s.powf(nu);
    match generalized_ml(nu, nu * kf, kf, -x, acc) {
        Ok(v) => Ok((kf * x.ln() - s.ln()).exp() * v),
        Err(_) if nu == 1.0 => Ok(erlang_density(k, lambda_beta, s)),
        Err(e) => Err(e),
    }
}

fn erlang_density(k: u32, rate: f64, s: f64) -> f64 {
    let kf = k as f64;
    (kf * rate.ln() + (kf - 1.0) * s.ln() - rate * s - ln_factorial(k as u64 - 1)).exp()
}

/// `E e^{−μ τ_k^ν} = (μ^ν/λβ + 1)^{−k}`.
pub fn tau_laplace(k: u32, mu: f64, nu: f64, lambda_beta: f64) -> f64 {
    (-(k as f64) * (mu.powf(nu) / lambda_beta).ln_1p()).exp()
}

/// `E e^{−μ τ_k^ν(t/k)}` for the time-rescaled passage: `(1 + λβ t μ^ν / k)^{−k}`.
pub fn rescaled_tau_laplace(k: u64, t: f64, mu: f64, nu: f64, lambda_beta: f64) -> f64 {
    let kf = k as f64;
    (-kf * (lambda_beta * t * mu.powf(nu) / kf).ln_1p()).exp()
}

/// Law of `N_α(τ_k^ν)`:
/// `(1/r!) Σ_j C(−k,j) c^{k+j} Γ(ν(k+j)+r)/Γ(ν(k+j))` with `c = λβ/λα^ν`.
pub fn composed_tau_pmf(r: u32, k: u32, p: &CompositionParams, acc: SeriesAccuracy) -> Result<f64> {
    if k == 0 {
        return Ok(if r == 0 { 1.0 } else { 0.0 });
    }
    linnik_pmf("composed_tau_pmf", r, k, p.nu, p.linnik_scale(), &acc)
}

pub fn composed_tau_table(
    k: u32,
    p: &CompositionParams,
    max_len: usize,
    tail_tol: f64,
    acc: SeriesAccuracy,
) -> Result<PmfTable> {
    PmfTable::tabulate(0, max_len, tail_tol, |r| composed_tau_pmf(r as u32, k, p, acc))
}

/// `E u^{N_α(τ_k^ν)} = [1 + (1−u)^ν λα^ν/λβ]^{−k}`.
pub fn composed_tau_pgf(u: f64, k: u32, p: &CompositionParams) -> f64 {
    let a = (1.0 - u).powf(p.nu) / p.linnik_scale();
    (-(k as f64) * a.ln_1p()).exp()
}

/// Discrete Mittag–Leffler law with pgf `1/(1 + (1−u)^ν / c)`, the `k = 1`
/// case of [`composed_tau_pmf`]. At `ν = 1` it is geometric, `p q^r`.
pub fn dml_pmf(r: u32, nu: f64, c: f64, acc: SeriesAccuracy) -> Result<f64> {
    let op = "dml_pmf";
    check_nu(op, nu)?;
    check_positive(op, "c", c)?;
    linnik_pmf(op, r, 1, nu, c, &acc)
}

/// Series used while it converges fast and stays well conditioned.
const LINNIK_SERIES_MAX_SCALE: f64 = 0.5;

pub(crate) fn linnik_pmf(
    op: &'static str,
    r: u32,
    k: u32,
    nu: f64,
    c: f64,
    acc: &SeriesAccuracy,
) -> Result<f64> {
    if c <= LINNIK_SERIES_MAX_SCALE {
        if let Some(v) = linnik_series(r, k, nu, c, acc) {
            return Ok(v);
        }
    }
    if nu < 1.0 {
        let rf = r as f64 + 1.0;
        cut_integral(op, k, nu, c, |rho| (-rf * rho.ln_1p()).exp(), acc)
    } else {
        // mix the Poisson law over the Erlang(k, c) time
        let (rf, kf) = (r as f64, k as f64);
        let ln_norm = kf * c.ln() - ln_factorial(k as u64 - 1) - ln_factorial(r as u64);
        let f = |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            (ln_norm + (rf + kf - 1.0) * s.ln() - (1.0 + c) * s).exp()
        };
        let scale = ((rf + kf - 1.0) / (1.0 + c)).max(1.0 / (1.0 + c));
        let tol = acc.quad_tol();
        quad::integrate_to_infinity(f, 0.0, scale, tol).require(op, tol.max_intervals)
    }
}

fn linnik_series(r: u32, k: u32, nu: f64, c: f64, acc: &SeriesAccuracy) -> Option<f64> {
    let kf = k as f64;
    let ln_c = c.ln();
    let ln_rfact = ln_factorial(r as u64);
    let mut summer = SeriesSummer::new(acc);
    for j in 0..acc.max_terms {
        let jf = j as f64;
        let a = nu * (kf + jf);
        let ln_mag = ln_binomial(kf + jf - 1.0, jf) + (kf + jf) * ln_c + ln_rising(a, r) - ln_rfact;
        let term = if j % 2 == 0 { ln_mag.exp() } else { -ln_mag.exp() };
        if summer.add(term) {
            let v = summer.value();
            return (summer.amplification() <= MAX_SERIES_AMPLIFICATION && v >= 0.0).then_some(v);
        }
    }
    None
}

/// `P{Y_α(τ_k^ν) = r} = Σ_{h=1}^r C(r−1,h−1) (−1)^{h−1} [1 + h^ν λα^ν/λβ]^{−k}`
/// evaluated as written; fails with [`Error::PrecisionLoss`] once
/// cancellation exceeds the alternating-sum limit.
pub fn yule_tau_pmf_alternating(r: u32, k: u32, p: &CompositionParams) -> Result<f64> {
    yule_alternating_within(r, k, p, ALTERNATING_LOSS_LIMIT)
}

fn yule_alternating_within(r: u32, k: u32, p: &CompositionParams, limit: f64) -> Result<f64> {
    let op = "yule_tau_pmf";
    if r == 0 {
        return Err(Error::invalid(op, "the Yule process starts at 1"));
    }
    let c = p.linnik_scale();
    let kf = k as f64;
    let n = r as f64 - 1.0;
    guarded_sum_within(
        op,
        (1..=r).map(|h| {
            let hf = h as f64;
            let mag = (ln_binomial(n, hf - 1.0) - kf * (hf.powf(p.nu) / c).ln_1p()).exp();
            if h % 2 == 1 {
                mag
            } else {
                -mag
            }
        }),
        limit,
    )
}

/// Law of the Yule process `Y_α` evaluated at `τ_k^ν`, `r ≥ 1`.
///
/// Falls back from the alternating sum to the mixing integral
/// `∫ e^{−λα s}(1 − e^{−λα s})^{r−1} P{τ_k^ν ∈ ds}` when the sum cancels.
pub fn yule_tau_pmf(r: u32, k: u32, p: &CompositionParams, acc: SeriesAccuracy) -> Result<f64> {
    let op = "yule_tau_pmf";
    match yule_alternating_within(r, k, p, MAX_SERIES_AMPLIFICATION) {
        Err(Error::PrecisionLoss { .. }) => {}
        other => return other,
    }
    let c = p.linnik_scale();
    let rf = r as f64;
    if p.nu < 1.0 {
        // ∫ e^{−ρ s} e^{−s}(1 − e^{−s})^{r−1} ds = (r−1)! / Π_{i=1}^r (ρ + i)
        let ln_num = ln_factorial(r as u64 - 1);
        cut_integral(
            op,
            k,
            p.nu,
            c,
            |rho| {
                let ln_den: f64 = (1..=r).map(|i| (rho + i as f64).ln()).sum();
                (ln_num - ln_den).exp()
            },
            &acc,
        )
    } else {
        let g = move |s: f64| (-s + (rf - 1.0) * (-(-s).exp_m1()).ln()).exp();
        erlang_expectation(op, g, k, c, &acc)
    }
}

/// `E g(τ)` for `τ ~ Erlang(k, c)`.
fn erlang_expectation<G: Fn(f64) -> f64>(
    op: &'static str,
    g: G,
    k: u32,
    c: f64,
    acc: &SeriesAccuracy,
) -> Result<f64> {
    let f = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let v = g(s) * erlang_density(k, c, s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let tol = acc.quad_tol();
    let scale = k as f64 / c;
    quad::integrate_to_infinity(f, 0.0, scale, tol).require(op, tol.max_intervals)
}

pub fn yule_tau_table(
    k: u32,
    p: &CompositionParams,
    max_len: usize,
    tail_tol: f64,
    acc: SeriesAccuracy,
) -> Result<PmfTable> {
    PmfTable::tabulate(1, max_len, tail_tol, |r| yule_tau_pmf(r as u32, k, p, acc))
}

/// `E u^{Y_α(τ_k^ν)} = Σ_{h≥1} (−1)^{h−1} (u/(1−u))^h [1 + h^ν λα^ν/λβ]^{−k}`
/// for `|u/(1−u)| ≤ 1/2`; beyond that the geometric pgf of `Y_α(s)` is
/// integrated against the law of `τ_k^ν`.
pub fn yule_tau_pgf(u: f64, k: u32, p: &CompositionParams, acc: SeriesAccuracy) -> Result<f64> {
    let op = "yule_tau_pgf";
    if !(u.abs() < 1.0) {
        return Err(Error::invalid(op, "need |u| < 1"));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let c = p.linnik_scale();
    let kf = k as f64;
    let w = u / (1.0 - u);
    if w.abs() <= 0.5 {
        let mut summer = SeriesSummer::new(&acc);
        let mut wpow = 1.0;
        for h in 1..=acc.max_terms {
            wpow *= -w;
            let hf = h as f64;
            let term = -wpow * (-kf * (hf.powf(p.nu) / c).ln_1p()).exp();
            if summer.add(term) {
                return Ok(summer.value());
            }
        }
        return Err(Error::NonConvergence {
            op,
            terms: acc.max_terms,
        });
    }
    // geometric pgf of the Yule count at (scaled) time s
    let g = move |s: f64| {
        let e = (-s).exp();
        u * e / (1.0 - (1.0 - e) * u)
    };
    if p.nu < 1.0 {
        let inner = QuadTol::new(0.0, acc.rel_tol.max(1e-13));
        let unconverged = Cell::new(false);
        let kernel = |rho: f64| {
            let r = quad::integrate_to_infinity(|s| (-rho * s).exp() * g(s), 0.0, 1.0 / (1.0 + rho), inner);
            if !r.converged {
                unconverged.set(true);
            }
            r.value
        };
        let v = cut_integral(op, k, p.nu, c, kernel, &acc)?;
        if unconverged.get() {
            return Err(Error::NonConvergence {
                op,
                terms: inner.max_intervals,
            });
        }
        Ok(v)
    } else {
        erlang_expectation(op, g, k, c, &acc)
    }
}

/// Mean and second moment of `Y_α(τ_k^1)`:
/// `E Y = A_1`, `E Y² = 2A_2 − A_1`, `A_j = (λβ/(λβ − jλα))^k`.
///
/// Entries are `+∞` when the corresponding moment does not exist.
pub fn yule_tau_moments(k: u32, lambda_alpha: f64, lambda_beta: f64) -> (f64, f64) {
    let a = |j: f64| {
        if lambda_beta > j * lambda_alpha {
            (lambda_beta / (lambda_beta - j * lambda_alpha)).powi(k as i32)
        } else {
            f64::INFINITY
        }
    };
    let (a1, a2) = (a(1.0), a(2.0));
    (a1, if a2.is_finite() { 2.0 * a2 - a1 } else { f64::INFINITY })
}

/// Poisson rate `μ = k ln((λα+λβ)/λβ)` and logarithmic parameter
/// `q = λα/(λα+λβ)` of the random-sum form of `N_α(τ_k^1)`.
pub fn negbin_decomposition_params(k: u32, lambda_alpha: f64, lambda_beta: f64) -> (f64, f64) {
    let mu = k as f64 * (lambda_alpha / lambda_beta).ln_1p();
    let q = lambda_alpha / (lambda_alpha + lambda_beta);
    (mu, q)
}

/// Mean `kλα/λβ` and variance `kλα(λα+λβ)/λβ²` of `N_α(τ_k^1)`.
pub fn negbin_moments(k: u32, lambda_alpha: f64, lambda_beta: f64) -> (f64, f64) {
    let kf = k as f64;
    (
        kf * lambda_alpha / lambda_beta,
        kf * lambda_alpha * (lambda_alpha + lambda_beta) / (lambda_beta * lambda_beta),
    )
}

/// `C(k+r−1, r) p^k (1−p)^r`.
pub fn negbin_pmf(r: u32, k: u32, p: f64) -> f64 {
    let (rf, kf) = (r as f64, k as f64);
    (ln_binomial(kf + rf - 1.0, rf) + kf * p.ln() + rf * (-p).ln_1p()).exp()
}

/// `−q^r / (r ln(1−q))`, `r ≥ 1`.
pub fn logarithmic_pmf(r: u32, q: f64) -> f64 {
    if r == 0 {
        return 0.0;
    }
    -(r as f64 * q.ln()).exp() / (r as f64 * (-q).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{mittag_leffler, MlArgs};
    use statrs::function::gamma::ln_gamma;

    fn acc() -> SeriesAccuracy {
        SeriesAccuracy::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn frac_poisson_reductions() {
        for m in 0..30 {
            let got = frac_poisson_pmf(m, 1.3, 1.0, 1.7, acc()).unwrap();
            let want = poisson_pmf(m as u64, 1.7 * 1.3);
            assert!(rel(got, want) < 1e-8, "m={m}: {got} vs {want}");
        }
        for &nu in &[0.3, 0.6, 0.9] {
            let p0 = frac_poisson_pmf(0, 2.0, nu, 1.5, acc()).unwrap();
            let ml = mittag_leffler(MlArgs::new(nu, 1.0, -1.5 * 2f64.powf(nu)).unwrap(), acc()).unwrap();
            assert!(rel(p0, ml) < 1e-10);
        }
        assert_eq!(frac_poisson_pmf(0, 0.0, 0.5, 1.0, acc()).unwrap(), 1.0);
    }

    #[test]
    fn positive_mixture_matches_series() {
        for &nu in &[0.3, 0.5, 0.8] {
            for &x in &[0.4, 2.5] {
                let p0 = frac_poisson_mixture(0, x, nu, &acc()).unwrap();
                let ml = mittag_leffler(MlArgs::new(nu, 1.0, -x).unwrap(), acc()).unwrap();
                assert!(rel(p0, ml) < 1e-10, "nu={nu} x={x}: {p0} vs {ml}");
                for m in [1u32, 4, 12] {
                    let a = frac_poisson_mixture(m, x, nu, &acc()).unwrap();
                    let b = frac_poisson_pmf(m, x.powf(1.0 / nu), nu, 1.0, acc()).unwrap();
                    assert!(rel(a, b) < 1e-9, "nu={nu} x={x} m={m}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn ml_time_expectation_laplace() {
        for &nu in &[0.3, 0.6, 0.9] {
            for &mu in &[0.2, 1.5, 9.0] {
                let v = ml_time_expectation("t", nu, 0.0, |z| (-mu * z).exp(), &acc()).unwrap();
                let ml = mittag_leffler(MlArgs::new(nu, 1.0, -mu).unwrap(), acc()).unwrap();
                assert!(rel(v, ml) < 1e-10, "nu={nu} mu={mu}: {v} vs {ml}");
            }
        }
    }

    #[test]
    fn frac_poisson_normalizes() {
        for &nu in &[0.5, 0.8] {
            let table = frac_poisson_table(2.0, nu, 2.0, 1e-13, acc()).unwrap();
            let tail = 1.0 - table.total();
            assert!(tail.abs() < 1e-9, "nu={nu}: {tail}");
            assert!(table.probs.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn tau_examples() {
        let d = tau_density(2, 1.0, 1.0, 1.0, acc()).unwrap();
        assert!(rel(d, (-1.0f64).exp()) < 1e-12);
        for &(nu, lb, s) in &[(0.5, 1.0, 0.7), (0.8, 2.0, 1.5)] {
            let d = tau_density(1, s, nu, lb, acc()).unwrap();
            let ml = mittag_leffler(MlArgs::new(nu, nu, -lb * f64::powf(s, nu)).unwrap(), acc()).unwrap();
            assert!(rel(d, lb * f64::powf(s, nu - 1.0) * ml) < 1e-10);
        }
        assert_eq!(tau_laplace(1, 1.0, 1.0, 1.0), 0.5);
        assert!((tau_laplace(3, 1e-300, 0.5, 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rescaled_laplace_limit() {
        let v = rescaled_tau_laplace(1_000_000, 1.0, 1.0, 0.5, 1.0);
        assert!((v - (-1.0f64).exp()).abs() < 1e-5);
        assert!((rescaled_tau_laplace(1, 2.0, 0.3, 1.0, 1.5) - 1.0 / (1.0 + 1.5 * 2.0 * 0.3)).abs() < 1e-15);
    }

    #[test]
    fn composed_tau_reduces_to_negative_binomial() {
        for &(la, lb) in &[(1.0, 0.4), (2.0, 0.5), (1.0, 1.0), (0.5, 2.0)] {
            let p = CompositionParams::classical(la, lb, 1.0).unwrap();
            let prob = lb / (la + lb);
            for k in 1..=4 {
                for r in 0..=30 {
                    let got = composed_tau_pmf(r, k, &p, acc()).unwrap();
                    let want = negbin_pmf(r, k, prob);
                    assert!(rel(got, want) < 1e-8, "la={la} lb={lb} k={k} r={r}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn dml_examples() {
        assert!((dml_pmf(0, 1.0, 1.0, acc()).unwrap() - 0.5).abs() < 1e-12);
        assert!((dml_pmf(1, 1.0, 1.0, acc()).unwrap() - 0.25).abs() < 1e-12);
        let p = CompositionParams::new(1.0, 1.0, 0.5, 1.0).unwrap();
        let a = dml_pmf(0, 0.5, 1.0, acc()).unwrap();
        assert_eq!(a, composed_tau_pmf(0, 1, &p, acc()).unwrap());
        assert!((a - 0.5).abs() < 1e-12);
    }

    // Taylor coefficients of [1 + (1−u)^ν / c]^{−k} at u = 0, 40 digits
    const LINNIK_TABLE: [(u32, f64, f64, u32, f64); 7] = [
        (1, 0.5, 1.0, 1, 0.125),
        (1, 0.5, 1.0, 5, 0.020_507_812_5),
        (2, 0.7, 0.4, 3, 0.064_489_795_918_367_34),
        (1, 0.3, 2.5, 0, 0.714_285_714_285_714_3),
        (1, 0.3, 2.5, 2, 0.026_676_384_839_650_145),
        (3, 0.8, 1.7, 4, 0.065_049_898_949_573_74),
        (2, 0.6, 1.0, 20, 0.005_013_279_165_988_114),
    ];

    #[test]
    fn linnik_matches_reference() {
        for &(k, nu, c, r, want) in LINNIK_TABLE.iter() {
            let got = linnik_pmf("t", r, k, nu, c, &acc()).unwrap();
            assert!(rel(got, want) < 1e-9, "k={k} nu={nu} c={c} r={r}: {got} vs {want}");
        }
    }

    #[test]
    fn series_and_inversion_agree() {
        let mut compared = 0;
        for &(k, nu, c) in &[(1, 0.5, 0.3), (2, 0.7, 0.45), (3, 0.4, 0.2)] {
            for r in 0..12 {
                let Some(s) = linnik_series(r, k, nu, c, &acc()) else { continue };
                let rf = r as f64 + 1.0;
                let i = cut_integral("t", k, nu, c, |rho| (-rf * rho.ln_1p()).exp(), &acc()).unwrap();
                assert!(rel(s, i) < 1e-10, "k={k} nu={nu} r={r}: {s} vs {i}");
                compared += 1;
            }
        }
        assert!(compared >= 30, "{compared}");
    }

    #[test]
    fn composed_tau_pgf_examples() {
        let p = CompositionParams::classical(1.0, 1.0, 1.0).unwrap();
        assert_eq!(composed_tau_pgf(1.0, 3, &p), 1.0);
        assert!((composed_tau_pgf(0.0, 1, &p) - 0.5).abs() < 1e-15);
        let p = CompositionParams::new(1.3, 0.8, 0.6, 1.0).unwrap();
        let table = composed_tau_table(2, &p, 400, 1e-14, acc()).unwrap();
        assert!((table.pgf(0.3) - composed_tau_pgf(0.3, 2, &p)).abs() < 1e-6);
    }

    #[test]
    fn yule_examples() {
        let p = CompositionParams::classical(1.0, 1.0, 1.0).unwrap();
        assert!((yule_tau_pmf(1, 1, &p, acc()).unwrap() - 0.5).abs() < 1e-14);
        assert!((yule_tau_pmf(2, 1, &p, acc()).unwrap() - 1.0 / 6.0).abs() < 1e-14);
        // Beta form at ν = 1, k = 1
        let p = CompositionParams::classical(0.7, 1.9, 1.0).unwrap();
        let b = 1.9 / 0.7;
        for r in 1..40u32 {
            let want = b * (ln_gamma(r as f64) + ln_gamma(b + 1.0) - ln_gamma(b + 1.0 + r as f64)).exp();
            let got = yule_tau_pmf(r, 1, &p, acc()).unwrap();
            assert!(rel(got, want) < 1e-9, "r={r}: {got} vs {want}");
        }
    }

    #[test]
    fn yule_fallback_matches_alternating_where_both_work() {
        for &nu in &[0.6, 1.0] {
            let p = CompositionParams::new(0.8, 1.5, nu, 1.0).unwrap();
            let c = p.linnik_scale();
            for r in [1u32, 3, 7, 12] {
                let alt = yule_tau_pmf_alternating(r, 2, &p).unwrap();
                let int = if nu < 1.0 {
                    let ln_num = ln_factorial(r as u64 - 1);
                    cut_integral(
                        "t",
                        2,
                        nu,
                        c,
                        |rho| (ln_num - (1..=r).map(|i| (rho + i as f64).ln()).sum::<f64>()).exp(),
                        &acc(),
                    )
                    .unwrap()
                } else {
                    let rf = r as f64;
                    erlang_expectation("t", |s| (-s + (rf - 1.0) * (-(-s).exp_m1()).ln()).exp(), 2, c, &acc())
                        .unwrap()
                };
                assert!(rel(alt, int) < 1e-8, "nu={nu} r={r}: {alt} vs {int}");
            }
        }
    }

    #[test]
    fn yule_alternating_flags_cancellation() {
        let p = CompositionParams::new(1.0, 1.0, 0.5, 1.0).unwrap();
        assert!(matches!(
            yule_tau_pmf_alternating(80, 1, &p),
            Err(Error::PrecisionLoss { .. })
        ));
        assert!(yule_tau_pmf(80, 1, &p, acc()).unwrap() > 0.0);
    }

    #[test]
    fn yule_pgf_examples() {
        let p = CompositionParams::classical(1.0, 1.0, 1.0).unwrap();
        assert_eq!(yule_tau_pgf(0.0, 1, &p, acc()).unwrap(), 0.0);
        // Σ u^r/(r(r+1)) = 1 − (1−u) ln(1/(1−u))/u
        for &u in &[0.2, 0.5, 0.9] {
            let want = 1.0 - (1.0 - u) * (-(1.0f64 - u).ln()) / u;
            let got = yule_tau_pgf(u, 1, &p, acc()).unwrap();
            assert!(rel(got, want) < 1e-10, "u={u}: {got} vs {want}");
        }
        let v = yule_tau_pgf(0.5, 1, &p, acc()).unwrap();
        assert!((v - (1.0 - std::f64::consts::LN_2)).abs() < 1e-12);
        let direct: f64 = (1..2000).map(|r| 0.4f64.powi(r) / (r as f64 * (r as f64 + 1.0))).sum();
        assert!((yule_tau_pgf(0.4, 1, &p, acc()).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn yule_pgf_routes_agree_fractional() {
        let p = CompositionParams::new(0.9, 1.4, 0.7, 1.0).unwrap();
        let table = yule_tau_table(2, &p, 400, 1e-13, acc()).unwrap();
        for &u in &[0.2, 0.3, 0.6, 0.8] {
            let got = yule_tau_pgf(u, 2, &p, acc()).unwrap();
            let sum = table.pgf(u);
            assert!((got - sum).abs() < 1e-8, "u={u}: {got} vs {sum}");
        }
    }

    #[test]
    fn yule_moments() {
        let (m, m2) = yule_tau_moments(1, 1.0, 3.0);
        assert!((m - 1.5).abs() < 1e-15);
        assert!((m2 - (2.0 * 3.0 - 1.5)).abs() < 1e-14);
        assert!(yule_tau_moments(1, 1.0, 1.5).1.is_infinite());
        // against the Beta law
        let p = CompositionParams::classical(1.0, 3.0, 1.0).unwrap();
        let table = yule_tau_table(1, &p, 400, 1e-12, acc()).unwrap();
        let (tm, _) = table.moments();
        // Σ_{r>400} r P{Y = r} ≈ 18 Σ_{r>400} r^{-3} < 6e-5
        assert!(tm < m && m - tm < 6e-5, "{tm}");
    }

    #[test]
    fn negbin_decomposition() {
        let (mu, q) = negbin_decomposition_params(1, 2.0, 2.0);
        assert!((mu - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(q, 0.5);
        assert!(negbin_decomposition_params(3, 1e-12, 1.0).0 < 1e-11);
        // Wald: μ · E[log(q)] = kλα/λβ
        for &(k, la, lb) in &[(1, 1.0, 1.0), (3, 0.5, 2.0), (2, 2.0, 0.7)] {
            let (mu, q) = negbin_decomposition_params(k, la, lb);
            let log_mean = -q / ((1.0 - q) * (-q).ln_1p());
            let (m, v) = negbin_moments(k, la, lb);
            assert!(rel(mu * log_mean, m) < 1e-13);
            let log_second = -q / ((1.0 - q).powi(2) * (-q).ln_1p());
            assert!(rel(mu * log_second, v) < 1e-13);
        }
        assert!((logarithmic_pmf(1, 0.5) - 0.721_348).abs() < 1e-6);
    }
}
