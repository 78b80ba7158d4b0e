//! Real-line inversion for laws whose Laplace transform is
//! `F(μ) = (1 + μ^ν / c)^{−k}`, `0 < ν < 1`.
//!
//! `F` is analytic off the negative axis and has no poles on the principal
//! sheet, so collapsing the Bromwich contour gives, for any mixing kernel
//! `K(ρ) = ∫ e^{−ρ x} g(x) dx`,
//!
//! ```text
//! E g(τ) = (1/π) ∫_0^∞ |D(ρ)|^{−k} sin(k θ(ρ)) K(ρ) dρ,
//! D(ρ) = 1 + (ρ^ν / c) e^{−iπν},   θ = −arg D ∈ (0, πν).
//! ```
//!
//! The integral is done in `y = ln ρ`, where both tails decay exponentially.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::SeriesAccuracy;

/// `(1/π) |D|^{−k} sin(kθ)` at `ρ = e^y`.
fn spectral_weight(k: f64, nu: f64, c: f64, y: f64) -> f64 {
    let w = (nu * y - c.ln()).exp();
    let a = 1.0 + w * (PI * nu).cos();
    let b = w * (PI * nu).sin();
    let theta = b.atan2(a);
    let ln_mod = a.hypot(b).ln();
    (-k * ln_mod).exp() * (k * theta).sin() / PI
}

/// Evaluates `(1/π) ∫_0^∞ |D|^{−k} sin(kθ) K(ρ) dρ`.
///
/// `kernel(ρ)` must be finite, and `|K(ρ)| ρ^{1 − νk}` must decay at infinity.
pub(crate) fn cut_integral<K>(
    op: &'static str,
    k: u32,
    nu: f64,
    c: f64,
    kernel: K,
    acc: &SeriesAccuracy,
) -> Result<f64>
where
    K: Fn(f64) -> f64,
{
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::invalid(op, "branch-cut inversion needs 0 < nu < 1"));
    }
    let kf = k as f64;
    let g = |y: f64| {
        let rho = y.exp();
        let v = spectral_weight(kf, nu, c, y) * kernel(rho) * rho;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    // bracket the bulk: scan outward until the integrand is negligible
    // relative to the largest value seen
    let centre = c.ln() / nu;
    let mut peak: f64 = 0.0;
    for i in -8..=8 {
        peak = peak.max(g(centre + i as f64).abs());
    }
    let negligible = |v: f64, peak: f64| v.abs() <= 1e-18 * peak;
    let mut lo = centre - 8.0;
    let mut quiet = 0;
    while quiet < 3 && lo > centre - 2000.0 {
        lo -= 2.0;
        let v = g(lo);
        peak = peak.max(v.abs());
        quiet = if negligible(v, peak) { quiet + 1 } else { 0 };
    }
    let mut hi = centre + 8.0;
    quiet = 0;
    while quiet < 3 && hi < centre + 2000.0 {
        hi += 2.0;
        let v = g(hi);
        peak = peak.max(v.abs());
        quiet = if negligible(v, peak) { quiet + 1 } else { 0 };
    }
    if peak == 0.0 {
        return Ok(0.0);
    }
    let pieces = ((hi - lo) / 2.0).ceil() as usize;
    let points: Vec<f64> = (0..=pieces)
        .map(|i| lo + (hi - lo) * i as f64 / pieces as f64)
        .collect();
    let tol = acc.quad_tol();
    let r = quad::integrate_breaks(g, &points, tol);
    r.require(op, tol.max_intervals)
}
