//! Homogeneous Poisson field on the plane, its counts seen through a Poisson
//! time change, and the first-contact distance to a visible point.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::laws::compound_poisson_pmf;
use crate::samplers::poisson;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionKind {
    Rectangle { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disc { cx: f64, cy: f64, radius: f64 },
}

/// Bounded planar set with its Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    kind: RegionKind,
    measure: f64,
}

impl Region {
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) || x1 < x0 || y1 < y0 {
            return Err(Error::invalid("Region", "need finite corners with x0 <= x1, y0 <= y1"));
        }
        Ok(Region {
            kind: RegionKind::Rectangle { x0, y0, x1, y1 },
            measure: (x1 - x0) * (y1 - y0),
        })
    }

    pub fn disc(cx: f64, cy: f64, radius: f64) -> Result<Self> {
        if !(cx.is_finite() && cy.is_finite() && radius >= 0.0 && radius.is_finite()) {
            return Err(Error::invalid("Region", "need a finite centre and radius >= 0"));
        }
        Ok(Region {
            kind: RegionKind::Disc { cx, cy, radius },
            measure: PI * radius * radius,
        })
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// A point uniformly distributed on the region.
    pub fn uniform_point<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        match self.kind {
            RegionKind::Rectangle { x0, y0, x1, y1 } => {
                [x0 + (x1 - x0) * rng.random::<f64>(), y0 + (y1 - y0) * rng.random::<f64>()]
            }
            RegionKind::Disc { cx, cy, radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                let (s, c) = (2.0 * PI * rng.random::<f64>()).sin_cos();
                [cx + r * c, cy + r * s]
            }
        }
    }
}

fn check_rates(op: &'static str, lambda: f64, lambda_alpha: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) || !(lambda_alpha > 0.0) {
        return Err(Error::invalid(op, "rates must be positive"));
    }
    Ok(())
}

/// Points of a rate-`λ` Poisson field on `region`.
pub fn sample_field<R: Rng + ?Sized>(region: &Region, lambda: f64, rng: &mut R) -> Result<Vec<[f64; 2]>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("sample_field", "lambda must be positive"));
    }
    let n = poisson(lambda * region.measure, rng);
    Ok((0..n).map(|_| region.uniform_point(rng)).collect())
}

/// `P{N_α(N(B)) = k}`: the iterated Poisson law with `λβ t` replaced by `λ Λ(B)`.
pub fn subordinated_field_pmf(k: u32, region: &Region, lambda: f64, lambda_alpha: f64) -> Result<f64> {
    check_rates("subordinated_field_pmf", lambda, lambda_alpha)?;
    compound_poisson_pmf(k, lambda * region.measure, lambda_alpha)
}

/// `E u^{N_α(N(B))} = exp(λ Λ(B) (e^{λα(u−1)} − 1))`.
pub fn subordinated_field_pgf(u: f64, region: &Region, lambda: f64, lambda_alpha: f64) -> Result<f64> {
    check_rates("subordinated_field_pgf", lambda, lambda_alpha)?;
    Ok((lambda * region.measure * (lambda_alpha * (u - 1.0)).exp_m1()).exp())
}

/// `P{N_α(N(B)) = 0} = exp(−λ Λ(B) (1 − e^{−λα}))`.
pub fn emptiness_probability(region: &Region, lambda: f64, lambda_alpha: f64) -> Result<f64> {
    subordinated_field_pgf(0.0, region, lambda, lambda_alpha)
}

/// CDF and density of the distance to the nearest visible point, a Rayleigh
/// law with intensity `λ (1 − e^{−λα})`.
pub fn first_contact(l: f64, lambda: f64, lambda_alpha: f64) -> Result<(f64, f64)> {
    check_rates("first_contact", lambda, lambda_alpha)?;
    if !(l >= 0.0) {
        return Err(Error::invalid("first_contact", "l must be >= 0"));
    }
    let rate = lambda * PI * -(-lambda_alpha).exp_m1();
    let e = (-rate * l * l).exp();
    Ok((-(-rate * l * l).exp_m1(), 2.0 * rate * l * e))
}

/// Distance from the centre of a disc to the nearest field point whose
/// Poisson(`λα`) mark is nonzero, or `None` if no point in the disc is visible.
pub fn sample_first_contact<R: Rng + ?Sized>(
    radius: f64,
    lambda: f64,
    lambda_alpha: f64,
    rng: &mut R,
) -> Result<Option<f64>> {
    check_rates("sample_first_contact", lambda, lambda_alpha)?;
    let disc = Region::disc(0.0, 0.0, radius)?;
    let points = sample_field(&disc, lambda, rng)?;
    let mut nearest: Option<f64> = None;
    for [x, y] in points {
        if poisson(lambda_alpha, rng) > 0 {
            let d = x.hypot(y);
            nearest = Some(nearest.map_or(d, |m| m.min(d)));
        }
    }
    Ok(nearest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_to_infinity, QuadTol};
    use crate::samplers::RngStream;

    #[test]
    fn measures() {
        let r = Region::rectangle(-1.0, 2.0, 3.0, 2.5).unwrap();
        assert!((r.measure() - 2.0).abs() < 1e-12);
        let d = Region::disc(1.0, 1.0, 2.0).unwrap();
        assert!((d.measure() - 4.0 * PI).abs() < 1e-12);
        assert!(Region::rectangle(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Region::disc(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn field_counts() {
        let mut rng = RngStream::new(5, 0);
        let flat = Region::rectangle(0.0, 0.0, 3.0, 0.0).unwrap();
        assert!(sample_field(&flat, 4.0, &mut rng).unwrap().is_empty());

        let sq = Region::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let n = 100_000;
        let mut total = 0usize;
        for _ in 0..n {
            let pts = sample_field(&sq, 4.0, &mut rng).unwrap();
            assert!(pts.iter().all(|p| (0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1])));
            total += pts.len();
        }
        let mean = total as f64 / n as f64;
        assert!((mean - 4.0).abs() < 3.0 * (4.0 / n as f64).sqrt(), "{mean}");

        let disc = Region::disc(0.0, 0.0, 1.0).unwrap();
        let total: usize = (0..n).map(|_| sample_field(&disc, 1.0, &mut rng).unwrap().len()).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - PI).abs() < 3.0 * (PI / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn emptiness_and_pgf() {
        let sq = Region::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let p0 = subordinated_field_pmf(0, &sq, 1.0, 1.0).unwrap();
        assert!((p0 - 0.531_463_605_386_615_7).abs() < 1e-14);
        assert_eq!(p0, emptiness_probability(&sq, 1.0, 1.0).unwrap());
        let disc = Region::disc(0.0, 0.0, 0.8).unwrap();
        let strip = Region::rectangle(0.0, 0.0, disc.measure(), 1.0).unwrap();
        for k in 0..20 {
            let a = subordinated_field_pmf(k, &strip, 1.3, 0.7).unwrap();
            assert_eq!(a, subordinated_field_pmf(k, &disc, 1.3, 0.7).unwrap(), "k={k}");
        }
        let s: f64 = (0..60).map(|k| 0.4f64.powi(k) * subordinated_field_pmf(k as u32, &sq, 2.0, 1.5).unwrap()).sum();
        assert!((s - subordinated_field_pgf(0.4, &sq, 2.0, 1.5).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn rayleigh_law() {
        assert_eq!(first_contact(0.0, 1.0, 1.0).unwrap(), (0.0, 0.0));
        let (c, _) = first_contact(1.0, 1.0, 1.0).unwrap();
        assert!((c - 0.862_738_210_433_251).abs() < 1e-12, "{c}");
        let (c, _) = first_contact(0.7, 2.0, 800.0).unwrap();
        assert!((c - (1.0 - (-2.0 * PI * 0.49f64).exp())).abs() < 1e-15);
        let mass = integrate_to_infinity(|l| first_contact(l, 0.8, 0.3).unwrap().1, 0.0, 1.0, QuadTol::new(1e-12, 1e-12));
        assert!((mass.value - 1.0).abs() < 1e-8);
        assert!(first_contact(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn simulated_first_contact() {
        let mut rng = RngStream::new(6, 0);
        let n = 100_000;
        let mut d: Vec<f64> = (0..n)
            .map(|_| sample_first_contact(4.0, 1.0, 1.0, &mut rng).unwrap().unwrap_or(f64::INFINITY))
            .collect();
        d.sort_by(f64::total_cmp);
        let ks = d
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = if x.is_finite() { first_contact(x, 1.0, 1.0).unwrap().0 } else { 1.0 };
                (c - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - c).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.005, "{ks}");
    }
}
