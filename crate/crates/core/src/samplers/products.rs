use rand::Rng;
use rand_distr::{Cauchy, Distribution};

use super::counting::poisson;
use crate::error::{Error, Result};

/// `Π_{j ≤ N(t)} X_j` with `N` a rate-`λ` Poisson process; the empty product
/// is 1.
pub fn sample_product<R, J>(t: f64, lambda: f64, mut jump: J, rng: &mut R) -> Result<f64>
where
    R: Rng + ?Sized,
    J: FnMut(&mut R) -> f64,
{
    if !(t >= 0.0 && lambda > 0.0) {
        return Err(Error::invalid("sample_product", "need t >= 0 and lambda > 0"));
    }
    let n = poisson(lambda * t, rng);
    Ok((0..n).map(|_| jump(rng)).product())
}

/// `(N_π(s), N_π(t))` along one path, `0 ≤ s ≤ t`.
pub fn sample_product_pair<R, J>(s: f64, t: f64, lambda: f64, mut jump: J, rng: &mut R) -> Result<(f64, f64)>
where
    R: Rng + ?Sized,
    J: FnMut(&mut R) -> f64,
{
    if !(s >= 0.0 && s <= t && lambda > 0.0) {
        return Err(Error::invalid("sample_product_pair", "need 0 <= s <= t and lambda > 0"));
    }
    let first: f64 = (0..poisson(lambda * s, rng)).map(|_| jump(rng)).product();
    let rest: f64 = (0..poisson(lambda * (t - s), rng)).map(|_| jump(rng)).product();
    Ok((first, first * rest))
}

/// Continued fraction `[X_1; X_2, …, X_n] = X_1 + 1/(X_2 + 1/(… + 1/X_n))`
/// of i.i.d. standard Cauchy variables, folded from the bottom.
#[derive(Debug, Clone, Copy)]
pub struct CauchyFraction {
    depth: u32,
    cauchy: Cauchy<f64>,
}

const MAX_REDRAWS: u32 = 64;

impl CauchyFraction {
    pub fn new(depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::invalid("CauchyFraction", "depth must be >= 1"));
        }
        Ok(CauchyFraction {
            depth,
            cauchy: Cauchy::new(0.0, 1.0).expect("unit scale"),
        })
    }

    /// One draw; a denominator that is exactly zero is redrawn, and
    /// [`Error::DivisionUnderflow`] is returned only if that keeps happening.
    pub fn try_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let mut v = self.cauchy.sample(rng);
        for _ in 1..self.depth {
            let mut redraws = 0;
            while v == 0.0 {
                if redraws == MAX_REDRAWS {
                    return Err(Error::DivisionUnderflow { op: "sample_cfrac" });
                }
                v = self.cauchy.sample(rng);
                redraws += 1;
            }
            v = self.cauchy.sample(rng) + v.recip();
        }
        Ok(v)
    }
}

impl Distribution<f64> for CauchyFraction {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.try_sample(rng).expect("repeated exact zero from a continuous law")
    }
}

pub fn sample_cfrac<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<f64> {
    CauchyFraction::new(n)?.try_sample(rng)
}
