//! Exact laws, generating functions, transforms and moments of the composed
//! processes. These are the analytic oracles the samplers are checked against.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

mod birth;
mod cfrac;
mod cut;
mod fractional;
mod iterated;
mod products;

pub use birth::*;
pub use cfrac::*;
pub use fractional::*;
pub use iterated::*;
pub use products::*;

/// Threshold on `max |term| / |result|` above which an alternating finite sum
/// is reported as [`Error::PrecisionLoss`].
pub const ALTERNATING_LOSS_LIMIT: f64 = 1e8;

/// Rates and horizon of a two-level composition `N_α(inner(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionParams {
    pub lambda_alpha: f64,
    pub lambda_beta: f64,
    pub nu: f64,
    pub t: f64,
}

impl CompositionParams {
    pub fn new(lambda_alpha: f64, lambda_beta: f64, nu: f64, t: f64) -> Result<Self> {
        let op = "CompositionParams";
        if !(lambda_alpha > 0.0 && lambda_alpha.is_finite()) {
            return Err(Error::invalid(op, format!("lambda_alpha = {lambda_alpha} must be positive")));
        }
        if !(lambda_beta > 0.0 && lambda_beta.is_finite()) {
            return Err(Error::invalid(op, format!("lambda_beta = {lambda_beta} must be positive")));
        }
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::invalid(op, format!("nu = {nu} outside (0, 1]")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid(op, format!("t = {t} must be >= 0")));
        }
        Ok(CompositionParams {
            lambda_alpha,
            lambda_beta,
            nu,
            t,
        })
    }

    /// Classical (`nu = 1`) parameters.
    pub fn classical(lambda_alpha: f64, lambda_beta: f64, t: f64) -> Result<Self> {
        Self::new(lambda_alpha, lambda_beta, 1.0, t)
    }

    /// `λβ / λα^ν`, the single scale on which laws of `N_α(τ_k^ν)` depend.
    pub fn linnik_scale(&self) -> f64 {
        self.lambda_beta / self.lambda_alpha.powf(self.nu)
    }
}

type TimeMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Intensity `λ(t)` of a non-homogeneous Poisson process together with its
/// integral `Λ(t)` and an upper bound used for thinning.
#[derive(Clone)]
pub struct RateFunction {
    rate: TimeMap,
    cumulative: TimeMap,
    sup_bound: f64,
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateFunction")
            .field("sup_bound", &self.sup_bound)
            .finish_non_exhaustive()
    }
}

impl RateFunction {
    pub fn new<R, C>(rate: R, cumulative: C, sup_bound: f64) -> Result<Self>
    where
        R: Fn(f64) -> f64 + Send + Sync + 'static,
        C: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(sup_bound > 0.0 && sup_bound.is_finite()) {
            return Err(Error::invalid("RateFunction", "sup_bound must be positive and finite"));
        }
        Ok(RateFunction {
            rate: Arc::new(rate),
            cumulative: Arc::new(cumulative),
            sup_bound,
        })
    }

    pub fn constant(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("RateFunction", "rate must be >= 0"));
        }
        Self::new(move |_| lambda, move |t| lambda * t, lambda.max(f64::MIN_POSITIVE))
    }

    /// `λ(w) = a + b w` on `[0, horizon]`.
    pub fn linear(a: f64, b: f64, horizon: f64) -> Result<Self> {
        if a < 0.0 || a + b * horizon < 0.0 {
            return Err(Error::invalid("RateFunction", "linear rate must stay >= 0 on the horizon"));
        }
        let bound = a.max(a + b * horizon).max(f64::MIN_POSITIVE);
        Self::new(move |w| a + b * w, move |t| a * t + 0.5 * b * t * t, bound)
    }

    pub fn rate(&self, t: f64) -> f64 {
        (self.rate)(t)
    }

    pub fn cumulative(&self, t: f64) -> f64 {
        (self.cumulative)(t)
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }
}

/// Distinct positive birth rates `λ_1, …, λ_K` of a nonlinear birth process.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthRates {
    rates: Vec<f64>,
}

impl BirthRates {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::invalid("BirthRates", "need at least one rate"));
        }
        if rates.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::invalid("BirthRates", "rates must be positive"));
        }
        for i in 0..rates.len() {
            for j in 0..i {
                let (a, b) = (rates[i], rates[j]);
                if (a - b).abs() <= 1e-12 * a.max(b) {
                    return Err(Error::DegenerateRates {
                        op: "BirthRates",
                        a: b,
                        b: a,
                    });
                }
            }
        }
        Ok(BirthRates { rates })
    }

    /// Linear rates `λ_j = j λ` for `j = 1..=k`.
    pub fn linear(lambda: f64, k: usize) -> Result<Self> {
        Self::new((1..=k).map(|j| j as f64 * lambda).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }
}

/// Truncated probability mass function on `offset, offset + 1, …`.
///
/// `tail_bound` is the mass not represented in `probs`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    pub offset: i64,
    pub probs: Vec<f64>,
    pub tail_bound: f64,
}

/// See [`PmfTable::tabulate`].
const NEGLIGIBLE_TERM: f64 = 1e-6;

impl PmfTable {
    pub fn new(offset: i64, probs: Vec<f64>, tail_bound: f64) -> Result<Self> {
        if probs.iter().any(|&p| !(-1e-15..=1.0 + 1e-12).contains(&p) || p.is_nan()) {
            return Err(Error::invalid("PmfTable", "probabilities must lie in [0, 1]"));
        }
        if !(tail_bound >= 0.0) {
            return Err(Error::invalid("PmfTable", "tail bound must be >= 0"));
        }
        let probs = probs.into_iter().map(|p| p.max(0.0)).collect();
        Ok(PmfTable {
            offset,
            probs,
            tail_bound,
        })
    }

    /// Tabulates `f(offset), f(offset + 1), …` until the missing mass
    /// `1 − Σ` drops below `tail_tol` or `max_len` entries are stored. Also
    /// stops once half the mass is stored and a term falls below
    /// `1e-6 · tail_tol`; the remaining deficit is then rounding error.
    pub fn tabulate<F>(offset: i64, max_len: usize, tail_tol: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(i64) -> Result<f64>,
    {
        let mut probs = Vec::new();
        let mut total = 0.0;
        for i in 0..max_len {
            let p = f(offset + i as i64)?;
            probs.push(p);
            total += p;
            if i > 0 && (1.0 - total < tail_tol || (total > 0.5 && p < NEGLIGIBLE_TERM * tail_tol)) {
                break;
            }
        }
        Self::new(offset, probs, (1.0 - total).max(0.0))
    }

    pub fn prob(&self, k: i64) -> f64 {
        if k < self.offset {
            return 0.0;
        }
        self.probs.get((k - self.offset) as usize).copied().unwrap_or(0.0)
    }

    /// One past the largest tabulated support point.
    pub fn end(&self) -> i64 {
        self.offset + self.probs.len() as i64
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Σ u^k p_k` over the table.
    pub fn pgf(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &p in self.probs.iter().rev() {
            acc = acc * u + p;
        }
        acc * u.powi(self.offset as i32)
    }

    /// Mean and variance of the tabulated part.
    pub fn moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            let k = (self.offset + i as i64) as f64;
            m1 += k * p;
            m2 += k * k * p;
        }
        (m1, m2 - m1 * m1)
    }
}

/// Law of an integer jump, summarized by its pgf and first two moments.
#[derive(Clone)]
pub struct JumpLaw {
    pgf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub mean: f64,
    pub second_moment: f64,
}

impl fmt::Debug for JumpLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JumpLaw")
            .field("mean", &self.mean)
            .field("second_moment", &self.second_moment)
            .finish_non_exhaustive()
    }
}

impl JumpLaw {
    pub fn new<G>(pgf: G, mean: f64, second_moment: f64) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        JumpLaw {
            pgf: Arc::new(pgf),
            mean,
            second_moment,
        }
    }

    pub fn poisson(lambda: f64) -> Self {
        Self::new(move |u| (lambda * (u - 1.0)).exp(), lambda, lambda + lambda * lambda)
    }

    /// Logarithmic law `P(r) = −q^r / (r ln(1 − q))`, `r ≥ 1`.
    pub fn logarithmic(q: f64) -> Self {
        let l = (-q).ln_1p();
        let mean = -q / ((1.0 - q) * l);
        let second = -q / ((1.0 - q) * (1.0 - q) * l);
        Self::new(move |u| (-q * u).ln_1p() / l, mean, second)
    }

    pub fn bernoulli(p: f64) -> Self {
        Self::new(move |u| 1.0 - p + p * u, p, p)
    }

    pub fn pgf(&self, u: f64) -> f64 {
        (self.pgf)(u)
    }

    pub fn variance(&self) -> f64 {
        self.second_moment - self.mean * self.mean
    }
}

/// Mean and variance of `X_1 + … + X_N` by Wald's identities.
pub fn random_sum_moments(count_mean: f64, count_var: f64, jump: &JumpLaw) -> (f64, f64) {
    let mean = count_mean * jump.mean;
    let var = count_mean * jump.variance() + count_var * jump.mean * jump.mean;
    (mean, var)
}

/// Sums `terms` and rejects the result if cancellation amplified rounding
/// error beyond [`ALTERNATING_LOSS_LIMIT`].
pub(crate) fn guarded_sum(op: &'static str, terms: impl IntoIterator<Item = f64>) -> Result<f64> {
    guarded_sum_within(op, terms, ALTERNATING_LOSS_LIMIT)
}

pub(crate) fn guarded_sum_within(
    op: &'static str,
    terms: impl IntoIterator<Item = f64>,
    limit: f64,
) -> Result<f64> {
    let mut sum = crate::specfun::NeumaierSum::new();
    let mut max_abs: f64 = 0.0;
    for t in terms {
        max_abs = max_abs.max(t.abs());
        sum.add(t);
    }
    let v = sum.value();
    if max_abs == 0.0 {
        return Ok(0.0);
    }
    let ratio = max_abs / v.abs();
    if !(ratio <= limit) {
        return Err(Error::PrecisionLoss { op, ratio });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(CompositionParams::new(1.0, 1.0, 0.5, 1.0).is_ok());
        assert!(CompositionParams::new(0.0, 1.0, 0.5, 1.0).is_err());
        assert!(CompositionParams::new(1.0, 1.0, 1.2, 1.0).is_err());
        assert!(CompositionParams::new(1.0, 1.0, 0.5, -1.0).is_err());
    }

    #[test]
    fn birth_rates_reject_ties() {
        assert!(matches!(
            BirthRates::new(vec![1.0, 2.0, 1.0]),
            Err(Error::DegenerateRates { .. })
        ));
        assert_eq!(BirthRates::linear(0.5, 3).unwrap().as_slice(), &[0.5, 1.0, 1.5]);
    }

    #[test]
    fn linear_rate_cumulative() {
        let rf = RateFunction::linear(0.0, 2.0, 1.0).unwrap();
        assert_eq!(rf.cumulative(1.0), 1.0);
        assert_eq!(rf.sup_bound(), 2.0);
    }

    #[test]
    fn table_helpers() {
        let t = PmfTable::new(1, vec![0.5, 0.25, 0.25], 0.0).unwrap();
        assert_eq!(t.prob(0), 0.0);
        assert_eq!(t.prob(2), 0.25);
        assert_eq!(t.end(), 4);
        assert!((t.pgf(1.0) - 1.0).abs() < 1e-15);
        assert!((t.pgf(0.5) - (0.25 + 0.0625 + 0.03125)).abs() < 1e-15);
        let (m, v) = t.moments();
        assert!((m - 1.75).abs() < 1e-15);
        assert!((v - (0.5 + 1.0 + 2.25 - 1.75 * 1.75)).abs() < 1e-14);
    }

    #[test]
    fn logarithmic_jump_moments() {
        let j = JumpLaw::logarithmic(0.5);
        let l = std::f64::consts::LN_2;
        assert!((j.mean - 0.5 / (0.5 * l)).abs() < 1e-14);
        assert!((j.pgf(1.0) - 1.0).abs() < 1e-15);
        assert!(j.pgf(0.0).abs() < 1e-15);
    }
}
