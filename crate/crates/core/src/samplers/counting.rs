use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::{JumpPath, PositiveStable};
use crate::error::{Error, Result};
use crate::laws::RateFunction;

fn check_rate(op: &'static str, lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(op, format!("rate {lambda} must be positive")))
    }
}

fn check_time(op: &'static str, t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(op, format!("time {t} must be finite and >= 0")))
    }
}

fn check_nu(op: &'static str, nu: f64) -> Result<()> {
    if nu > 0.0 && nu <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(op, format!("nu = {nu} outside (0, 1]")))
    }
}

/// Poisson draw that accepts a zero mean.
pub(crate) fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
}

pub fn sample_poisson_count<R: Rng + ?Sized>(lambda: f64, t: f64, rng: &mut R) -> Result<u64> {
    check_rate("sample_poisson_count", lambda)?;
    check_time("sample_poisson_count", t)?;
    Ok(poisson(lambda * t, rng))
}

/// Jump times of a rate-`λ` Poisson process on `[0, t]`.
pub fn sample_poisson_path<R: Rng + ?Sized>(lambda: f64, t: f64, rng: &mut R) -> Result<JumpPath> {
    check_rate("sample_poisson_path", lambda)?;
    check_time("sample_poisson_path", t)?;
    let mut path = JumpPath::empty(0);
    let mut s = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        s += gap / lambda;
        if s > t {
            return Ok(path);
        }
        path.times.push(s);
        path.levels.push(path.levels.len() as i64 + 1);
    }
}

/// Non-homogeneous Poisson path on `[0, t]` by thinning a rate
/// `rf.sup_bound()` process.
pub fn sample_nonhom_poisson<R: Rng + ?Sized>(rf: &RateFunction, t: f64, rng: &mut R) -> Result<JumpPath> {
    let op = "sample_nonhom_poisson";
    check_time(op, t)?;
    let bound = rf.sup_bound();
    let mut path = JumpPath::empty(0);
    let mut s = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        s += gap / bound;
        if s > t {
            return Ok(path);
        }
        let rate = rf.rate(s);
        if rate > bound * (1.0 + 1e-12) {
            return Err(Error::InvalidBound { op, time: s, rate, bound });
        }
        if rng.random::<f64>() * bound < rate {
            path.times.push(s);
            path.levels.push(path.levels.len() as i64 + 1);
        }
    }
}

/// Waiting time with survival `E_{ν,1}(−λ s^ν)`, drawn as
/// `(E/λ)^{1/ν} S` with `S` one-sided stable; exponential at `ν = 1`.
#[derive(Debug, Clone, Copy)]
pub struct MlWaitingTime {
    nu: f64,
    lambda: f64,
    stable: Option<PositiveStable>,
}

impl MlWaitingTime {
    pub fn new(nu: f64, lambda: f64) -> Result<Self> {
        check_nu("MlWaitingTime", nu)?;
        check_rate("MlWaitingTime", lambda)?;
        let stable = if nu < 1.0 { Some(PositiveStable::new(nu)?) } else { None };
        Ok(MlWaitingTime { nu, lambda, stable })
    }
}

impl Distribution<f64> for MlWaitingTime {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = rng.sample(Exp1);
        match self.stable {
            None => e / self.lambda,
            Some(s) => (e / self.lambda).powf(1.0 / self.nu) * s.sample(rng),
        }
    }
}

pub fn sample_ml_waiting_time<R: Rng + ?Sized>(nu: f64, lambda: f64, rng: &mut R) -> Result<f64> {
    Ok(MlWaitingTime::new(nu, lambda)?.sample(rng))
}

/// `τ_k^ν`, the sum of `k` independent Mittag–Leffler waits.
#[derive(Debug, Clone, Copy)]
pub struct Tau {
    k: u32,
    wait: MlWaitingTime,
}

impl Tau {
    pub fn new(k: u32, nu: f64, lambda_beta: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("Tau", "k must be >= 1"));
        }
        Ok(Tau {
            k,
            wait: MlWaitingTime::new(nu, lambda_beta)?,
        })
    }
}

impl Distribution<f64> for Tau {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        (0..self.k).map(|_| self.wait.sample(rng)).sum()
    }
}

pub fn sample_tau<R: Rng + ?Sized>(k: u32, nu: f64, lambda_beta: f64, rng: &mut R) -> Result<f64> {
    Ok(Tau::new(k, nu, lambda_beta)?.sample(rng))
}

/// Renewal count on `[0, t]` with Mittag–Leffler interarrival times.
#[derive(Debug, Clone, Copy)]
pub struct FracPoissonCount {
    t: f64,
    wait: MlWaitingTime,
}

impl FracPoissonCount {
    pub fn new(t: f64, nu: f64, lambda_beta: f64) -> Result<Self> {
        check_time("FracPoissonCount", t)?;
        Ok(FracPoissonCount {
            t,
            wait: MlWaitingTime::new(nu, lambda_beta)?,
        })
    }
}

impl Distribution<u64> for FracPoissonCount {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut n = 0;
        let mut s = self.wait.sample(rng);
        while s <= self.t {
            n += 1;
            s += self.wait.sample(rng);
        }
        n
    }
}

pub fn sample_frac_poisson_count<R: Rng + ?Sized>(t: f64, nu: f64, lambda_beta: f64, rng: &mut R) -> Result<u64> {
    Ok(FracPoissonCount::new(t, nu, lambda_beta)?.sample(rng))
}

/// `X_1 + … + X_N` with `N` from `count` and i.i.d. `X_j` from `jump`.
pub fn sample_random_sum<R, C, J>(mut count: C, mut jump: J, rng: &mut R) -> i64
where
    R: Rng + ?Sized,
    C: FnMut(&mut R) -> u64,
    J: FnMut(&mut R) -> i64,
{
    let n = count(rng);
    (0..n).map(|_| jump(rng)).sum()
}

/// Evaluates an independent rate-`outer_rate` Poisson process at the levels
/// of `inner`. The result jumps only at jump times of `inner`, and only when
/// the outer increment is nonzero.
pub fn sample_composition_path<R: Rng + ?Sized>(outer_rate: f64, inner: &JumpPath, rng: &mut R) -> Result<JumpPath> {
    check_rate("sample_composition_path", outer_rate)?;
    if inner.origin_level < 0 {
        return Err(Error::invalid("sample_composition_path", "inner path must be a counting path"));
    }
    let mut level = poisson(outer_rate * inner.origin_level as f64, rng) as i64;
    let mut out = JumpPath::empty(level);
    let mut prev = inner.origin_level;
    for (&s, &l) in inner.times.iter().zip(&inner.levels) {
        if l < prev {
            return Err(Error::invalid("sample_composition_path", "inner path must be non-decreasing"));
        }
        let inc = poisson(outer_rate * (l - prev) as f64, rng) as i64;
        prev = l;
        if inc > 0 {
            level += inc;
            out.times.push(s);
            out.levels.push(level);
        }
    }
    Ok(out)
}

/// Discrete Mittag–Leffler count: Poisson(`λα s`) at a Mittag–Leffler time.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteMl {
    lambda_alpha: f64,
    wait: MlWaitingTime,
}

impl DiscreteMl {
    pub fn new(nu: f64, lambda_alpha: f64, lambda_beta: f64) -> Result<Self> {
        check_rate("DiscreteMl", lambda_alpha)?;
        Ok(DiscreteMl {
            lambda_alpha,
            wait: MlWaitingTime::new(nu, lambda_beta)?,
        })
    }
}

impl Distribution<u64> for DiscreteMl {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let s = self.wait.sample(rng);
        poisson(self.lambda_alpha * s, rng)
    }
}

pub fn sample_dml<R: Rng + ?Sized>(nu: f64, lambda_alpha: f64, lambda_beta: f64, rng: &mut R) -> Result<u64> {
    Ok(DiscreteMl::new(nu, lambda_alpha, lambda_beta)?.sample(rng))
}

/// Population of a Yule process started from one individual: geometric on
/// `{1, 2, …}` with success probability `e^{−λt}`, drawn by inversion so the
/// cost does not grow with `t`. Saturates at `u64::MAX`.
#[derive(Debug, Clone, Copy)]
pub struct YuleCount {
    /// `ln(1 − e^{−λt})`
    ln_failure: f64,
}

impl YuleCount {
    pub fn new(lambda: f64, t: f64) -> Result<Self> {
        check_rate("YuleCount", lambda)?;
        check_time("YuleCount", t)?;
        Ok(YuleCount {
            ln_failure: (-(-lambda * t).exp()).ln_1p(),
        })
    }
}

impl Distribution<u64> for YuleCount {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.ln_failure == f64::NEG_INFINITY {
            return 1;
        }
        let u: f64 = rng.sample(Open01);
        ((u.ln() / self.ln_failure).floor() as u64).saturating_add(1)
    }
}

pub fn sample_yule_count<R: Rng + ?Sized>(lambda: f64, t: f64, rng: &mut R) -> Result<u64> {
    Ok(YuleCount::new(lambda, t)?.sample(rng))
}

/// Logarithmic law `P(X = r) = −q^r / (r ln(1−q))` as a geometric mixture:
/// given `Y = 1 − (1−q)^U`, `X` is geometric on `{1, 2, …}` with ratio `Y`.
#[derive(Debug, Clone, Copy)]
pub struct Logarithmic {
    ln_one_minus_q: f64,
}

impl Logarithmic {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid("Logarithmic", "q outside (0, 1)"));
        }
        Ok(Logarithmic {
            ln_one_minus_q: (-q).ln_1p(),
        })
    }
}

impl Distribution<u64> for Logarithmic {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.sample(Open01);
        let v: f64 = rng.sample(Open01);
        let ln_y = (-(self.ln_one_minus_q * u).exp_m1()).ln();
        let x = 1.0 + (v.ln() / ln_y).floor();
        if x >= u64::MAX as f64 {
            u64::MAX
        } else {
            x as u64
        }
    }
}

pub fn sample_logarithmic<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Result<u64> {
    Ok(Logarithmic::new(q)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{logarithmic_pmf, tau_laplace};
    use crate::samplers::RngStream;
    use crate::specfun::{mittag_leffler, MlArgs, SeriesAccuracy};

    const N: usize = 200_000;

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn frac(v: &[u64], pred: impl Fn(u64) -> bool) -> f64 {
        v.iter().filter(|&&x| pred(x)).count() as f64 / v.len() as f64
    }

    #[test]
    fn poisson_counts() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(sample_poisson_count(2.0, 0.0, &mut rng).unwrap(), 0);
        let v: Vec<u64> = (0..N).map(|_| sample_poisson_count(1.0, 1.0, &mut rng).unwrap()).collect();
        let m = v.iter().sum::<u64>() as f64 / N as f64;
        assert!((m - 1.0).abs() < 0.01);
        assert!((frac(&v, |x| x == 0) - (-1.0f64).exp()).abs() < 0.004);
    }

    #[test]
    fn thinning() {
        let mut rng = RngStream::new(2, 0);
        let rf = RateFunction::linear(0.0, 2.0, 1.0).unwrap();
        let counts: Vec<f64> = (0..N)
            .map(|_| sample_nonhom_poisson(&rf, 1.0, &mut rng).unwrap().len() as f64)
            .collect();
        assert!((mean(&counts) - 1.0).abs() < 0.01);
        let zero = RateFunction::constant(0.0).unwrap();
        assert!(sample_nonhom_poisson(&zero, 5.0, &mut rng).unwrap().is_empty());
        let lying = RateFunction::new(|w| 3.0 * w, |t| 1.5 * t * t, 1.0).unwrap();
        let err = (0..100).find_map(|_| sample_nonhom_poisson(&lying, 2.0, &mut rng).err());
        assert!(matches!(err, Some(Error::InvalidBound { .. })));
    }

    #[test]
    fn ml_wait_survival() {
        let mut rng = RngStream::new(3, 0);
        let w = MlWaitingTime::new(0.5, 1.0).unwrap();
        let v: Vec<f64> = (0..N).map(|_| w.sample(&mut rng)).collect();
        assert!(v.iter().all(|&x| x > 0.0));
        let surv = v.iter().filter(|&&x| x > 1.0).count() as f64 / N as f64;
        assert!((surv - 0.427_584).abs() < 0.004, "{surv}");
        let e = MlWaitingTime::new(1.0, 1.0).unwrap();
        let surv = (0..N).filter(|_| e.sample(&mut rng) > 1.0).count() as f64 / N as f64;
        assert!((surv - (-1.0f64).exp()).abs() < 0.004);
    }

    #[test]
    fn tau_laplace_matches() {
        let mut rng = RngStream::new(4, 0);
        let tau = Tau::new(3, 0.7, 1.3).unwrap();
        let lt = (0..N).map(|_| (-tau.sample(&mut rng)).exp()).sum::<f64>() / N as f64;
        assert!((lt - tau_laplace(3, 1.0, 0.7, 1.3)).abs() < 0.004);
        let erlang = Tau::new(3, 1.0, 2.0).unwrap();
        let v: Vec<f64> = (0..N).map(|_| erlang.sample(&mut rng)).collect();
        assert!((mean(&v) - 1.5).abs() < 0.01);
    }

    #[test]
    fn frac_poisson_zero_probability() {
        let mut rng = RngStream::new(5, 0);
        let c = FracPoissonCount::new(1.0, 0.6, 1.0).unwrap();
        let v: Vec<u64> = (0..N).map(|_| c.sample(&mut rng)).collect();
        let e = mittag_leffler(MlArgs::new(0.6, 1.0, -1.0).unwrap(), SeriesAccuracy::default()).unwrap();
        assert!((frac(&v, |x| x == 0) - e).abs() < 0.004);
        assert_eq!(sample_frac_poisson_count(0.0, 0.6, 1.0, &mut rng).unwrap(), 0);
    }

    #[test]
    fn composition_path_shape() {
        let mut rng = RngStream::new(6, 0);
        let empty = sample_composition_path(1.0, &JumpPath::empty(0), &mut rng).unwrap();
        assert!(empty.is_empty() && empty.terminal() == 0);
        let mut multi = 0;
        let mut jumps = 0;
        for _ in 0..20_000 {
            let inner = sample_poisson_path(1.0, 1.0, &mut rng).unwrap();
            let outer = sample_composition_path(1.0, &inner, &mut rng).unwrap();
            for (s, size) in outer.times.iter().zip(outer.jump_sizes()) {
                assert!(size > 0);
                assert!(inner.times.contains(s));
                jumps += 1;
                if size >= 2 {
                    multi += 1;
                }
            }
        }
        // P(X ≥ 2 | X ≥ 1) for X ~ Poisson(1)
        let want = (1.0 - 2.0 * (-1.0f64).exp()) / (1.0 - (-1.0f64).exp());
        assert!((multi as f64 / jumps as f64 - want).abs() < 0.02);
    }

    #[test]
    fn yule_and_logarithmic() {
        let mut rng = RngStream::new(7, 0);
        let y = YuleCount::new(1.0, 0.5).unwrap();
        let v: Vec<u64> = (0..N).map(|_| y.sample(&mut rng)).collect();
        assert!(v.iter().all(|&x| x >= 1));
        assert!((frac(&v, |x| x == 1) - (-0.5f64).exp()).abs() < 0.004);
        assert_eq!(sample_yule_count(3.0, 0.0, &mut rng).unwrap(), 1);
        let l = Logarithmic::new(0.5).unwrap();
        let v: Vec<u64> = (0..N).map(|_| l.sample(&mut rng)).collect();
        assert!(v.iter().all(|&x| x >= 1));
        for r in 1..5 {
            assert!((frac(&v, |x| x == r as u64) - logarithmic_pmf(r, 0.5)).abs() < 0.004, "r={r}");
        }
    }

    #[test]
    fn random_sum_of_nothing() {
        let mut rng = RngStream::new(8, 0);
        assert_eq!(sample_random_sum(|_| 0, |_| 5, &mut rng), 0);
        assert_eq!(sample_random_sum(|_| 3, |_| 5, &mut rng), 15);
    }
}
