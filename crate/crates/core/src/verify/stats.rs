//! Empirical summaries and distances between empirical and exact laws.

use crate::error::{Error, Result};
use crate::laws::PmfTable;

/// Counts of integer samples on `offset, offset + 1, …`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Histogram {
    pub offset: i64,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn from_samples(samples: &[i64]) -> Self {
        let (Some(&lo), Some(&hi)) = (samples.iter().min(), samples.iter().max()) else {
            return Histogram::default();
        };
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for &x in samples {
            counts[(x - lo) as usize] += 1;
        }
        Histogram {
            offset: lo,
            counts,
            total: samples.len() as u64,
        }
    }

    pub fn count(&self, k: i64) -> u64 {
        if k < self.offset {
            return 0;
        }
        self.counts.get((k - self.offset) as usize).copied().unwrap_or(0)
    }

    pub fn freq(&self, k: i64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(k) as f64 / self.total as f64
        }
    }

    fn end(&self) -> i64 {
        self.offset + self.counts.len() as i64
    }

    /// Empirical mass outside `[lo, hi)`.
    fn mass_outside(&self, lo: i64, hi: i64) -> f64 {
        let inside: u64 = (lo.max(self.offset)..hi.min(self.end())).map(|k| self.count(k)).sum();
        if self.total == 0 {
            0.0
        } else {
            (self.total - inside) as f64 / self.total as f64
        }
    }
}

/// Total variation between a histogram and a truncated law. The mass the
/// table leaves out (`tail_bound`, above its last entry) and the empirical
/// mass outside the table are compared as one pooled cell.
pub fn tv_distance(empirical: &Histogram, exact: &PmfTable) -> f64 {
    let (lo, hi) = (exact.offset, exact.end());
    let mut s = 0.0;
    for k in lo..hi {
        s += (empirical.freq(k) - exact.prob(k)).abs();
    }
    let below: f64 = (empirical.offset..lo.min(empirical.end())).map(|k| empirical.freq(k)).sum();
    let beyond = empirical.mass_outside(lo, hi) - below;
    0.5 * (s + below + (beyond - exact.tail_bound).abs())
}

/// Total variation between two histograms.
pub fn tv_between(a: &Histogram, b: &Histogram) -> f64 {
    let lo = a.offset.min(b.offset);
    let hi = a.end().max(b.end());
    0.5 * (lo..hi).map(|k| (a.freq(k) - b.freq(k)).abs()).sum::<f64>()
}

/// Expected TV for `n` multinomial draws from `probs`, bounded by
/// `½ Σ √(p(1−p)/n)`.
pub fn tv_noise_bound(exact: &PmfTable, n: usize) -> f64 {
    let n = n as f64;
    let t = exact.tail_bound;
    let cell = |p: f64| (p * (1.0 - p) / n).sqrt();
    0.5 * (exact.probs.iter().map(|&p| cell(p)).sum::<f64>() + cell(t))
}

/// Smallest expected count per χ² cell.
const MIN_EXPECTED: f64 = 5.0;

/// Pearson statistic and degrees of freedom. Cells are merged left to right
/// until each expects at least five counts; the excess over the table is the
/// last cell.
pub fn chi2(empirical: &Histogram, exact: &PmfTable) -> (f64, usize) {
    let n = empirical.total as f64;
    let (lo, hi) = (exact.offset, exact.end());
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for k in lo..hi {
        o += empirical.count(k) as f64;
        e += exact.prob(k) * n;
        if e >= MIN_EXPECTED {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    o += empirical.mass_outside(lo, hi) * n;
    e += exact.tail_bound * n;
    match cells.last_mut() {
        Some(last) if e < MIN_EXPECTED => {
            last.0 += o;
            last.1 += e;
        }
        _ => cells.push((o, e)),
    }
    let stat = cells.iter().filter(|c| c.1 > 0.0).map(|&(o, e)| (o - e) * (o - e) / e).sum();
    (stat, cells.len().saturating_sub(1))
}

/// Two-sample χ² statistic on merged cells and its degrees of freedom.
pub fn chi2_between(a: &Histogram, b: &Histogram) -> (f64, usize) {
    let (na, nb) = (a.total as f64, b.total as f64);
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let lo = a.offset.min(b.offset);
    let hi = a.end().max(b.end());
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut x, mut y) = (0.0, 0.0);
    for k in lo..hi {
        x += a.count(k) as f64;
        y += b.count(k) as f64;
        if x + y >= 2.0 * MIN_EXPECTED {
            cells.push((x, y));
            x = 0.0;
            y = 0.0;
        }
    }
    if x + y > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += x;
                last.1 += y;
            }
            None => cells.push((x, y)),
        }
    }
    let stat = cells
        .iter()
        .map(|&(x, y)| (ka * x - kb * y).powi(2) / (x + y))
        .sum();
    (stat, cells.len().saturating_sub(1))
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
/// `+∞` entries stand for mass beyond every finite point.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = if x.is_finite() { cdf(x) } else { 1.0 };
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Sample mean and its standard error.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let v = values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Sample variance and its large-sample standard error
/// `√((m₄ − s⁴)/n)`.
pub fn variance_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in values {
        let d = (x - m) * (x - m);
        m2 += d;
        m4 += d * d;
    }
    let var = m2 / (n - 1.0);
    let m4 = m4 / n;
    (var, ((m4 - var * var).max(0.0) / n).sqrt())
}

/// Maximum-likelihood scale of a centred Cauchy sample: the root of
/// `Σ b²/(x_i² + b²) = n/2`, found by bisection in `ln b`.
pub fn cauchy_scale_mle(samples: &[f64]) -> Result<f64> {
    let op = "cauchy_scale_mle";
    if samples.len() < 100 {
        return Err(Error::invalid(op, "need at least 100 samples"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(op, "samples must be finite"));
    }
    let half = samples.len() as f64 / 2.0;
    let squares: Vec<f64> = samples.iter().map(|x| x * x).collect();
    let excess = |b: f64| {
        let b2 = b * b;
        squares.iter().map(|&x2| b2 / (x2 + b2)).sum::<f64>() - half
    };

    let mut abs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let start = abs[abs.len() / 2].max(f64::MIN_POSITIVE.sqrt());
    let (mut lo, mut hi) = (start, start);
    for _ in 0..2000 {
        if excess(lo) < 0.0 {
            break;
        }
        lo /= 2.0;
    }
    for _ in 0..2000 {
        if excess(hi) > 0.0 {
            break;
        }
        hi *= 2.0;
    }
    if !(excess(lo) < 0.0 && excess(hi) > 0.0) {
        return Err(Error::NoConvergence { op });
    }
    while hi / lo - 1.0 > 4.0 * f64::EPSILON {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `E e^{−μX}`
    Laplace(f64),
    /// `E |X|^{η−1}`
    Mellin(f64),
    /// `E cos(βX)`
    Charfn(f64),
}

impl Transform {
    pub fn kernel(&self, x: f64) -> f64 {
        match *self {
            Transform::Laplace(mu) => (-mu * x).exp(),
            Transform::Mellin(eta) => x.abs().powf(eta - 1.0),
            Transform::Charfn(beta) => (beta * x).cos(),
        }
    }
}

/// Sample average of the transform kernel.
pub fn empirical_transform(samples: &[f64], kind: Transform) -> f64 {
    samples.iter().map(|&x| kind.kernel(x)).sum::<f64>() / samples.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;
    use crate::specfun::poisson_pmf;
    use rand_distr::{Cauchy, Distribution, Poisson};

    fn poisson_table(mean: f64) -> PmfTable {
        PmfTable::tabulate(0, 200, 1e-15, |k| Ok(poisson_pmf(k as u64, mean))).unwrap()
    }

    #[test]
    fn tv_edge_cases() {
        let exact = PmfTable::new(0, vec![0.25, 0.5, 0.25], 0.0).unwrap();
        let same = Histogram::from_samples(&[0, 1, 1, 2]);
        assert_eq!(tv_distance(&same, &exact), 0.0);
        let far = Histogram::from_samples(&[7, 9, 9]);
        assert_eq!(tv_distance(&far, &exact), 1.0);
        let below = Histogram::from_samples(&[-3, -1]);
        assert_eq!(tv_distance(&below, &exact), 1.0);
        assert_eq!(tv_between(&same, &same), 0.0);
        assert_eq!(tv_between(&same, &far), 1.0);
        // a tail cell matching the table's missing mass costs nothing
        let cut = PmfTable::new(0, vec![0.5], 0.5).unwrap();
        assert_eq!(tv_distance(&Histogram::from_samples(&[0, 4]), &cut), 0.0);
    }

    #[test]
    fn poisson_tv_is_small() {
        let mut rng = RngStream::new(1, 0);
        let d = Poisson::new(1.0).unwrap();
        let v: Vec<i64> = (0..1_000_000).map(|_| d.sample(&mut rng) as i64).collect();
        let h = Histogram::from_samples(&v);
        let exact = poisson_table(1.0);
        let tv = tv_distance(&h, &exact);
        assert!(tv < 0.003, "{tv}");
        assert!(tv < 3.0 * tv_noise_bound(&exact, v.len()));
        let (c, df) = chi2(&h, &exact);
        assert!(df >= 5 && c < df as f64 + 6.0 * (2.0 * df as f64).sqrt(), "{c} on {df}");
        let half = Histogram::from_samples(&v[..500_000]);
        let other = Histogram::from_samples(&v[500_000..]);
        let (c, df) = chi2_between(&half, &other);
        assert!(c < df as f64 + 6.0 * (2.0 * df as f64).sqrt(), "{c} on {df}");
    }

    #[test]
    fn cauchy_mle() {
        let two_point: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 2.5 } else { -2.5 }).collect();
        assert!((cauchy_scale_mle(&two_point).unwrap() - 2.5).abs() < 1e-13);
        assert!(cauchy_scale_mle(&two_point[..50]).is_err());
        assert!(cauchy_scale_mle(&vec![0.0; 200]).is_err());

        let mut rng = RngStream::new(2, 0);
        let c = Cauchy::new(0.0, 1.0).unwrap();
        let v: Vec<f64> = (0..1_000_000).map(|_| c.sample(&mut rng)).collect();
        let b = cauchy_scale_mle(&v).unwrap();
        assert!((b - 1.0).abs() < 0.005, "{b}");
    }

    #[test]
    fn transforms() {
        let ones = vec![1.0; 10];
        for eta in [0.5, 2.0, 3.7] {
            assert_eq!(empirical_transform(&ones, Transform::Mellin(eta)), 1.0);
        }
        assert_eq!(empirical_transform(&[0.0, 0.0], Transform::Mellin(1.0)), 1.0);
        assert_eq!(empirical_transform(&[0.0], Transform::Laplace(3.0)), 1.0);
        assert_eq!(empirical_transform(&[0.0], Transform::Charfn(3.0)), 1.0);
    }

    #[test]
    fn moment_errors() {
        let v: Vec<f64> = (0..1000).map(|i| (i % 2) as f64).collect();
        let (m, se) = mean_se(&v);
        assert_eq!(m, 0.5);
        assert!((se - (0.25f64 * 1000.0 / 999.0 / 1000.0).sqrt()).abs() < 1e-15);
        let (var, _) = variance_se(&v);
        assert!((var - 0.25 * 1000.0 / 999.0).abs() < 1e-15);
    }

    #[test]
    fn ks_uniform() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!((ks_distance(&v, |x| x) - 0.0005).abs() < 1e-12);
        assert_eq!(ks_distance(&[f64::INFINITY, f64::INFINITY], |_| 0.0), 1.0);
    }
}
