//! The subcommands: exact tables, variate streams and the two experiments.

use clap::{Args, ValueEnum};
use poicomp::field::{first_contact, sample_field, sample_first_contact, subordinated_field_pmf, Region};
use poicomp::laws::*;
use poicomp::samplers::*;
use poicomp::specfun::SeriesAccuracy;
use poicomp::verify::{cauchy_scale_mle, empirical_transform, Transform};
use poicomp::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

/// Parameters shared by `pmf` and `sample`; each law reads only the ones it
/// needs.
#[derive(Args, Debug, Clone)]
pub struct LawParams {
    /// Rate of the outer process
    #[arg(long, default_value_t = 1.0)]
    pub la: f64,
    /// Rate of the inner process
    #[arg(long, default_value_t = 1.0)]
    pub lb: f64,
    /// Fractional order in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Passage level
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Intercept of the linear intensity a + b s
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Slope of the linear intensity a + b s
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    /// Birth rates, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub rates: Vec<f64>,
    /// Bernoulli success probability, or the logarithmic parameter q
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Intensity of the planar field
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// `rect:x0,y0,x1,y1` or `disc:cx,cy,r`
    #[arg(long, default_value = "rect:0,0,1,1", value_parser = parse_region)]
    pub region: Region,
    /// Search radius for first-contact draws
    #[arg(long, default_value_t = 3.0)]
    pub radius: f64,
    /// Continued-fraction depth
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
}

pub fn parse_region(s: &str) -> std::result::Result<Region, String> {
    let (kind, rest) = s.split_once(':').ok_or("expected rect:x0,y0,x1,y1 or disc:cx,cy,r")?;
    let v = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match (kind, v.as_slice()) {
        ("rect", &[x0, y0, x1, y1]) => Region::rectangle(x0, y0, x1, y1),
        ("disc", &[cx, cy, r]) => Region::disc(cx, cy, r),
        _ => return Err("expected rect:x0,y0,x1,y1 or disc:cx,cy,r".into()),
    }
    .map_err(|e| e.to_string())
}

fn acc() -> SeriesAccuracy {
    SeriesAccuracy::default()
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PmfLaw {
    /// N_α(N_β(t))
    Iterated,
    /// N_α(N(t)) with intensity a + b s on [0, t]
    NonhomComposition,
    /// fractional Poisson count at t
    FracPoisson,
    /// N_α at the k-th fractional Poisson arrival
    ComposedTau,
    /// N_α at the fractional linear birth passage time to k
    ComposedPhi,
    /// discrete Mittag-Leffler with c = lb / la^nu
    Dml,
    /// Yule process (rate la) at the k-th fractional Poisson arrival
    YuleTau,
    /// negative binomial with k and success lb / (la + lb)
    Negbin,
    /// fractional linear birth process (rate lb) at t
    LinearBirth,
    /// fractional birth process with the given rates at t
    FracBirth,
    /// time-changed field count on the region
    Field,
}

#[derive(Debug, Clone, Serialize)]
pub struct PmfRow {
    pub k: i64,
    pub p: f64,
    /// Probability of values above `k`, bounded by `1 − Σ_{j≤k} p_j`.
    pub tail_bound: f64,
}

pub fn pmf(law: PmfLaw, q: &LawParams, kmax: Option<u32>, tail_tol: f64) -> Result<Vec<PmfRow>> {
    let composition = || CompositionParams::new(q.la, q.lb, q.nu, q.t);
    let (offset, f): (i64, Box<dyn Fn(u32) -> Result<f64>>) = match law {
        PmfLaw::Iterated => {
            let p = CompositionParams::classical(q.la, q.lb, q.t)?;
            (0, Box::new(move |k| iterated_poisson_pmf(k, &p)))
        }
        PmfLaw::NonhomComposition => {
            let rf = RateFunction::linear(q.a, q.b, q.t)?;
            let (la, t) = (q.la, q.t);
            (0, Box::new(move |k| nonhom_composition_pmf(k, &rf, la, t)))
        }
        PmfLaw::FracPoisson => {
            let (t, nu, lb) = (q.t, q.nu, q.lb);
            (0, Box::new(move |m| frac_poisson_pmf(m, t, nu, lb, acc())))
        }
        PmfLaw::ComposedTau => {
            let (p, k) = (composition()?, q.k);
            (0, Box::new(move |r| composed_tau_pmf(r, k, &p, acc())))
        }
        PmfLaw::ComposedPhi => {
            let (p, k) = (composition()?, q.k);
            (0, Box::new(move |r| composed_phi_pmf(r, k, &p, acc())))
        }
        PmfLaw::Dml => {
            let (nu, c) = (q.nu, composition()?.linnik_scale());
            (0, Box::new(move |r| dml_pmf(r, nu, c, acc())))
        }
        PmfLaw::YuleTau => {
            let (p, k) = (composition()?, q.k);
            (1, Box::new(move |r| yule_tau_pmf(r, k, &p, acc())))
        }
        PmfLaw::Negbin => {
            composition()?;
            let (k, success) = (q.k, q.lb / (q.la + q.lb));
            (0, Box::new(move |r| Ok(negbin_pmf(r, k, success))))
        }
        PmfLaw::LinearBirth => {
            composition()?;
            let (t, nu, lambda) = (q.t, q.nu, q.lb);
            (1, Box::new(move |k| frac_linear_birth_pmf(k, t, nu, lambda, acc())))
        }
        PmfLaw::FracBirth => {
            let rates = BirthRates::new(q.rates.clone())?;
            let (t, nu) = (q.t, q.nu);
            let len = rates.len() as u32;
            (1, Box::new(move |k| if k > len { Ok(0.0) } else { frac_birth_pmf(k as usize, t, nu, &rates, acc()) }))
        }
        PmfLaw::Field => {
            let (region, lambda, la) = (q.region, q.lambda, q.la);
            (0, Box::new(move |k| subordinated_field_pmf(k, &region, lambda, la)))
        }
    };
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter {
            op: "pmf",
            msg: "tail tolerance must lie in (0, 1)".into(),
        });
    }
    let max_len = match kmax {
        Some(m) if (m as i64) < offset => {
            return Err(Error::InvalidParameter {
                op: "pmf",
                msg: format!("kmax must be >= {offset}"),
            })
        }
        Some(m) => (m as i64 - offset + 1) as usize,
        None => 1 << 16,
    };
    let table = PmfTable::tabulate(offset, max_len, tail_tol, |k| f(k as u32))?;
    let mut total = 0.0;
    Ok((offset..table.end())
        .map(|k| {
            let p = table.prob(k);
            total += p;
            PmfRow {
                k,
                p,
                tail_bound: (1.0 - total).max(0.0),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SampleLaw {
    /// Poisson(lb t) count
    Poisson,
    /// N_α(N_β(t)) from simulated paths
    Iterated,
    /// Poisson(lb t) sum of Poisson(la) jumps
    RandomSum,
    /// N_α(N(t)) with intensity a + b s, by thinning
    NonhomComposition,
    /// fractional Poisson count at t
    FracPoisson,
    /// k-th fractional Poisson arrival time
    Tau,
    /// discrete Mittag-Leffler variable
    Dml,
    /// N_α at the k-th fractional Poisson arrival
    ComposedTau,
    /// Yule population (rate lb) at t
    Yule,
    /// fractional linear birth population (rate lb) at t
    LinearBirth,
    /// fractional linear birth passage time to k
    Phi,
    /// logarithmic variable with parameter p
    Logarithmic,
    /// Poisson sum of logarithmic variables (negative binomial)
    PoissonLogarithmic,
    /// Mittag-Leffler waiting time with rate lb
    MlWait,
    /// one-sided stable variable of index nu
    Stable,
    /// continued fraction of standard Cauchy variables
    Cfrac,
    /// time-changed field count on the region
    FieldCount,
    /// distance to the nearest visible field point (empty if none within radius)
    FirstContact,
    /// product of Exp(1) jumps at rate lambda up to t
    ProductExp,
    /// product of Bernoulli(p) jumps
    ProductBernoulli,
    /// product of standard Gaussian jumps
    ProductGaussian,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(untagged)]
pub enum Variate {
    Count(i64),
    Real(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRow {
    pub value: Variate,
}

type Draw = Box<dyn Fn(&mut RngStream) -> Result<Variate> + Sync>;

fn count(x: u64) -> Variate {
    Variate::Count(x.min(i64::MAX as u64) as i64)
}

fn draw(law: SampleLaw, q: &LawParams) -> Result<Draw> {
    let q = q.clone();
    Ok(match law {
        SampleLaw::Poisson => Box::new(move |r| sample_poisson_count(q.lb, q.t, r).map(count)),
        SampleLaw::Iterated => {
            CompositionParams::classical(q.la, q.lb, q.t)?;
            Box::new(move |r| {
                let inner = sample_poisson_path(q.lb, q.t, r)?;
                Ok(Variate::Count(sample_composition_path(q.la, &inner, r)?.terminal()))
            })
        }
        SampleLaw::RandomSum => {
            CompositionParams::classical(q.la, q.lb, q.t)?;
            Box::new(move |r| {
                let n = sample_poisson_count(q.lb, q.t, r)?;
                let mut s = 0u64;
                for _ in 0..n {
                    s = s.saturating_add(sample_poisson_count(q.la, 1.0, r)?);
                }
                Ok(count(s))
            })
        }
        SampleLaw::NonhomComposition => {
            let rf = RateFunction::linear(q.a, q.b, q.t)?;
            Box::new(move |r| {
                let inner = sample_nonhom_poisson(&rf, q.t, r)?;
                Ok(Variate::Count(sample_composition_path(q.la, &inner, r)?.terminal()))
            })
        }
        SampleLaw::FracPoisson => {
            let d = FracPoissonCount::new(q.t, q.nu, q.lb)?;
            Box::new(move |r| Ok(count(d.sample(r))))
        }
        SampleLaw::Tau => {
            let d = Tau::new(q.k, q.nu, q.lb)?;
            Box::new(move |r| Ok(Variate::Real(d.sample(r))))
        }
        SampleLaw::Dml => {
            let d = DiscreteMl::new(q.nu, q.la, q.lb)?;
            Box::new(move |r| Ok(count(d.sample(r))))
        }
        SampleLaw::ComposedTau => {
            let d = Tau::new(q.k, q.nu, q.lb)?;
            CompositionParams::new(q.la, q.lb, q.nu, 1.0)?;
            Box::new(move |r| {
                let s = d.sample(r);
                sample_poisson_count(q.la, s, r).map(count)
            })
        }
        SampleLaw::Yule => {
            let d = YuleCount::new(q.lb, q.t)?;
            Box::new(move |r| Ok(count(d.sample(r))))
        }
        SampleLaw::LinearBirth => {
            CompositionParams::new(q.la, q.lb, q.nu, q.t)?;
            let stable = (q.nu < 1.0).then(|| PositiveStable::new(q.nu)).transpose()?;
            Box::new(move |r| {
                // a classical Yule process run for the time t^ν S^{−ν}
                let time = match &stable {
                    Some(s) => q.t.powf(q.nu) * s.sample(r).powf(-q.nu),
                    None => q.t,
                };
                Ok(count(YuleCount::new(q.lb, time)?.sample(r)))
            })
        }
        SampleLaw::Phi => {
            let d = PhiExact::new(q.k, q.nu, q.lb)?;
            Box::new(move |r| Ok(Variate::Real(d.sample(r))))
        }
        SampleLaw::Logarithmic => {
            let d = Logarithmic::new(q.p)?;
            Box::new(move |r| Ok(count(d.sample(r))))
        }
        SampleLaw::PoissonLogarithmic => {
            CompositionParams::classical(q.la, q.lb, 1.0)?;
            let (mu, ratio) = negbin_decomposition_params(q.k, q.la, q.lb);
            let d = Logarithmic::new(ratio)?;
            Box::new(move |r| {
                let n = sample_poisson_count(mu, 1.0, r)?;
                Ok(count((0..n).fold(0u64, |s, _| s.saturating_add(d.sample(r)))))
            })
        }
        SampleLaw::MlWait => {
            let d = MlWaitingTime::new(q.nu, q.lb)?;
            Box::new(move |r| Ok(Variate::Real(d.sample(r))))
        }
        SampleLaw::Stable => {
            let d = PositiveStable::new(q.nu)?;
            Box::new(move |r| Ok(Variate::Real(d.sample(r))))
        }
        SampleLaw::Cfrac => {
            let d = CauchyFraction::new(q.depth)?;
            Box::new(move |r| d.try_sample(r).map(Variate::Real))
        }
        SampleLaw::FieldCount => {
            let _ = subordinated_field_pmf(0, &q.region, q.lambda, q.la)?;
            Box::new(move |r| {
                let points = sample_field(&q.region, q.lambda, r)?;
                let mut s = 0u64;
                for _ in points {
                    s += sample_poisson_count(q.la, 1.0, r)?;
                }
                Ok(count(s))
            })
        }
        SampleLaw::FirstContact => Box::new(move |r| {
            let d = sample_first_contact(q.radius, q.lambda, q.la, r)?;
            Ok(Variate::Real(d.unwrap_or(f64::INFINITY)))
        }),
        SampleLaw::ProductExp => Box::new(move |r| sample_product(q.t, q.lambda, |r| r.sample(Exp1), r).map(Variate::Real)),
        SampleLaw::ProductBernoulli => {
            if !(0.0..=1.0).contains(&q.p) {
                return Err(Error::InvalidParameter {
                    op: "sample",
                    msg: "p must lie in [0, 1]".into(),
                });
            }
            Box::new(move |r| {
                sample_product(q.t, q.lambda, |r| if r.random::<f64>() < q.p { 1.0 } else { 0.0 }, r).map(Variate::Real)
            })
        }
        SampleLaw::ProductGaussian => Box::new(move |r| {
            sample_product(q.t, q.lambda, |r: &mut RngStream| r.sample::<f64, _>(StandardNormal), r).map(Variate::Real)
        }),
    })
}

pub fn sample(law: SampleLaw, q: &LawParams, n: usize, seed: u64) -> Result<Vec<SampleRow>> {
    let f = draw(law, q)?;
    par_sample(seed, 0, n, |r| f(r).map(|value| SampleRow { value }))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FieldExperiment {
    /// empirical vs exact law of the time-changed count on the region
    Counts,
    /// empirical vs exact first-contact CDF on a grid of distances
    Contact,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountRow {
    pub k: u32,
    pub empirical: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContactRow {
    pub l: f64,
    pub empirical_cdf: f64,
    pub exact_cdf: f64,
    pub exact_density: f64,
}

pub fn field_counts(q: &LawParams, n: usize, seed: u64) -> Result<Vec<CountRow>> {
    let rows = sample(SampleLaw::FieldCount, q, n, seed)?;
    let counts: Vec<u32> = rows
        .iter()
        .map(|r| match r.value {
            Variate::Count(c) => c.min(u32::MAX as i64) as u32,
            Variate::Real(_) => unreachable!("field counts are integers"),
        })
        .collect();
    let kmax = counts.iter().copied().max().unwrap_or(0);
    let mut freq = vec![0usize; kmax as usize + 1];
    for &c in &counts {
        freq[c as usize] += 1;
    }
    freq.iter()
        .enumerate()
        .map(|(k, &f)| {
            Ok(CountRow {
                k: k as u32,
                empirical: f as f64 / n as f64,
                exact: subordinated_field_pmf(k as u32, &q.region, q.lambda, q.la)?,
            })
        })
        .collect()
}

pub fn field_contact(q: &LawParams, n: usize, seed: u64, points: usize) -> Result<Vec<ContactRow>> {
    let rows = sample(SampleLaw::FirstContact, q, n, seed)?;
    let mut d: Vec<f64> = rows
        .iter()
        .map(|r| match r.value {
            Variate::Real(x) => x,
            Variate::Count(_) => unreachable!("distances are real"),
        })
        .collect();
    d.sort_by(f64::total_cmp);
    (0..=points)
        .map(|i| {
            let l = q.radius * i as f64 / points.max(1) as f64;
            let (exact_cdf, exact_density) = first_contact(l, q.lambda, q.la)?;
            Ok(ContactRow {
                l,
                empirical_cdf: d.partition_point(|&x| x <= l) as f64 / n as f64,
                exact_cdf,
                exact_density,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CfracRow {
    pub depth: u32,
    pub n_samples: usize,
    pub scale_mle: f64,
    pub exact_scale: f64,
    pub relative_error: f64,
    pub beta: f64,
    pub charfn_empirical: f64,
    pub charfn_exact: f64,
}

/// Depth `d` draws from streams starting at `d · 2^40`, as the verifier does.
pub fn cfrac(depths: &[u32], n: usize, seed: u64, beta: f64) -> Result<Vec<CfracRow>> {
    depths
        .iter()
        .map(|&depth| {
            let d = CauchyFraction::new(depth)?;
            let draws = par_sample(seed, (depth as u64) << 40, n, |r| d.try_sample(r))
                .into_iter()
                .collect::<Result<Vec<f64>>>()?;
            let scale_mle = cauchy_scale_mle(&draws)?;
            let exact_scale = cfrac_scale(depth as u64)?;
            Ok(CfracRow {
                depth,
                n_samples: n,
                scale_mle,
                exact_scale,
                relative_error: (scale_mle - exact_scale) / exact_scale,
                beta,
                charfn_empirical: empirical_transform(&draws, Transform::Charfn(beta)),
                charfn_exact: (-beta.abs() * exact_scale).exp(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct P {
        #[command(flatten)]
        q: LawParams,
    }

    fn params(args: &[&str]) -> LawParams {
        P::parse_from(std::iter::once("x").chain(args.iter().copied())).q
    }

    #[test]
    fn regions() {
        assert_eq!(parse_region("rect:0,0,2,1").unwrap().measure(), 2.0);
        assert!(parse_region("disc:0,0,-1").is_err());
        assert!(parse_region("square:1").is_err());
        assert!(parse_region("rect:0,0,1").is_err());
    }

    #[test]
    fn iterated_table() {
        let rows = pmf(PmfLaw::Iterated, &params(&[]), Some(10), 1e-12).unwrap();
        assert_eq!(rows.len(), 11);
        assert!((rows[0].p - 0.531_463_605_386_615_7).abs() < 1e-14);
        assert!(rows.windows(2).all(|w| w[1].tail_bound <= w[0].tail_bound));
        let full = pmf(PmfLaw::Iterated, &params(&[]), None, 1e-12).unwrap();
        assert!(full.last().unwrap().tail_bound < 1e-12);
    }

    #[test]
    fn every_law_tabulates_and_samples() {
        let q = params(&["--nu", "0.8", "--k", "2", "--b", "0.5"]);
        for law in PmfLaw::value_variants() {
            let rows = pmf(*law, &q, Some(20), 1e-10).unwrap_or_else(|e| panic!("{law:?}: {e}"));
            assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.p)), "{law:?}");
        }
        let q = params(&["--nu", "0.8", "--k", "2", "--depth", "3"]);
        for law in SampleLaw::value_variants() {
            let v = sample(*law, &q, 50, 1).unwrap_or_else(|e| panic!("{law:?}: {e}"));
            assert_eq!(v.len(), 50);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(
            pmf(PmfLaw::FracPoisson, &params(&["--nu", "1.5"]), None, 1e-12),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(sample(SampleLaw::Logarithmic, &params(&["--p", "1"]), 10, 1).is_err());
        assert!(pmf(PmfLaw::YuleTau, &params(&[]), Some(0), 1e-12).is_err());
    }

    #[test]
    fn cfrac_rows() {
        let rows = cfrac(&[3], 100_000, 7, 1.0).unwrap();
        assert!(rows[0].relative_error.abs() < 0.02);
        assert_eq!(rows[0].exact_scale, 1.5);
    }
}
