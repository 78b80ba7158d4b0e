//! The registered checks. Sampled sides draw from [`crate::samplers`] on
//! disjoint stream ranges; exact sides come from [`crate::laws`] and
//! [`crate::field`].

use std::cell::RefCell;
use std::f64::consts::SQRT_2;

use rand::Rng;
use rand_distr::{Cauchy, Distribution, Exp1, StandardNormal};

use super::stats::*;
use super::{Check, MomentError, Outcome, RunConfig};
use crate::error::{Error, Result};
use crate::field::{emptiness_probability, first_contact, sample_field, sample_first_contact, subordinated_field_pmf, Region};
use crate::laws::*;
use crate::quad::{integrate_to_infinity, QuadTol};
use crate::samplers::*;
use crate::specfun::{fibonacci, poisson_pmf, SeriesAccuracy};

/// First stream of an independent second side.
const STREAM_B: u64 = 1 << 40;

/// TV tolerance in units of the multinomial noise bound.
const TV_FACTOR: f64 = 5.0;
const SIGMA_LIMIT: f64 = 3.0;
/// χ² excess over its degrees of freedom, in units of `√(2 df)`.
const CHI2_LIMIT: f64 = 6.0;
/// KS tolerance times `√n` (upper 0.1% point of the Kolmogorov law).
const KS_LIMIT: f64 = 1.95;
/// Relative tolerance on Cauchy scale estimates, widened at small `n` to
/// five asymptotic standard errors.
const SCALE_TOL: f64 = 0.01;

pub fn registry() -> &'static [Check] {
    const CHECKS: &[Check] = &[
        Check {
            name: "bernoulli-product",
            summary: "product of Bernoulli jumps has mean and Mellin transforms e^{-lt(1-p)}",
            run: bernoulli_product,
        },
        Check {
            name: "birth-passage-pgf",
            summary: "Poisson count at the fractional linear birth passage time vs its Beta-form law",
            run: birth_passage_pgf,
        },
        Check {
            name: "birth-random-sum-pgf",
            summary: "composed fractional birth pgf equals the random-sum pgf of the birth law",
            run: birth_random_sum_pgf_check,
        },
        Check {
            name: "cfrac-product-form",
            summary: "continued-fraction scales and characteristic function in product form",
            run: cfrac_product_form,
        },
        Check {
            name: "cfrac-random-sum",
            summary: "depth-8 fraction vs a sum of F_9 Cauchy(0, 1/F_8) variables",
            run: cfrac_random_sum,
        },
        Check {
            name: "cfrac-scales",
            summary: "Cauchy scale of depth 1..10 fractions equals F_{n+1}/F_n",
            run: cfrac_scales,
        },
        Check {
            name: "composition-random-sum",
            summary: "Poisson process at Poisson times vs Poisson sum of Poisson jumps vs exact law",
            run: composition_random_sum,
        },
        Check {
            name: "discrete-ml-sum",
            summary: "sum of discrete Mittag-Leffler variables vs Poisson at the fractional passage time",
            run: discrete_ml_sum,
        },
        Check {
            name: "field-first-contact",
            summary: "Rayleigh first-contact law and emptiness probability of the subordinated field",
            run: field_first_contact,
        },
        Check {
            name: "forward-equations",
            summary: "iterated Poisson pmf satisfies its difference-differential equations",
            run: forward_equations,
        },
        Check {
            name: "fractional-poisson-renewal",
            summary: "Mittag-Leffler renewal counts vs the fractional Poisson law",
            run: fractional_poisson_renewal,
        },
        Check {
            name: "gaussian-product-covariance",
            summary: "covariance of the Gaussian-jump product is 2 sinh(ls) e^{-lt}",
            run: gaussian_product_covariance,
        },
        Check {
            name: "hitting-time-mass",
            summary: "first-passage law of the iterated process is defective, with closed forms for k = 1, 2",
            run: hitting_time_mass,
        },
        Check {
            name: "linear-birth-geometric",
            summary: "fractional linear birth law: geometric at nu = 1, Yule at a Mittag-Leffler time",
            run: linear_birth_geometric,
        },
        Check {
            name: "negbin-wald-moments",
            summary: "Wald moments of the Poisson-logarithmic sum equal the negative binomial moments",
            run: negbin_wald_moments,
        },
        Check {
            name: "nonhomogeneous-composition",
            summary: "Poisson process at non-homogeneous Poisson times vs exact law",
            run: nonhomogeneous_composition,
        },
        Check {
            name: "passage-time-laplace",
            summary: "Laplace transform of sampled fractional passage times",
            run: passage_time_laplace,
        },
        Check {
            name: "pgf-pmf-duality",
            summary: "sum_r u^r pmf(r) equals the closed-form pgf on a parameter grid",
            run: pgf_pmf_duality,
        },
        Check {
            name: "poisson-logarithmic-sum",
            summary: "Poisson sum of logarithmic variables is negative binomial",
            run: poisson_logarithmic_sum,
        },
        Check {
            name: "product-mellin",
            summary: "Mellin transform of random products with stable and exponential jumps",
            run: product_mellin_check,
        },
        Check {
            name: "rescaled-passage-limit",
            summary: "rescaled fractional passage time tends to a stable law",
            run: rescaled_passage_limit,
        },
        Check {
            name: "reversed-composition-mean",
            summary: "mean of a non-homogeneous process at Poisson times",
            run: reversed_composition_mean_check,
        },
        Check {
            name: "unit-order-reductions",
            summary: "nu = 1 reductions to Poisson, Erlang, negative binomial and geometric laws",
            run: unit_order_reductions,
        },
        Check {
            name: "yule-at-passage-time",
            summary: "Yule process at the fractional passage time vs exact law and moments",
            run: yule_at_passage_time,
        },
    ];
    CHECKS
}

fn acc() -> SeriesAccuracy {
    SeriesAccuracy::default()
}

fn par_try<T, F>(seed: u64, first_stream: u64, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync,
{
    par_sample(seed, first_stream, n, f).into_iter().collect()
}

fn as_f64(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

fn count(x: u64) -> i64 {
    x.min(i64::MAX as u64) as i64
}

/// Clamps samples at `cap`, pooling everything above it into one cell.
fn capped(v: &[i64], cap: i64) -> Histogram {
    let c: Vec<i64> = v.iter().map(|&x| x.min(cap)).collect();
    Histogram::from_samples(&c)
}

fn chi2_entry(label: &str, (stat, df): (f64, usize)) -> MomentError {
    let df = df.max(1) as f64;
    MomentError::upper(format!("{label}: chi2 on {df} df"), stat, df, (2.0 * df).sqrt(), CHI2_LIMIT)
}

fn mean_entry(label: &str, values: &[f64], expected: f64) -> MomentError {
    let (m, se) = mean_se(values);
    MomentError::sigma(format!("{label}: mean"), m, expected, se, SIGMA_LIMIT)
}

fn variance_entry(label: &str, values: &[f64], expected: f64) -> MomentError {
    let (v, se) = variance_se(values);
    MomentError::sigma(format!("{label}: variance"), v, expected, se, SIGMA_LIMIT)
}

fn transform_entry(label: &str, samples: &[f64], kind: Transform, expected: f64) -> MomentError {
    let values: Vec<f64> = samples.iter().map(|&x| kind.kernel(x)).collect();
    let (m, se) = mean_se(&values);
    MomentError::sigma(format!("{label}: {kind:?}"), m, expected, se, SIGMA_LIMIT)
}

/// Compares a sample with a law: appends TV and χ² entries and returns the
/// TV and its tolerance.
fn against_law(label: &str, samples: &[i64], law: &PmfTable, out: &mut Vec<MomentError>) -> (f64, f64) {
    let h = capped(samples, law.end());
    let tv = tv_distance(&h, law);
    let tol = TV_FACTOR * tv_noise_bound(law, samples.len());
    out.push(MomentError::below(format!("{label}: tv vs law"), tv, tol));
    out.push(chi2_entry(label, chi2(&h, law)));
    (tv, tol)
}

/// Two independent samples: appends the χ² entry and returns their TV with
/// its tolerance, both on cells below `law.end()`.
fn between(label: &str, a: &[i64], b: &[i64], law: &PmfTable, out: &mut Vec<MomentError>) -> (f64, f64) {
    let (ha, hb) = (capped(a, law.end()), capped(b, law.end()));
    let tv = tv_between(&ha, &hb);
    let tol = TV_FACTOR * SQRT_2 * tv_noise_bound(law, a.len().min(b.len()));
    out.push(MomentError::below(format!("{label}: tv"), tv, tol));
    out.push(chi2_entry(label, chi2_between(&ha, &hb)));
    (tv, tol)
}

/// `∫_0^∞ f`, propagating the first error raised by `f`.
fn integrate_law(f: impl Fn(f64) -> Result<f64>, scale: f64, tol: QuadTol) -> Result<f64> {
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let r = integrate_to_infinity(
        |s| match f(s) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        scale,
        tol,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    r.require("integrate_law", tol.max_intervals)
}

/// `Σ_r u^r p(r)`, truncated where `u^r` falls below 1e-10.
fn pgf_from_pmf(u: f64, mut p: impl FnMut(u32) -> Result<f64>) -> Result<f64> {
    if u == 0.0 {
        return p(0);
    }
    let terms = ((1e-10 * (1.0 - u)).ln() / u.ln()).ceil() as u32;
    let mut s = 0.0;
    for r in (0..=terms).rev() {
        s += u.powi(r as i32) * p(r)?;
    }
    Ok(s)
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

fn scale_tolerance(n: usize, pairs: f64) -> f64 {
    SCALE_TOL.max(5.0 * (2.0 * pairs / n as f64).sqrt())
}

fn composition_random_sum(cfg: &RunConfig) -> Result<Outcome> {
    let (la, lb, t) = (1.0, 1.0, 1.0);
    let p = CompositionParams::classical(la, lb, t)?;
    let n = cfg.samples;
    let law = iterated_poisson_table(&p, 1e-12)?;
    let paths = par_try(cfg.seed, 0, n, |r| {
        let inner = sample_poisson_path(lb, t, r)?;
        Ok(sample_composition_path(la, &inner, r)?.terminal())
    })?;
    let sums = par_sample(cfg.seed, STREAM_B, n, |r| {
        sample_random_sum(|r| poisson(lb * t, r), |r| count(poisson(la, r)), r)
    });
    let mut m = Vec::new();
    against_law("path", &paths, &law, &mut m);
    against_law("sum", &sums, &law, &mut m);
    let (tv, tol) = between("path vs sum", &paths, &sums, &law, &mut m);
    let (mean, var) = iterated_poisson_moments(&p);
    for (label, v) in [("path", as_f64(&paths)), ("sum", as_f64(&sums))] {
        m.push(mean_entry(label, &v, mean));
        m.push(variance_entry(label, &v, var));
    }
    let chi2 = chi2_between(&capped(&paths, law.end()), &capped(&sums, law.end())).0;
    Ok(Outcome {
        n_samples: n,
        tv_distance: Some(tv),
        chi2: Some(chi2),
        moment_errors: m,
        tolerance: tol,
    })
}

fn nonhomogeneous_composition(cfg: &RunConfig) -> Result<Outcome> {
    let (la, t) = (1.0, 1.5);
    let rf = RateFunction::linear(0.5, 1.0, t)?;
    let n = cfg.samples;
    let law = PmfTable::tabulate(0, 4096, 1e-12, |k| nonhom_composition_pmf(k as u32, &rf, la, t))?;
    let samples = par_try(cfg.seed, 0, n, |r| {
        let inner = sample_nonhom_poisson(&rf, t, r)?;
        Ok(sample_composition_path(la, &inner, r)?.terminal())
    })?;
    let mut m = Vec::new();
    let (tv, tol) = against_law("composition", &samples, &law, &mut m);
    let v = as_f64(&samples);
    let big = rf.cumulative(t);
    m.push(mean_entry("composition", &v, la * big));
    m.push(variance_entry("composition", &v, la * (1.0 + la) * big));
    Ok(Outcome {
        n_samples: n,
        tv_distance: Some(tv),
        chi2: Some(chi2(&capped(&samples, law.end()), &law).0),
        moment_errors: m,
        tolerance: tol,
    })
}

fn forward_equations(_: &RunConfig) -> Result<Outcome> {
    let tol = 1e-6;
    let mut m = Vec::new();
    for &(la, lb, t) in &[(1.0, 1.0, 1.0), (0.5, 2.0, 1.5), (2.0, 0.7, 0.8)] {
        let p = CompositionParams::classical(la, lb, t)?;
        let r = (0..=5).map(|k| iterated_pmf_dde_residual(k, &p, 1e-4)).collect::<Result<Vec<_>>>()?;
        m.push(MomentError::absolute(
            format!("max residual k <= 5, la={la} lb={lb} t={t}"),
            max_abs(r),
            0.0,
            tol,
        ));
    }
    Ok(Outcome {
        moment_errors: m,
        tolerance: tol,
        ..Outcome::default()
    })
}

fn hitting_time_mass(_: &RunConfig) -> Result<Outcome> {
    let tol = 1e-8;
    let acc = acc();
    let mut m = Vec::new();
    for la in [0.5, 1.0, 2.0] {
        for k in 1..=5 {
            m.push(MomentError::below(
                format!("P(T_{k} < inf), la={la}"),
                hitting_time_total_mass(k, la, acc)?,
                1.0,
            ));
        }
        let e = (-la as f64).exp();
        let p1 = la * e / (1.0 - e);
        let p2 = p1 * p1 + 0.5 * la * p1;
        m.push(MomentError::relative(
            format!("P(T_1 < inf) closed form, la={la}"),
            hitting_time_total_mass(1, la, acc)?,
            p1,
            tol,
        ));

        let lb = 1.0;
        let p = CompositionParams::classical(la, lb, 1.0)?;
        let decay = lb * (1.0 - e);
        for (k, closed) in [(1, p1), (2, p2)] {
            let density = |s: f64| {
                // beyond this the density underflows
                if s * decay > 700.0 {
                    return Ok(0.0);
                }
                hitting_time_density(k, s, &p, acc)
            };
            let q = integrate_law(density, 1.0 / decay, QuadTol::new(1e-14, 1e-12))?;
            m.push(MomentError::relative(format!("integral of T_{k} density, la={la}"), q, closed, tol));
        }
        for s in [0.5, 3.0] {
            let d = (-decay * s).exp();
            let t1 = la * e * lb * d;
            let t2 = lb * 0.5 * la * la * e * d * (1.0 + 2.0 * lb * s * e);
            m.push(MomentError::relative(
                format!("T_1 density at s={s}, la={la}"),
                hitting_time_density(1, s, &p, acc)?,
                t1,
                tol,
            ));
            m.push(MomentError::relative(
                format!("T_2 density at s={s}, la={la}"),
                hitting_time_density(2, s, &p, acc)?,
                t2,
                tol,
            ));
        }
    }
    Ok(Outcome {
        moment_errors: m,
        tolerance: tol,
        ..Outcome::default()
    })
}

fn birth_random_sum_pgf_check(_: &RunConfig) -> Result<Outcome> {
    let tol = 1e-8;
    let (la, t) = (1.0, 1.0);
    let rates = BirthRates::new(vec![1.0, 2.0, 3.0, 4.0])?;
    let jump = JumpLaw::poisson(la);
    let mut m = Vec::new();
    for nu in [0.6, 1.0] {
        for u in [0.0, 0.3, 0.7] {
            let mixed = birth_random_sum_pgf(u, t, nu, &rates, &jump, acc())?;
            let composed = composed_birth_pgf(u, t, nu, &rates, la, acc())?;
            m.push(MomentError::absolute(format!("pgf at u={u}, nu={nu}"), composed, mixed, tol));
        }
    }
    Ok(Outcome {
        moment_errors: m,
        tolerance: tol,
        ..Outcome::default()
    })
}

fn linear_birth_geometric(cfg: &RunConfig) -> Result<Outcome> {
    let (lambda, t) = (1.0, 1.0);
    let n = cfg.samples;
    let mut m = Vec::new();

    let p = (-lambda * t as f64).exp();
    let errs = (1..=30u32)
        .map(|k| {
            let want = p * (1.0 - p).powi(k as i32 - 1);
            Ok((frac_linear_birth_pmf(k, t, 1.0, lambda, acc())? - want) / want)
        })
        .collect::<Result<Vec<f64>>>()?;
    m.push(MomentError::absolute("max relative error vs geometric, k <= 30", max_abs(errs), 0.0, 1e-8));

    let classical = PmfTable::tabulate(1, 4096, 1e-12, |k| frac_linear_birth_pmf(k as u32, t, 1.0, lambda, acc()))?;
    let yule = YuleCount::new(lambda, t)?;
    let samples = par_sample(cfg.seed, 0, n, |r| count(yule.sample(r)));
    against_law("nu=1 Yule", &samples, &classical, &mut m);

    // Y^ν(t) is a classical Yule process at the time t^ν S^{−ν}
    let nu = 0.7;
    let law = PmfTable::tabulate(1, 150, 1e-12, |k| frac_linear_birth_pmf(k as u32, t, nu, lambda, acc()))?;
    let stable = PositiveStable::new(nu)?;
    let samples = par_try(cfg.seed, STREAM_B, n, |r| {
        let time = t.powf(nu) * stable.sample(r).powf(-nu);
        Ok(count(YuleCount::new(lambda, time)?.sample(r)))
    })?;
    let (tv, tol) = against_law("nu=0.7 subordinated Yule", &samples, &law, &mut m);
    Ok(Outcome {
        n_samples: n,
        tv_distance: Some(tv),
        chi2: Some(chi2(&capped(&samples, law.end()), &law).0),
        moment_errors: m,
        tolerance: tol,
    })
}

fn field_first_contact(cfg: &RunConfig) -> Result<Outcome> {
    let (lambda, la, radius) = (1.0, 1.0, 3.0);
    let n = cfg.samples;
    let mut m = Vec::new();

    let d = par_try(cfg.seed, 0, n, |r| {
        Ok(sample_first_contact(radius, lambda, la, r)?.unwrap_or(f64::INFINITY))
    })?;
    let ks = ks_distance(&d, |l| first_contact(l, lambda, la).map_or(f64::NAN, |c| c.0));
    m.push(MomentError::below("first contact: ks", ks, KS_LIMIT / (n as f64).sqrt()));

    let square = Region::rectangle(0.0, 0.0, 1.0, 1.0)?;
    let law = PmfTable::tabulate(0, 4096, 1e-12, |k| subordinated_field_pmf(k as u32, &square, lambda, la))?;
    let counts = par_try(cfg.seed, STREAM_B, n, |r| {
        let points = sample_field(&square, lambda, r)?;
        Ok(points.iter().map(|_| count(poisson(la, r))).sum::<i64>())
    })?;
    let (tv, tol) = against_law("subordinated counts", &counts, &law, &mut m);
    let empty: Vec<f64> = counts.iter().map(|&c| if c == 0 { 1.0 } else { 0.0 }).collect();
    let p0 = emptiness_probability(&square, lambda, la)?;
    let (f0, _) = mean_se(&empty);
    m.push(MomentError::sigma(
        "emptiness probability",
        f0,
        p0,
        (p0 * (1.0 - p0) / n as f64).sqrt(),
        SIGMA_LIMIT,
    ));
    Ok(Outcome {
        n_samples: n,
        tv_distance: Some(tv),
        chi2: Some(chi2(&capped(&counts, law.end()), &law).0),
        moment_errors: m,
        tolerance: tol,
    })
}

fn pgf_pmf_duality(_: &RunConfig) -> Result<Outcome> {
    let tol = 1e-6;
    let grid = [0.5, 1.0, 2.0];
    let us = [0.0, 0.3, 0.7];
    let k = 2;
    let (mut tau, mut phi, mut iterated) = (Vec::new(), Vec::new(), Vec::new());
    for la in grid {
        for lb in grid {
            for nu in [0.5, 0.8, 1.0] {
                let p = CompositionParams::new(la, lb, nu, 1.0)?;
                for u in us {
                    let s = pgf_from_pmf(u, |r| composed_tau_pmf(r, k, &p, acc()))?;
                    tau.push(s - composed_tau_pgf(u, k, &p));
                    let s = pgf_from_pmf(u, |r| composed_phi_pmf(r, k, &p, acc()))?;
                    phi.push(s - composed_phi_pgf(u, k, &p));
                }
            }
            for t in [0.5, 1.0, 2.0] {
                let p = CompositionParams::classical(la, lb, t)?;
                for u in us {
                    let s = pgf_from_pmf(u, |r| iterated_poisson_pmf(r, &p))?;
                    iterated.push(s - iterated_poisson_pgf(u, &p));
                }
            }
        }
    }
    let m = vec![
        MomentError::absolute("Poisson at fractional passage time (k=2)", max_abs(tau), 0.0, tol),
        MomentError::absolute("Poisson at fractional birth passage time (k=2)", max_abs(phi), 0.0, tol),
        MomentError::absolute("iterated Poisson", max_abs(iterated), 0.0, tol),
    ];
    Ok(Outcome {
        moment_errors: m,
        tolerance: tol,
        ..Outcome::default()
    })
}

fn discrete_ml_sum(cfg: &RunConfig) -> Result<Outcome> {
    let (k, nu, la, lb) = (3u32, 0.8, 1.0, 1.0);
    let p = CompositionParams::new(la, lb, nu, 1.0)?;
    let n = cfg.samples;
    let law = composed_tau_table(k, &p, 400, 1e-10, acc())?;
    let dml = DiscreteMl::new(nu, la, lb)?;
    let sums = par_sample(cfg.seed, 0, n, |r| (0..k).map(|_| count(dml.sample(r))).sum::<i64>());
    let tau = Tau::new(k, nu, lb)?;
    let direct = par_sample(cfg.seed, STREAM_B, n, |r| {
        let s = tau.sample(r);
        count(poisson(la * s, r))
    });
    let mut m = Vec::new();
    let (tv, tol) = against_law("sum of discrete ML", &sums, &law, &mut m);
    against_law("Poisson at passage time", &direct, &law, &mut m);
    between("sum vs composition", &sums, &direct, &law, &mut m);
    Ok(Outcome {
        n_samples: n,
        tv_distance: Some(tv),
        chi2: Some(chi2(&capped(&sums, law.end()), &law).0),
        moment_errors: m,
        tolerance: tol,
    })
}

fn unit_order_reductions(_: &RunConfig) -> Result<Outcome> {
    let tol = 1e-8;
    let acc = acc();
    let rel = |got: f64, want: f64| (got - want) / want;

    let mut poisson = Vec::new();
    for lambda in [1.0, 2.5] {
        for m in 0..=30 {
            poisson.push(rel(frac_poisson_pmf(m, 1.0, 1.0, lambda, acc)?, poisson_pmf(m as u64, lambda)));
        }
    }
    let mut erlang = Vec::new();
    for lambda in [1.0, 2.5] {
        for k in 1..=30u32 {
            for s in [0.5, 2.0, 10.0] {
                let kf = k as f64;
                let want = (kf * f64::ln(lambda) + (kf - 1.0) * f64::ln(s) - lambda * s
                    - crate::specfun::ln_factorial(k as u64 - 1))
                .exp();
                erlang.push(rel(tau_density(k, s, 1.0, lambda, acc)?, want));
            }
        }
    }
    let mut negbin = Vec::new();
    for &(la, lb) in &[(1.0, 1.0), (0.5, 2.0), (2.0, 0.7)] {
        let p = CompositionParams::classical(la, lb, 1.0)?;
        let success = lb / (la + lb);
        for k in 1..=30 {
            for r in 0..=30 {
                negbin.push(rel(composed_tau_pmf(r, k, &p, acc)?, negbin_pmf(r, k, success)));
            }
        }
    }
    let mut geometric = Vec::new();
    for c in [0.5, 1.0, 2.0] {
        let p = c / (1.0 + c);
        for r in 0..=30 {
            geometric.push(rel(dml_pmf(r, 1.0, c, acc)?, p * (1.0 - p).powi(r as i32)));
        }
    }
    let m = vec![
        MomentError::absolute("fractional Poisson vs Poisson: max relative error", max_abs(poisson), 0.0, tol),
        MomentError::absolute("passage density vs Erlang: max relative error", max_abs(erlang), 0.0, tol),
        MomentError::absolute("composed law vs negative binomial: max relative error", max_abs(negbin), 0.0, tol),
        MomentError::absolute("discrete ML vs geometric: max relative error", max_abs(geometric), 0.0, tol),
    ];
    Ok(Outcome {
        moment_errors: m,
        tolerance: tol,
        ..Outcome::default()
    })
}

/// Parameters shared by the negative-binomial checks.
const NEGBIN: (u32, f64, f64) = (3, 1.0, 1.0);

fn poisson_logarithmic_samples(cfg: &RunConfig) -> Result<Vec<i64>> {
    let (k, la, lb) = NEGBIN;
    let (mu, q) = negbin_decomposition_params(k, la, lb);
    let log = Logarithmic::new(q)?;
    Ok(par_sample(cfg.seed, 0, cfg.samples, |r| {
        sample_random_sum(|r| poisson(mu, r), |r| count(log.sample(r)), r)
    }))
}

fn poisson_logarithmic_sum(cfg: &RunConfig) -> Result<Outcome> {
    let (k, la, lb) = NEGBIN;
    let n = cfg.samples;
    let success = lb / (la + lb);
    let law = PmfTable::tabulate(0, 4096, 1e-12, |r| Ok(negbin_pmf(r as u32, k, success)))?;
    let sums = poisson_logarithmic_samples(cfg)?;
    let tau = Tau::new(k, 1.0, lb)?;
    let composed = par_sample(cfg.seed, STREAM_B, n, |r| {
        let s = tau.sample(r);
        count(poisson(la * s, r))
    });
    let mut m = Vec::new();
    let (tv, tol) = against_law("Poisson-logarithmic sum", &sums, &law, &mut m);
    against_law("Poisson at passage time", &composed, &law, &mut m);
    between("sum vs composition", &sums, &composed, &law, &mut m);
    Ok(Outcome {
        n_samples: n,
        tv_distance: Some(tv),
        chi2: Some(chi2(&capped(&sums, law.end()), &law).0),
        moment_errors: m,
        tolerance: tol,
    })
}

fn negbin_wald_moments(cfg: &RunConfig) -> Result<Outcome> {
    let (k, la, lb) = NEGBIN;
    let (mu, q) = negbin_decomposition_params(k, la, lb);
    let (wald_mean, wald_var) = random_sum_moments(mu, mu, &JumpLaw::logarithmic(q));
    let (mean, var) = negbin_moments(k, la, lb);
    let v = as_f64(&poisson_logarithmic_samples(cfg)?);
    let m = vec![
        MomentError::relative("Wald mean vs k la/lb", wald_mean, mean, 1e-12),
        MomentError::relative("Wald variance vs k la(la+lb)/lb^2", wald_var, var, 1e-12),
        mean_entry("Poisson-logarithmic sum", &v, wald_mean),
        variance_entry("Poisson-logarithmic sum", &v, wald_var),
    ];
    Ok(Outcome {
        n_samples: cfg.samples,
        moment_errors: m,
        tolerance: SIGMA_LIMIT,
        ..Outcome::default()
    })
}

fn yule_at_passage_time(cfg: &RunConfig) -> Result<Outcome> {
    let (k, la, lb) = (2u32, 1.0, 5.0);
    let n = cfg.samples;
    let mut m = Vec::new();

    let classical = CompositionParams::classical(la, lb, 1.0)?;
    let law = yule_tau_table(k, &classical, 400, 1e-12, acc())?;
    m.push(MomentError::absolute("nu=1 total mass", law.total(), 1.0, 1e-6));
    let tau = Tau::new(k, 1.0, lb)?;
    let samples = par_try(cfg.seed, 0, n, |r| Ok(count(YuleCount::new(la, tau.sample(r))?.sample(r))))?;
    let (tv, tol) = against_law("nu=1", &samples, &law, &mut m);
    let (mean, second) = yule_tau_moments(k, la, lb);
    let v = as_f64(&samples);
    m.push(mean_entry("nu=1", &v, mean));
    let squares: Vec<f64> = v.iter().map(|x| x * x).collect();
    let (s2, se) = mean_se(&squares);
    m.push(MomentError::sigma("nu=1: second moment", s2, second, se, SIGMA_LIMIT));

    let fractional = CompositionParams::new(la, lb, 0.7, 1.0)?;
    let law = yule_tau_table(k, &fractional, 400, 1e-12, acc())?;
    let tau = Tau::new(k, 0.7, lb)?;
    let samples = par_try(cfg.seed, STREAM_B, n, |r| Ok(count(YuleCount::new(la, tau.sample(r))?.sample(r))))?;
    against_law("nu=0.7", &samples, &law, &mut m);
    Ok(Outcome {
        n_samples: n,
        tv_distance: Some(tv),
        chi2: Some(chi2(&capped(&samples, law.end()), &law).0),
        moment_errors: m,
        tolerance: tol,
    })
}

fn birth_passage_pgf(cfg: &RunConfig) -> Result<Outcome> {
    let (k, nu, la, lb) = (3u32, 0.7, 1.0, 1.0);
    let p = CompositionParams::new(la, lb, nu, 1.0)?;
    let n = cfg.samples;
    let mut m = Vec::new();

    let mut gap = Vec::new();
    for kk in 1..=10 {
        for u in [0.0, 0.3, 0.7] {
            gap.push(composed_phi_pgf(u, kk, &p) - composed_phi_pgf_finite(u, kk, &p)?);
        }
    }
    m.push(MomentError::absolute("Beta form vs finite sum, k <= 10", max_abs(gap), 0.0, 1e-10));

    let law = composed_phi_table(k, &p, 400, 1e-10, acc())?;
    let table = PhiTable::new(k, nu, lb, DEFAULT_PHI_GRID)?;
    let tabulated = par_sample(cfg.seed, 0, n, |r| {
        let s = table.sample(r);
        count(poisson(la * s, r))
    });
    let exact = PhiExact::new(k, nu, lb)?;
    let direct = par_sample(cfg.seed, STREAM_B, n, |r| {
        let s = exact.sample(r);
        count(poisson(la * s, r))
    });
    let (tv, tol) = against_law("tabulated passage time", &tabulated, &law, &mut m);
    against_law("exact passage time", &direct, &law, &mut m);
    for u in [0.3f64, 0.7] {
        let powers: Vec<f64> = tabulated.iter().map(|&x| u.powi(x.min(i32::MAX as i64) as i32)).collect();
        let (g, se) = mean_se(&powers);
        let want = composed_phi_pgf(u, k, &p);
        m.push(MomentError::sigma(format!("tabulated passage time: pgf at u={u}"), g, want, se, SIGMA_LIMIT));
    }
    Ok(Outcome {
        n_samples: n,
        tv_distance: Some(tv),
        chi2: Some(chi2(&capped(&tabulated, law.end()), &law).0),
        moment_errors: m,
        tolerance: tol,
    })
}

fn product_mellin_check(cfg: &RunConfig) -> Result<Outcome> {
    let (lambda, t, nu) = (1.0, 1.0, 0.5);
    let n = cfg.samples;
    let mut m = Vec::new();

    let stable = PositiveStable::new(nu)?;
    let products = par_try(cfg.seed, 0, n, |r| sample_product(t, lambda, |r| stable.sample(r), r))?;
    for eta in [0.5, 1.2] {
        let want = product_mellin(eta, t, lambda, |s| positive_stable_mellin(s, nu).unwrap_or(f64::NAN));
        m.push(transform_entry("stable jumps", &products, Transform::Mellin(eta), want));
    }
    let products = par_try(cfg.seed, STREAM_B, n, |r| sample_product(t, lambda, |r| r.sample(Exp1), r))?;
    for eta in [0.7, 1.5, 2.0] {
        let want = product_mellin(eta, t, lambda, |s| statrs::function::gamma::gamma(1.0 + s));
        m.push(transform_entry("exponential jumps", &products, Transform::Mellin(eta), want));
    }
    Ok(Outcome {
        n_samples: n,
        moment_errors: m,
        tolerance: SIGMA_LIMIT,
        ..Outcome::default()
    })
}

fn gaussian_product_covariance(cfg: &RunConfig) -> Result<Outcome> {
    let (s, t, lambda) = (0.5, 1.0, 1.0);
    let n = cfg.samples;
    let pairs = par_try(cfg.seed, 0, n, |r| {
        sample_product_pair(s, t, lambda, |r: &mut RngStream| r.sample::<f64, _>(StandardNormal), r)
    })?;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (mx, _) = mean_se(&xs);
    let (my, _) = mean_se(&ys);
    let cross: Vec<f64> = pairs.iter().map(|&(x, y)| (x - mx) * (y - my)).collect();
    let (cov, se) = mean_se(&cross);
    let want = product_covariance(s, t, lambda, 0.0, 1.0)?;
    let min_variant = 2.0 * (lambda * s as f64).sinh() * (-lambda * s as f64).exp();
    let m = vec![
        MomentError::sigma("covariance vs 2 sinh(ls) e^{-lt}", cov, want, se, SIGMA_LIMIT),
        MomentError::distinct("covariance vs 2 sinh(ls) e^{-ls}", cov, min_variant, se, SIGMA_LIMIT),
    ];
    Ok(Outcome {
        n_samples: n,
        moment_errors: m,
        tolerance: SIGMA_LIMIT,
        ..Outcome::default()
    })
}

fn bernoulli_product(cfg: &RunConfig) -> Result<Outcome> {
    let (lambda, t, p) = (1.0, 1.0, 0.5);
    let n = cfg.samples;
    let products = par_try(cfg.seed, 0, n, |r| {
        sample_product(t, lambda, |r| if r.random::<f64>() < p { 1.0 } else { 0.0 }, r)
    })?;
    let want = (-lambda * t * (1.0 - p) as f64).exp();
    let mut m = vec![mean_entry("product", &products, want)];
    for eta in [2.0, 3.5] {
        let exact = product_mellin(eta, t, lambda, |s| bernoulli_mellin(s, p));
        m.push(MomentError::relative(format!("Mellin law at eta={eta}"), exact, want, 1e-15));
        m.push(transform_entry("product", &products, Transform::Mellin(eta), want));
    }
    Ok(Outcome {
        n_samples: n,
        moment_errors: m,
        tolerance: SIGMA_LIMIT,
        ..Outcome::default()
    })
}

fn cfrac_scales(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.samples;
    let tol = scale_tolerance(n, 1.0);
    let mut m = Vec::new();
    for depth in 1..=10u32 {
        let draws = par_try(cfg.seed, (depth as u64) << 40, n, |r| sample_cfrac(depth, r))?;
        let b = cauchy_scale_mle(&draws)?;
        m.push(MomentError::relative(format!("scale at depth {depth}"), b, cfrac_scale(depth as u64)?, tol));
    }
    Ok(Outcome {
        n_samples: n,
        moment_errors: m,
        tolerance: tol,
        ..Outcome::default()
    })
}

fn cfrac_product_form(_: &RunConfig) -> Result<Outcome> {
    let tol = 1e-12;
    let scales = (1..=30u64)
        .map(|n| Ok((cfrac_scale_product_form(n)? - cfrac_scale(n)?) / cfrac_scale(n)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut charfn = Vec::new();
    for beta in [0.5, 1.0, 2.0] {
        for lt in [0.5, 2.0, 10.0] {
            let direct = cfrac_charfn(beta, lt, 1.0, acc())?;
            charfn.push((cfrac_charfn_product_form(beta, lt, 1.0, acc())? - direct) / direct);
        }
    }
    let m = vec![
        MomentError::absolute("scale product form, n <= 30: max relative error", max_abs(scales), 0.0, tol),
        MomentError::absolute("characteristic function product form: max relative error", max_abs(charfn), 0.0, tol),
    ];
    Ok(Outcome {
        moment_errors: m,
        tolerance: tol,
        ..Outcome::default()
    })
}

fn cfrac_random_sum(cfg: &RunConfig) -> Result<Outcome> {
    let depth = 8u32;
    let n = cfg.samples;
    let (f_next, f_n) = (fibonacci(depth as u64 + 1)?, fibonacci(depth as u64)?);
    let component = Cauchy::new(0.0, 1.0 / f_n as f64).map_err(|e| Error::invalid("cfrac_random_sum", e.to_string()))?;
    let sums = par_sample(cfg.seed, 0, n, |r| (0..f_next).map(|_| component.sample(r)).sum::<f64>());
    let fractions = par_try(cfg.seed, STREAM_B, n, |r| sample_cfrac(depth, r))?;
    let (a, b) = (cauchy_scale_mle(&sums)?, cauchy_scale_mle(&fractions)?);
    let want = cfrac_scale(depth as u64)?;
    let m = vec![
        MomentError::relative("sum scale vs fraction scale", a, b, scale_tolerance(n, 2.0)),
        MomentError::relative("sum scale vs F_9/F_8", a, want, scale_tolerance(n, 1.0)),
        MomentError::relative("fraction scale vs F_9/F_8", b, want, scale_tolerance(n, 1.0)),
    ];
    Ok(Outcome {
        n_samples: n,
        moment_errors: m,
        tolerance: scale_tolerance(n, 2.0),
        ..Outcome::default()
    })
}

fn rescaled_passage_limit(_: &RunConfig) -> Result<Outcome> {
    let tol = 1e-5;
    let (lb, t, mu, nu) = (1.0, 1.0, 1.0, 0.5);
    let limit = (-lb * t * f64::powf(mu, nu)).exp();
    let m = vec![MomentError::absolute(
        "k = 10^6 vs stable limit",
        rescaled_tau_laplace(1_000_000, t, mu, nu, lb),
        limit,
        tol,
    )];
    Ok(Outcome {
        moment_errors: m,
        tolerance: tol,
        ..Outcome::default()
    })
}

fn reversed_composition_mean_check(cfg: &RunConfig) -> Result<Outcome> {
    let (la, t) = (2.0, 1.2);
    let rf = RateFunction::linear(0.5, 1.0, 1.0)?;
    let want = reversed_composition_mean(&rf, la, t, acc())?;
    let v = par_sample(cfg.seed, 0, cfg.samples, |r| {
        let outer = poisson(la * t, r);
        poisson(rf.cumulative(outer as f64), r) as f64
    });
    Ok(Outcome {
        n_samples: cfg.samples,
        moment_errors: vec![mean_entry("reversed composition", &v, want)],
        tolerance: SIGMA_LIMIT,
        ..Outcome::default()
    })
}

fn fractional_poisson_renewal(cfg: &RunConfig) -> Result<Outcome> {
    let (t, nu, lambda) = (1.0, 0.6, 1.5);
    let n = cfg.samples;
    let law = frac_poisson_table(t, nu, lambda, 1e-12, acc())?;
    let counter = FracPoissonCount::new(t, nu, lambda)?;
    let samples = par_sample(cfg.seed, 0, n, |r| count(counter.sample(r)));
    let mut m = Vec::new();
    let (tv, tol) = against_law("renewal count", &samples, &law, &mut m);
    let mean = lambda * f64::powf(t, nu) / statrs::function::gamma::gamma(1.0 + nu);
    m.push(mean_entry("renewal count", &as_f64(&samples), mean));
    Ok(Outcome {
        n_samples: n,
        tv_distance: Some(tv),
        chi2: Some(chi2(&capped(&samples, law.end()), &law).0),
        moment_errors: m,
        tolerance: tol,
    })
}

fn passage_time_laplace(cfg: &RunConfig) -> Result<Outcome> {
    let (k, nu, lb) = (3u32, 0.6, 1.0);
    let tau = Tau::new(k, nu, lb)?;
    let v = par_sample(cfg.seed, 0, cfg.samples, |r| tau.sample(r));
    let m = [0.5, 2.0]
        .iter()
        .map(|&mu| transform_entry("passage time", &v, Transform::Laplace(mu), tau_laplace(k, mu, nu, lb)))
        .collect();
    Ok(Outcome {
        n_samples: cfg.samples,
        moment_errors: m,
        tolerance: SIGMA_LIMIT,
        ..Outcome::default()
    })
}
