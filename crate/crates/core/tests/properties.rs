use poicomp::field::{first_contact, subordinated_field_pmf, Region};
use poicomp::laws::*;
use poicomp::samplers::*;
use poicomp::specfun::{mittag_leffler, MlArgs, SeriesAccuracy};
use poicomp::verify::{cauchy_scale_mle, tv_between, Histogram};
use proptest::prelude::*;
use rand::distr::Distribution;

fn acc() -> SeriesAccuracy {
    SeriesAccuracy::default()
}

fn cheap() -> ProptestConfig {
    ProptestConfig::with_cases(24)
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn ml_survival_decreases(nu in 0.2f64..=1.0, lambda in 0.1f64..5.0) {
        let mut prev = 1.0;
        for i in 0..=40 {
            let t = 0.25 * i as f64;
            let s = mittag_leffler(MlArgs::new(nu, 1.0, -lambda * t.powf(nu)).unwrap(), acc()).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&s), "t={t}: {s}");
            prop_assert!(s <= prev + 1e-12, "t={t}: {s} > {prev}");
            prev = s;
        }
    }

    #[test]
    fn light_tailed_tables_normalize(la in 0.5f64..2.0, lb in 0.5f64..2.0, nu in 0.5f64..=1.0, t in 0.5f64..2.0) {
        let p = CompositionParams::classical(la, lb, t).unwrap();
        let it = iterated_poisson_table(&p, 1e-12).unwrap();
        prop_assert!(it.probs.iter().sum::<f64>() + it.tail_bound - 1.0 < 1e-8);
        prop_assert!(it.tail_bound < 1e-8);
        let fp = frac_poisson_table(t, nu, lb, 1e-12, acc()).unwrap();
        prop_assert!((fp.probs.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn composed_tau_pmf_matches_pgf(
        la in 0.5f64..2.0, lb in 0.5f64..2.0, nu in 0.5f64..=1.0, k in 1u32..4, u in 0.0f64..0.7,
    ) {
        let p = CompositionParams::new(la, lb, nu, 1.0).unwrap();
        let mut series = 0.0;
        for r in 0..70 {
            series += u.powi(r as i32) * composed_tau_pmf(r, k, &p, acc()).unwrap();
        }
        let pgf = composed_tau_pgf(u, k, &p);
        prop_assert!((series - pgf).abs() < 1e-8, "{series} vs {pgf}");
    }

    #[test]
    fn composed_tau_is_negative_binomial_at_unit_order(
        la in 0.1f64..5.0, lb in 0.1f64..5.0, k in 1u32..8, u in 0.0f64..1.0,
    ) {
        let p = CompositionParams::classical(la, lb, 1.0).unwrap();
        let negbin = (1.0 + (1.0 - u) * la / lb).powi(-(k as i32));
        prop_assert!((composed_tau_pgf(u, k, &p) - negbin).abs() < 1e-14);
    }

    #[test]
    fn iterated_moments_are_wald(la in 0.1f64..5.0, lb in 0.1f64..5.0, t in 0.1f64..5.0) {
        let p = CompositionParams::classical(la, lb, t).unwrap();
        let (m, v) = iterated_poisson_moments(&p);
        let (wm, wv) = random_sum_moments(lb * t, lb * t, &JumpLaw::poisson(la));
        prop_assert!((m - wm).abs() < 1e-12 * wm);
        prop_assert!((v - wv).abs() < 1e-12 * wv);
    }

    #[test]
    fn hitting_mass_below_one(k in 1u32..=10, la in 0.2f64..5.0) {
        let m = hitting_time_total_mass(k, la, acc()).unwrap();
        prop_assert!(m > 0.0 && m < 1.0, "{m}");
    }

    #[test]
    fn mellin_splits_into_k_factors(eta in 0.2f64..1.5, t in 0.1f64..3.0, lambda in 0.1f64..3.0, k in 1i32..6) {
        let jm = |s: f64| positive_stable_mellin(s, 0.6).unwrap();
        let whole = product_mellin(eta, t, lambda, jm);
        let part = product_mellin(eta, t / k as f64, lambda, jm);
        prop_assert!((whole - part.powi(k)).abs() < 1e-10 * whole);
    }

    #[test]
    fn field_law_depends_only_on_measure(
        w in 0.2f64..2.0, h in 0.2f64..2.0, lambda in 0.2f64..3.0, la in 0.2f64..3.0, k in 0u32..12,
    ) {
        let rect = Region::rectangle(0.0, 0.0, w, h).unwrap();
        let disc = Region::disc(1.0, -1.0, (w * h / std::f64::consts::PI).sqrt()).unwrap();
        let a = subordinated_field_pmf(k, &rect, lambda, la).unwrap();
        let b = subordinated_field_pmf(k, &disc, lambda, la).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn first_contact_cdf_is_monotone(lambda in 0.1f64..5.0, la in 0.1f64..5.0) {
        let mut prev = 0.0;
        for i in 0..=50 {
            let (cdf, density) = first_contact(0.05 * i as f64, lambda, la).unwrap();
            prop_assert!(cdf >= prev && cdf <= 1.0 && density >= 0.0);
            prev = cdf;
        }
    }

    #[test]
    fn region_points_stay_inside(x0 in -3.0f64..3.0, y0 in -3.0f64..3.0, w in 0.1f64..4.0, r in 0.1f64..4.0, seed: u64) {
        let mut rng = RngStream::new(seed, 0);
        let rect = Region::rectangle(x0, y0, x0 + w, y0 + w).unwrap();
        let disc = Region::disc(x0, y0, r).unwrap();
        for _ in 0..200 {
            let [x, y] = rect.uniform_point(&mut rng);
            prop_assert!(x >= x0 && x <= x0 + w && y >= y0 && y <= y0 + w);
            let [x, y] = disc.uniform_point(&mut rng);
            prop_assert!((x - x0).hypot(y - y0) <= r * (1.0 + 1e-12));
        }
    }

    #[test]
    fn streams_are_deterministic(seed: u64, stream in 0u64..1 << 48) {
        let draw = |s| {
            let mut rng = RngStream::new(seed, s);
            (0..8).map(|_| rand::RngCore::next_u64(&mut rng)).collect::<Vec<_>>()
        };
        prop_assert_eq!(draw(stream), draw(stream));
        prop_assert_ne!(draw(stream), draw(stream + 1));
    }

    #[test]
    fn samplers_stay_in_support(seed: u64, nu in 0.3f64..=1.0, lb in 0.2f64..3.0, k in 1u32..5, t in 0.01f64..20.0) {
        let mut rng = RngStream::new(seed, 3);
        let tau = Tau::new(k, nu, lb).unwrap();
        let wait = MlWaitingTime::new(nu, lb).unwrap();
        let yule = YuleCount::new(lb, t).unwrap();
        let phi = PhiExact::new(k, nu, lb).unwrap();
        for _ in 0..100 {
            prop_assert!(tau.sample(&mut rng) > 0.0);
            prop_assert!(wait.sample(&mut rng) > 0.0);
            prop_assert!(yule.sample(&mut rng) >= 1);
            prop_assert!(phi.sample(&mut rng) > 0.0);
        }
    }

    #[test]
    fn tv_is_a_metric_on_histograms(
        a in prop::collection::vec(-5i64..20, 1..300),
        b in prop::collection::vec(-5i64..20, 1..300),
    ) {
        let (ha, hb) = (Histogram::from_samples(&a), Histogram::from_samples(&b));
        let d = tv_between(&ha, &hb);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert!((d - tv_between(&hb, &ha)).abs() < 1e-12);
        prop_assert!(tv_between(&ha, &ha) < 1e-12);
    }

    #[test]
    fn cauchy_scale_is_equivariant(xs in prop::collection::vec(-50.0f64..50.0, 100..300), c in 0.1f64..10.0) {
        prop_assume!(xs.iter().filter(|&&x| x != 0.0).count() > 60);
        let s = cauchy_scale_mle(&xs).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
        let sc = cauchy_scale_mle(&scaled).unwrap();
        prop_assert!((sc - c * s).abs() < 1e-7 * c * s, "{sc} vs {}", c * s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn parallel_draws_ignore_thread_count(seed: u64, n in 1usize..60_000) {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| par_sample(seed, 0, n, |rng| sample_yule_count(0.7, 2.0, rng).unwrap()))
        };
        prop_assert_eq!(run(1), run(3));
    }
}

#[test]
fn composition_order_matters() {
    let ab = CompositionParams::classical(1.0, 2.0, 1.0).unwrap();
    let ba = CompositionParams::classical(2.0, 1.0, 1.0).unwrap();
    let d = (iterated_poisson_pgf(0.0, &ab) - iterated_poisson_pgf(0.0, &ba)).abs();
    assert!(d > 1e-3, "{d}");
}
