use mmtc_core::numerics::regularized_gamma_q;
use mmtc_core::sim::{self, relay_trials, SimReport, SimScheme, SimSpec};
use mmtc_core::{crs, relay, rrs, QuadratureSpec, SystemConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn run_with_threads(spec: &SimSpec, threads: usize) -> SimReport {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| sim::run(spec, &quad()).unwrap())
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    for scheme in [SimScheme::Rrs, SimScheme::Crs] {
        let spec = SimSpec::new(SystemConfig::default(), scheme, 5_000, 42);
        assert_eq!(run_with_threads(&spec, 1), run_with_threads(&spec, 4));
    }
    let tiny = SystemConfig { mean_load: 3.0, channels: 2, ..SystemConfig::default() };
    let spec = SimSpec::new(tiny, SimScheme::OptTiny, 300, 42);
    assert_eq!(run_with_threads(&spec, 1), run_with_threads(&spec, 3));
}

/// Chi-square goodness of fit of the simulated load on 30 bins, the outer
/// two collecting the tails.
fn load_chi_square(mean: f64) -> f64 {
    let cfg = SystemConfig { mean_load: mean, ..SystemConfig::default() };
    let spec = sim::SimSpec::new(cfg, SimScheme::Rrs, 1, 0);
    let prepared = sim::Prepared::new(&spec).unwrap();
    let n = 1_000_000u64;
    let sd = mean.sqrt();
    let lo = (mean - 3.5 * sd).floor().max(0.0) as usize;
    let bins = 30usize;
    let width = ((7.0 * sd) / (bins - 2) as f64).ceil().max(1.0) as usize;
    let bin = |k: usize| if k < lo { 0 } else { (1 + (k - lo) / width).min(bins - 1) };
    let mut counts = vec![0u64; bins];
    let mut rng = ChaCha8Rng::seed_from_u64(mean.to_bits());
    for _ in 0..n {
        counts[bin(prepared.draw_population(&mut rng))] += 1;
    }
    // exact bin probabilities from the Poisson CDF, Pr(K <= k) = Q(k + 1, m)
    let cdf = |k: i64| if k < 0 { 0.0 } else { regularized_gamma_q(k as f64 + 1.0, mean).unwrap() };
    let mut probs = vec![0.0; bins];
    probs[0] = cdf(lo as i64 - 1);
    for (b, p) in probs.iter_mut().enumerate().take(bins - 1).skip(1) {
        let start = lo + (b - 1) * width;
        *p = cdf((start + width) as i64 - 1) - cdf(start as i64 - 1);
    }
    probs[bins - 1] = 1.0 - probs[..bins - 1].iter().sum::<f64>();
    let mut stat = 0.0;
    let mut used = 0;
    for (c, p) in counts.iter().zip(&probs) {
        let e = p * n as f64;
        if e >= 5.0 {
            stat += (*c as f64 - e).powi(2) / e;
            used += 1;
        }
    }
    regularized_gamma_q((used - 1) as f64 / 2.0, stat / 2.0).unwrap()
}

#[test]
fn load_is_poisson() {
    for mean in [0.7, 4.0, 12.0, 30.0, 60.0, 500.0] {
        let p = load_chi_square(mean);
        assert!(p > 0.001, "mean {mean}: p-value {p}");
    }
}

#[test]
fn relay_success_per_load_matches_laplace() {
    let cfg = SystemConfig::default();
    let r = sim::run(&SimSpec::new(cfg.clone(), SimScheme::Rrs, 40_000, 8), &quad()).unwrap();
    for (k1, t) in r.relay.iter().enumerate() {
        if t.trials < 200 {
            continue;
        }
        let want = relay::relay_success(&cfg, k1).unwrap();
        assert!((t.estimate() - want).abs() <= 3.0 * t.stderr().max(1e-4), "k1={k1}");
    }
    let paired = relay_trials(&cfg, &[1, 10, 30, 60], 100_000, 9).unwrap();
    for (t, k1) in paired.iter().zip([1, 10, 30, 60]) {
        let want = relay::relay_success(&cfg, k1).unwrap();
        assert!((t.estimate() - want).abs() <= 3.0 * t.stderr(), "k1={k1}");
    }
}

#[test]
fn simulated_means_match_analysis() {
    let cfg = SystemConfig::default();
    let r = sim::run(&SimSpec::new(cfg.clone(), SimScheme::Rrs, 50_000, 12), &quad()).unwrap();
    let pmf = rrs::pmf(&cfg).unwrap();
    assert!((r.active.mean() - pmf.mean()).abs() < 4.0 * r.active.stderr());
    let served = relay::served_from_pmf(&cfg, &pmf).unwrap().overall;
    assert!((r.served.mean() - served).abs() < 4.0 * r.served.stderr());
    for p in [r.solo, r.first, r.second] {
        assert!((0.0..=1.0).contains(&p.estimate()));
    }
}

#[test]
fn crs_light_load_is_exact() {
    // with K <= N almost surely every device is alone and the model is exact
    let cfg = SystemConfig { mean_load: 2.0, channels: 30, ..SystemConfig::default() };
    let analytic = crs::pmf(&cfg, &quad()).unwrap();
    let r = sim::run(&SimSpec::new(cfg, SimScheme::Crs, 50_000, 13), &quad()).unwrap();
    assert!(analytic.total_variation(&r.pmf()) < 0.01);
    let ranks = r.ranks.unwrap();
    assert_eq!(ranks.solo.len(), 30);
    assert!(ranks.first.iter().all(|t| t.trials == 0));
}

#[test]
fn crs_rank_success_orders_with_gain() {
    let cfg = SystemConfig::default();
    let r = sim::run(&SimSpec::new(cfg, SimScheme::Crs, 5_000, 14).conditioned(60), &quad()).unwrap();
    let ranks = r.ranks.unwrap();
    let first: Vec<f64> = ranks.first.iter().map(|t| t.estimate()).collect();
    assert!(first[0] > first[29]);
    assert_eq!(r.solo.trials, 0);
}

#[test]
fn opt_pairs_strong_with_weak() {
    let cfg = SystemConfig { mean_load: 4.0, channels: 2, mu: 0.0, phi1: 1e-3, ..SystemConfig::default() };
    let spec = SimSpec::new(cfg, SimScheme::OptTiny, 2_000, 15).conditioned(4);
    let s = sim::run(&spec, &quad()).unwrap().opt.unwrap();
    assert_eq!(s.paired_epochs, 2_000);
    assert!(s.strong_weak_frequency() >= 0.95, "{}", s.strong_weak_frequency());
}

#[test]
fn opt_ordering_over_many_epochs() {
    let cfg = SystemConfig { mean_load: 5.0, channels: 3, ..SystemConfig::default() };
    let accept = regularized_gamma_q(9.0, 5.0).unwrap();
    assert!(accept > 0.9);
    let spec = SimSpec::new(cfg, SimScheme::OptTiny, 10_000, 16);
    let r = sim::run(&spec, &quad()).unwrap();
    let s = r.opt.unwrap();
    assert_eq!(s.opt_below_crs, 0);
    assert!(s.mean_opt() >= s.mean_crs());
    assert!(s.mean_crs() >= s.mean_rrs());
    assert!(r.k1_counts.len() == 7);
}
