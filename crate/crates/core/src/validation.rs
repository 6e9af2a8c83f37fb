//! End-to-end checks of the closed forms against simulation, brute force and
//! the qualitative orderings they should reproduce.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::config::{PowerSplit, SystemConfig};
use crate::error::Result;
use crate::numerics::QuadratureSpec;
use crate::optimizer::{self, Objective, SearchSettings};
use crate::sim::{self, replication_rng, SimOptions, SimScheme, SimSpec, Tally};
use crate::{crs, parallel, relay, rrs, searchspace, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// Within the hard limit but outside the target.
    Warn,
    Fail,
    /// Diagnostic value, not judged.
    Info,
}

impl Status {
    fn judge(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Warn => "warn",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

/// One measured quantity and its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub limit: f64,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), measured, limit, status: Status::judge(measured <= limit), detail: detail.into() }
    }

    fn holds(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        let m = if ok { 1.0 } else { 0.0 };
        Self { name: name.into(), measured: m, limit: 1.0, status: Status::judge(ok), detail: detail.into() }
    }

    fn info(name: impl Into<String>, measured: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), measured, limit: f64::NAN, status: Status::Info, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    /// Passes when no check failed; warnings pass.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn status(&self) -> Status {
        if !self.passed() {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Warn) {
            Status::Warn
        } else {
            Status::Pass
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationSettings {
    /// Epochs per simulation check.
    pub replications: u64,
    /// Draws per distribution check.
    pub samples: u64,
    pub seed: u64,
    pub quad: QuadratureSpec,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self { replications: 100_000, samples: 1_000_000, seed: 42, quad: QuadratureSpec::default() }
    }
}

impl ValidationSettings {
    /// Independent seed for criterion `id`.
    fn seed_for(&self, id: u8) -> u64 {
        self.seed ^ (u64::from(id) << 56)
    }
}

/// Number of standard errors between an estimate and its target.
fn z_score(t: &Tally, want: f64) -> f64 {
    let diff = (t.estimate() - want).abs();
    let se = t.stderr();
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff / se
    } else {
        f64::INFINITY
    }
}

fn z_check(name: &str, t: &Tally, want: f64) -> Check {
    let z = z_score(t, want);
    Check::at_most(name, z, 3.0, format!("simulated {:.6} +/- {:.6}, analytic {want:.6}", t.estimate(), t.stderr()))
}

/// `n` draws of `f`, generated in fixed chunks so the result does not depend
/// on the number of threads.
fn draws<T, F>(n: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync + Send,
{
    const CHUNK: u64 = 16_384;
    let chunks: Vec<u64> = (0..n.div_ceil(CHUNK)).collect();
    parallel::map(&chunks, |&c| {
        let mut rng = replication_rng(seed, c);
        (c * CHUNK..((c + 1) * CHUNK).min(n)).map(|_| f(&mut rng)).collect::<Vec<T>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F>(sample: &mut [f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Upper bound on the KS distance evaluating the CDF only at every
/// `stride`-th order statistic; monotonicity bounds the gaps.
pub fn ks_distance_bound<F>(sample: &mut [f64], stride: usize, cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    sample.sort_by(f64::total_cmp);
    let len = sample.len();
    let n = len as f64;
    let mut idx: Vec<usize> = (0..len).step_by(stride.max(1)).collect();
    if idx.last() != Some(&(len - 1)) {
        idx.push(len - 1);
    }
    let values = parallel::map(&idx, |&i| cdf(sample[i])).into_iter().collect::<Result<Vec<f64>>>()?;
    // ECDF just after x_(i) is (i+1)/n and just before it is i/n.
    let mut d = values[0].max(idx[0] as f64 / n);
    for w in 0..idx.len() {
        let (i, fi) = (idx[w], values[w]);
        d = d.max((i + 1) as f64 / n - fi).max(fi - i as f64 / n);
        if w + 1 < idx.len() {
            let (j, fj) = (idx[w + 1], values[w + 1]);
            // order statistics strictly between i and j
            d = d.max(j as f64 / n - fi).max(fj - (i + 1) as f64 / n);
        }
    }
    Ok(d.max(1.0 - values[values.len() - 1]))
}

/// The analysed scenario with `K = 45` requesting devices fixed.
pub fn criterion_1(s: &ValidationSettings) -> Result<CriterionReport> {
    let cfg = SystemConfig::default();
    let spec = SimSpec::new(cfg.clone(), SimScheme::Rrs, s.replications, s.seed_for(1)).conditioned(45);
    let r = sim::run(&spec, &s.quad)?;
    let p = rrs::success_probs(&cfg)?;
    Ok(CriterionReport {
        id: 1,
        title: "success probabilities under random scheduling vs simulation",
        checks: vec![
            z_check("p11 z-score", &r.solo, p.p11),
            z_check("p12 z-score", &r.first, p.p12),
            z_check("p22 z-score", &r.second, p.p22),
        ],
    })
}

pub fn criterion_2(s: &ValidationSettings) -> Result<CriterionReport> {
    let cfg = SystemConfig::default();
    let analytic = rrs::pmf(&cfg)?;
    let spec = SimSpec::new(cfg.clone(), SimScheme::Rrs, s.replications, s.seed_for(2));
    let r = sim::run(&spec, &s.quad)?;
    let tv = analytic.total_variation(&r.pmf());
    let decorrelated =
        sim::run(&spec.clone().with_options(SimOptions { decorrelate_pairs: true, ..SimOptions::default() }), &s.quad)?;
    let tv_independent = analytic.total_variation(&decorrelated.pmf());

    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        for m in [0.5, 2.0, 10.0] {
            let c = SystemConfig { channels: n, mean_load: m, ..cfg.clone() };
            worst = worst.max(rrs::pmf(&c)?.max_abs_diff(&rrs::pmf_direct(&c)?));
        }
    }
    Ok(CriterionReport {
        id: 2,
        title: "distribution of decoded devices under random scheduling",
        checks: vec![
            Check::at_most(
                "total variation vs simulation",
                tv,
                0.02,
                format!(
                    "means {:.4} analytic vs {:.4} simulated; the closed form treats the two outcomes of a pair as independent",
                    analytic.mean(),
                    r.active.mean()
                ),
            ),
            Check::info(
                "total variation vs decorrelated simulation",
                tv_independent,
                "second-decoded outcome drawn from an independent realization",
            ),
            Check::at_most("closed form vs Poisson mixture", worst, 1e-8, "max abs difference, N 1..8, load 0.5/2/10"),
        ],
    })
}

pub fn criterion_3(s: &ValidationSettings) -> Result<CriterionReport> {
    let cfg = SystemConfig::default();
    let analytic = crs::pmf(&cfg, &s.quad)?;
    let spec = SimSpec::new(cfg, SimScheme::Crs, s.replications, s.seed_for(3));
    let r = sim::run(&spec, &s.quad)?;
    let tv = analytic.total_variation(&r.pmf());
    let status = if tv <= 0.05 {
        Status::Pass
    } else if tv <= 0.10 {
        Status::Warn
    } else {
        Status::Fail
    };
    Ok(CriterionReport {
        id: 3,
        title: "channel-dependent scheduling approximation vs simulation",
        checks: vec![Check {
            name: "total variation vs simulation".into(),
            measured: tv,
            limit: 0.05,
            status,
            detail: format!(
                "means {:.4} analytic vs {:.4} simulated; fails above 0.10",
                analytic.mean(),
                r.active.mean()
            ),
        }],
    })
}

pub fn criterion_4(s: &ValidationSettings) -> Result<CriterionReport> {
    let field = SystemConfig::default().field1()?;
    let mut sample = draws(s.samples, s.seed_for(4), |rng| field.sample(rng));
    let stride = (sample.len() / 4000).max(1);
    let ks = ks_distance_bound(&mut sample, stride, |x| field.cdf(x, &s.quad))?;
    let mut checks = vec![Check::at_most("KS distance", ks, 0.005, format!("upper bound over {} draws", sample.len()))];
    let n = sample.len() as f64;
    for t in [0.25, 1.0, 4.0] {
        let (sum, sum_sq) = sample.iter().fold((0.0, 0.0), |(a, b), &x| {
            let e = (-t * x).exp();
            (a + e, b + e * e)
        });
        let mean = sum / n;
        let se = ((sum_sq / n - mean * mean).max(0.0) / (n - 1.0)).sqrt();
        let want = field.laplace(t)?;
        checks.push(Check::at_most(
            format!("Laplace z-score at s={t}"),
            (mean - want).abs() / se,
            3.0,
            format!("empirical {mean:.6}, exact {want:.6}"),
        ));
    }
    Ok(CriterionReport { id: 4, title: "outside interference law", checks })
}

fn sup_distance<F>(mut sample: Vec<f64>, cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    ks_distance(&mut sample, cdf)
}

pub fn criterion_5(s: &ValidationSettings) -> Result<CriterionReport> {
    let pairs = |seed: u64| {
        draws(s.samples, seed, |rng: &mut ChaCha8Rng| {
            let x: f64 = Exp1.sample(rng);
            let y: f64 = Exp1.sample(rng);
            (x.max(y), x.min(y))
        })
    };
    let mut checks = Vec::new();
    for (j, (a1, a2, theta)) in [(0.7, 0.3, 1.0), (0.3, 0.7, 1.0)].into_iter().enumerate() {
        let c = theta * a2 / a1;
        let v: Vec<f64> = pairs(s.seed_for(5) + j as u64).into_iter().map(|(hs, hw)| hs - c * hw).collect();
        let d = sup_distance(v, |x| rrs::cdf_v1(x, a1, a2, theta))?;
        checks.push(Check::at_most(format!("V1 sup distance, theta a2/a1 = {c:.3}"), d, 0.005, ""));
    }
    for (j, (a1, a2, theta, mu)) in [(0.5, 0.5, 1.0, 0.1), (0.9, 0.1, 1.0, 0.5)].into_iter().enumerate() {
        let c = theta * mu * a1 / a2;
        let v: Vec<f64> = pairs(s.seed_for(5) + 10 + j as u64).into_iter().map(|(hs, hw)| hw - c * hs).collect();
        let d = sup_distance(v, |x| rrs::cdf_v2(x, a1, a2, theta, mu))?;
        checks.push(Check::at_most(format!("V2 sup distance, theta mu a1/a2 = {c:.3}"), d, 0.005, ""));
    }
    let blocked = SystemConfig { mu: 0.5, split: PowerSplit::new(0.9, 1.0)?, ..SystemConfig::default() };
    let p22 = rrs::p22(&blocked)?;
    checks.push(Check::holds("p22 is exactly 0 once the residual blocks", p22 == 0.0, format!("p22 = {p22}")));
    Ok(CriterionReport { id: 5, title: "order-statistic CDFs", checks })
}

pub fn criterion_6(_s: &ValidationSettings) -> Result<CriterionReport> {
    let reports = searchspace::all_count_reports();
    let mismatches: Vec<_> = reports.iter().filter(|r| !r.matches()).collect();
    let detail = match mismatches.first() {
        Some(r) => {
            format!("{} of {} cases differ, e.g. {}", mismatches.len(), reports.len(), r.note().unwrap_or_default())
        }
        None => format!("all {} cases agree", reports.len()),
    };
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        for m in [1.0, 5.0, 10.0, 20.0] {
            let closed = searchspace::avg_dim(m, n)?;
            let direct = searchspace::avg_dim_direct(m, n)?;
            worst = worst.max(((closed - direct) / direct).abs());
        }
    }
    let big = searchspace::avg_dim(60.0, 30)?;
    Ok(CriterionReport {
        id: 6,
        title: "search-space size",
        checks: vec![
            Check::at_most("enumeration vs counting formula mismatches", mismatches.len() as f64, 0.0, detail),
            Check::at_most("average size closed form vs direct sum", worst, 1e-9, "max relative error"),
            Check::holds("average size at load 60, 30 channels exceeds 1e15", big > 1e15, format!("{big:.4e}")),
        ],
    })
}

pub fn criterion_7(s: &ValidationSettings) -> Result<CriterionReport> {
    let cfg = SystemConfig::default();
    let k1s = [1, 10, 30, 60];
    let tallies = sim::relay_trials(&cfg, &k1s, s.replications, s.seed_for(7))?;
    let mut checks = Vec::new();
    for (t, &k1) in tallies.iter().zip(&k1s) {
        checks.push(z_check(&format!("relay z-score at k1={k1}"), t, relay::relay_success(&cfg, k1)?));
    }
    let hybrid = SystemConfig { channels: 20, mean_load: 60.0, tau: 0.2, ..cfg };
    let oma = SystemConfig { max_per_channel: 1, ..hybrid.clone() };
    let h = relay::avg_successful(&hybrid, Scheme::Rrs, &s.quad)?.overall;
    let o = relay::avg_successful(&oma, Scheme::Rrs, &s.quad)?.overall;
    checks.push(Check::holds("hybrid serves more than OMA at N=20, load 60", h > o, format!("{h:.4} vs {o:.4}")));
    Ok(CriterionReport { id: 7, title: "relay success and end-to-end ordering", checks })
}

pub fn criterion_8(s: &ValidationSettings) -> Result<CriterionReport> {
    let base = SystemConfig::default();
    let mut roots = Vec::new();
    for e in [-1.5, -1.0, -0.5] {
        let c = SystemConfig { phi1: 10f64.powf(e), ..base.clone() };
        roots.push(optimizer::equal_reliability_a1(&c)?.a1);
    }
    let decreasing = roots.windows(2).all(|w| w[1] < w[0]);
    let settings = SearchSettings::default();
    let heavy = SystemConfig { phi1: 1.0, ..base.clone() };
    let best = optimizer::max_served_a1(&heavy, Scheme::Rrs, Objective::Aggregation, &settings, &s.quad)?;
    let mut served = Vec::new();
    for delta in [0.25, 0.5, 1.0, 2.0] {
        let c = SystemConfig { tau: 0.1, split: PowerSplit::even(delta)?, ..base.clone() };
        served.push(optimizer::max_served_a1(&c, Scheme::Rrs, Objective::EndToEnd, &settings, &s.quad)?.value);
    }
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
    Ok(CriterionReport {
        id: 8,
        title: "power-split optimization trends",
        checks: vec![
            Check::holds("equal-reliability a1 decreases in phi1", decreasing, fmt(&roots)),
            Check {
                name: "max-served a1 / delta at phi1 = 1".into(),
                measured: best.a1 / heavy.delta(),
                limit: 0.95,
                status: Status::judge(best.a1 >= 0.95 * heavy.delta()),
                detail: "must be at least the limit".into(),
            },
            Check::holds(
                "optimized end-to-end served count nondecreasing in delta",
                served.windows(2).all(|w| w[1] >= w[0]),
                fmt(&served),
            ),
        ],
    })
}

pub type CriterionFn = fn(&ValidationSettings) -> Result<CriterionReport>;

/// Every criterion in order.
pub const CRITERIA: [CriterionFn; 8] =
    [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8];

pub fn run_all(s: &ValidationSettings) -> Result<Vec<CriterionReport>> {
    CRITERIA.iter().map(|f| f(s)).collect()
}
