//! Event-level Monte Carlo simulation of aggregation epochs.
//!
//! Each epoch draws the number of requesting devices, their unit-exponential
//! gains and one outside-interference realization per channel, schedules the
//! devices, decodes every channel by SIR and finally relays the decoded
//! payloads over one more faded, interfered channel.
//!
//! Replication `r` draws from stream `r` of a ChaCha8 generator keyed by the
//! base seed, and partial reports are merged in a fixed order, so a report
//! depends only on the spec and never on the number of worker threads.

mod epoch;
mod opt;
mod report;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;
use crate::parallel;

pub use epoch::{run_epoch, DeviceOutcome, EpochOutcome, Position, Prepared};
pub use opt::{run_opt_tiny, OPT_MAX_CHANNELS, OPT_MAX_DEVICES};
pub use report::{Moments, OptStats, RankTallies, SimReport, Tally};

/// Scheduler driven by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimScheme {
    Rrs,
    Crs,
    /// Exhaustive search over every allocation; desk scale only.
    OptTiny,
}

impl std::fmt::Display for SimScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SimScheme::Rrs => "rrs",
            SimScheme::Crs => "crs",
            SimScheme::OptTiny => "opt-tiny",
        })
    }
}

/// Modelling switches that depart from the analysed system. Both are off by
/// default and in every validation run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimOptions {
    /// A second-decoded device sees the full first signal, not the residual,
    /// when the first decode failed.
    pub full_interference_on_failure: bool,
    /// The second-decoded outcome of a pair is evaluated on an independent
    /// interference draw (and, under random scheduling, independent gains),
    /// which removes the correlation between the two outcomes of a pair.
    pub decorrelate_pairs: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub cfg: SystemConfig,
    pub scheme: SimScheme,
    pub replications: u64,
    pub base_seed: u64,
    /// Fixed number of requesting devices instead of a Poisson draw.
    pub conditioning: Option<usize>,
    pub options: SimOptions,
}

impl SimSpec {
    pub fn new(cfg: SystemConfig, scheme: SimScheme, replications: u64, base_seed: u64) -> Self {
        Self { cfg, scheme, replications, base_seed, conditioning: None, options: SimOptions::default() }
    }

    pub fn conditioned(mut self, k: usize) -> Self {
        self.conditioning = Some(k);
        self
    }

    pub fn with_options(mut self, options: SimOptions) -> Self {
        self.options = options;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be at least 1".into()));
        }
        if self.scheme == SimScheme::OptTiny {
            opt::check_scale(self)?;
        }
        Ok(())
    }
}

/// Generator for replication `r`.
pub fn replication_rng(base_seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(r);
    rng
}

const CHUNK: u64 = 1024;

/// Runs `per_chunk` over fixed chunks of replications and merges the partial
/// reports in chunk order.
pub(crate) fn run_chunked<F>(spec: &SimSpec, empty: &SimReport, per_chunk: F) -> Result<SimReport>
where
    F: Fn(std::ops::Range<u64>, &mut SimReport) -> Result<()> + Sync + Send,
{
    let chunks: Vec<u64> = (0..spec.replications.div_ceil(CHUNK)).collect();
    let parts = parallel::map(&chunks, |&c| -> Result<SimReport> {
        let mut part = empty.clone();
        let range = c * CHUNK..((c + 1) * CHUNK).min(spec.replications);
        per_chunk(range, &mut part)?;
        Ok(part)
    });
    let mut total = empty.clone();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total)
}

/// Simulates `spec.replications` epochs.
///
/// `quad` is used by the exhaustive scheduler only, to evaluate the
/// interference CDF.
pub fn run(spec: &SimSpec, quad: &QuadratureSpec) -> Result<SimReport> {
    spec.validate()?;
    if spec.scheme == SimScheme::OptTiny {
        return run_opt_tiny(spec, quad);
    }
    let prepared = Prepared::new(spec)?;
    let empty = prepared.empty_report();
    run_chunked(spec, &empty, |range, report| {
        for r in range {
            let mut rng = replication_rng(spec.base_seed, r);
            let outcome = prepared.epoch(&mut rng);
            prepared.record(&outcome, report);
        }
        Ok(())
    })
}

/// Relay outcomes at several loads, evaluated on shared draws: sample `i`
/// uses the same gain and interference for every entry of `k1s`.
pub fn relay_trials(cfg: &SystemConfig, k1s: &[usize], samples: u64, base_seed: u64) -> Result<Vec<Tally>> {
    cfg.validate()?;
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    let field = cfg.field2()?;
    let thresholds: Vec<f64> = k1s.iter().map(|&k1| epoch::relay_threshold(cfg.tau, k1)).collect();
    let chunks: Vec<u64> = (0..samples.div_ceil(CHUNK)).collect();
    let parts = parallel::map(&chunks, |&c| {
        let mut tallies = vec![Tally::default(); k1s.len()];
        for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
            let mut rng = replication_rng(base_seed, i);
            let g: f64 = Exp1.sample(&mut rng);
            let noise = field.sample(&mut rng);
            for (t, &threshold) in tallies.iter_mut().zip(&thresholds) {
                t.record(g >= threshold * noise);
            }
        }
        tallies
    });
    let mut total = vec![Tally::default(); k1s.len()];
    for part in parts {
        for (a, b) in total.iter_mut().zip(&part) {
            a.merge(b);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rrs;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn rejects_empty_runs() {
        let spec = SimSpec::new(SystemConfig::default(), SimScheme::Rrs, 0, 1);
        assert!(matches!(run(&spec, &quad()), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn single_replication_equals_its_epoch() {
        let spec = SimSpec::new(SystemConfig::default(), SimScheme::Rrs, 1, 9);
        let report = run(&spec, &quad()).unwrap();
        let prepared = Prepared::new(&spec).unwrap();
        let outcome = prepared.epoch(&mut replication_rng(9, 0));
        assert_eq!(report.replications, 1);
        assert_eq!(report.active.sum, outcome.decoded as u64);
        assert_eq!(report.k1_counts[outcome.decoded], 1);
        assert_eq!(report.relay[outcome.decoded].successes, u64::from(outcome.relay_success));
    }

    #[test]
    fn same_seed_same_report() {
        let spec = SimSpec::new(SystemConfig::default(), SimScheme::Crs, 3000, 5);
        assert_eq!(run(&spec, &quad()).unwrap(), run(&spec, &quad()).unwrap());
        let other = SimSpec { base_seed: 6, ..spec.clone() };
        assert_ne!(run(&spec, &quad()).unwrap(), run(&other, &quad()).unwrap());
    }

    #[test]
    fn conditioned_rrs_matches_success_probabilities() {
        let cfg = SystemConfig::default();
        let spec = SimSpec::new(cfg.clone(), SimScheme::Rrs, 20_000, 11).conditioned(45);
        let r = run(&spec, &quad()).unwrap();
        let p = rrs::success_probs(&cfg).unwrap();
        for (t, want) in [(r.solo, p.p11), (r.first, p.p12), (r.second, p.p22)] {
            assert!((t.estimate() - want).abs() < 4.0 * t.stderr(), "{} vs {want}", t.estimate());
        }
        assert_eq!(r.k1_counts.iter().sum::<u64>(), 20_000);
    }

    #[test]
    fn relay_trials_track_laplace() {
        let cfg = SystemConfig::default();
        let k1s = [1, 10, 30, 60];
        let tallies = relay_trials(&cfg, &k1s, 40_000, 3).unwrap();
        for (t, &k1) in tallies.iter().zip(&k1s) {
            let want = crate::relay::relay_success(&cfg, k1).unwrap();
            assert!((t.estimate() - want).abs() < 4.0 * t.stderr() + 1e-12, "k1={k1}");
        }
        // shared draws make the outcomes nested
        assert!(tallies.windows(2).all(|w| w[1].successes <= w[0].successes));
    }
}
