use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::report::SimReport;
use super::{SimOptions, SimScheme, SimSpec};
use crate::config::{PowerSplit, SystemConfig};
use crate::error::{Error, Result};
use crate::interference::InterferenceField;

/// Role of a device on its channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Solo,
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceOutcome {
    pub position: Position,
    /// Rank of the channel's first-allocated device under channel-dependent
    /// scheduling.
    pub rank: Option<usize>,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochOutcome {
    /// Devices requesting service.
    pub population: usize,
    /// Devices decoded by the aggregator.
    pub decoded: usize,
    pub relay_success: bool,
    /// Every scheduled device; silent devices are not listed.
    pub devices: Vec<DeviceOutcome>,
}

impl EpochOutcome {
    /// Devices delivered to the base station.
    pub fn served(&self) -> usize {
        if self.relay_success {
            self.decoded
        } else {
            0
        }
    }
}

/// `2^(τ k1) - 1`.
pub(crate) fn relay_threshold(tau: f64, k1: usize) -> f64 {
    (tau * k1 as f64 * std::f64::consts::LN_2).exp_m1()
}

/// A channel carrying one or two devices, identified by index into the gain
/// vector. For pairs `first` is the stronger device.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Channel {
    Solo(usize),
    Pair { first: usize, second: usize },
}

impl Channel {
    /// Pair with the decode order set by the gains.
    pub(crate) fn pair(x: usize, y: usize, gains: &[f64]) -> Self {
        if gains[x] >= gains[y] {
            Channel::Pair { first: x, second: y }
        } else {
            Channel::Pair { first: y, second: x }
        }
    }
}

/// Validated spec with the distributions it needs.
#[derive(Debug, Clone)]
pub struct Prepared {
    cfg: SystemConfig,
    scheme: SimScheme,
    options: SimOptions,
    conditioning: Option<usize>,
    load: Poisson<f64>,
    field1: InterferenceField,
    field2: InterferenceField,
}

impl Prepared {
    pub fn new(spec: &SimSpec) -> Result<Self> {
        spec.cfg.validate()?;
        let load = Poisson::new(spec.cfg.mean_load).map_err(|e| Error::InvalidConfig(format!("mean_load: {e}")))?;
        Ok(Self {
            cfg: spec.cfg.clone(),
            scheme: spec.scheme,
            options: spec.options,
            conditioning: spec.conditioning,
            load,
            field1: spec.cfg.field1()?,
            field2: spec.cfg.field2()?,
        })
    }

    pub(crate) fn cfg(&self) -> &SystemConfig {
        &self.cfg
    }

    pub(crate) fn field1(&self) -> &InterferenceField {
        &self.field1
    }

    pub(crate) fn support(&self) -> usize {
        self.cfg.max_per_channel as usize * self.cfg.channels + 1
    }

    pub(crate) fn empty_report(&self) -> SimReport {
        let ranks = (self.scheme == SimScheme::Crs).then_some(self.cfg.channels);
        SimReport::empty(self.support(), ranks, self.scheme == SimScheme::OptTiny)
    }

    /// Number of requesting devices for one epoch.
    pub fn draw_population<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self.conditioning {
            Some(k) => k,
            None => self.load.sample(rng) as usize,
        }
    }

    pub(crate) fn draw_gains<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Vec<f64> {
        (0..k).map(|_| Exp1.sample(rng)).collect()
    }

    /// One epoch under random or channel-dependent scheduling.
    pub fn epoch<R: Rng + ?Sized>(&self, rng: &mut R) -> EpochOutcome {
        let k = self.draw_population(rng);
        let gains = self.draw_gains(k, rng);
        let channels = match self.scheme {
            SimScheme::Crs => self.schedule_crs(&gains),
            _ => self.schedule_rrs(&gains, rng),
        };
        self.finish(k, &gains, &channels, rng)
    }

    /// Uniform random placement: a random permutation fills the solo
    /// channels first and pairs the rest in order.
    fn schedule_rrs<R: Rng + ?Sized>(&self, gains: &[f64], rng: &mut R) -> Vec<(Channel, Option<usize>)> {
        let n = self.cfg.channels;
        let k = gains.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(rng);
        let solo = if self.cfg.is_oma() || k <= n { k.min(n) } else { (2 * n).saturating_sub(k) };
        let mut out: Vec<(Channel, Option<usize>)> = order[..solo].iter().map(|&d| (Channel::Solo(d), None)).collect();
        if !self.cfg.is_oma() && k > n {
            let paired = &order[solo..(2 * n).min(k)];
            out.extend(paired.chunks_exact(2).map(|p| (Channel::pair(p[0], p[1], gains), None)));
        }
        out
    }

    /// Rank `i` takes channel `i` and rank `i + N` joins it.
    pub(crate) fn schedule_crs(&self, gains: &[f64]) -> Vec<(Channel, Option<usize>)> {
        let n = self.cfg.channels;
        let k = gains.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| gains[y].total_cmp(&gains[x]));
        (0..k.min(n))
            .map(|i| {
                let partner = i + n;
                let ch = if !self.cfg.is_oma() && partner < k {
                    Channel::Pair { first: order[i], second: order[partner] }
                } else {
                    Channel::Solo(order[i])
                };
                (ch, Some(i + 1))
            })
            .collect()
    }

    fn split(&self, rank: Option<usize>) -> PowerSplit {
        match rank {
            Some(i) => self.cfg.split_for_rank(i),
            None => self.cfg.split,
        }
    }

    /// Decodes every channel, then relays.
    pub(crate) fn finish<R: Rng + ?Sized>(
        &self,
        k: usize,
        gains: &[f64],
        channels: &[(Channel, Option<usize>)],
        rng: &mut R,
    ) -> EpochOutcome {
        let theta = self.cfg.theta;
        let mut devices = Vec::with_capacity(k.min(2 * self.cfg.channels));
        for &(ch, rank) in channels {
            let noise = self.field1.sample(rng);
            match ch {
                Channel::Solo(d) => {
                    devices.push(DeviceOutcome { position: Position::Solo, rank, success: gains[d] > theta * noise })
                }
                Channel::Pair { first, second } => {
                    let PowerSplit { a1, a2 } = self.split(rank);
                    let (hs, hw) = (gains[first], gains[second]);
                    let first_ok = a1 * hs > theta * (noise + a2 * hw);
                    let (hs2, hw2, noise2) =
                        if self.options.decorrelate_pairs { self.fresh_pair(hs, hw, rng) } else { (hs, hw, noise) };
                    let leak = if self.options.full_interference_on_failure && !first_ok { 1.0 } else { self.cfg.mu };
                    let second_ok = a2 * hw2 > theta * (noise2 + leak * a1 * hs2);
                    devices.push(DeviceOutcome { position: Position::First, rank, success: first_ok });
                    devices.push(DeviceOutcome { position: Position::Second, rank, success: second_ok });
                }
            }
        }
        let decoded = devices.iter().filter(|d| d.success).count();
        let relay_success = self.relay(decoded, rng);
        EpochOutcome { population: k, decoded, relay_success, devices }
    }

    /// Independent realization for a decorrelated second decode. Random
    /// scheduling redraws the ordered gain pair; channel-dependent scheduling
    /// keeps the ranked gains.
    fn fresh_pair<R: Rng + ?Sized>(&self, hs: f64, hw: f64, rng: &mut R) -> (f64, f64, f64) {
        let (hs, hw) = if self.scheme == SimScheme::Crs {
            (hs, hw)
        } else {
            let x: f64 = Exp1.sample(rng);
            let y: f64 = Exp1.sample(rng);
            (x.max(y), x.min(y))
        };
        (hs, hw, self.field1.sample(rng))
    }

    pub(crate) fn relay<R: Rng + ?Sized>(&self, decoded: usize, rng: &mut R) -> bool {
        let g: f64 = Exp1.sample(rng);
        let noise = self.field2.sample(rng);
        g >= relay_threshold(self.cfg.tau, decoded) * noise
    }

    pub(crate) fn record(&self, outcome: &EpochOutcome, report: &mut SimReport) {
        report.replications += 1;
        for d in &outcome.devices {
            let tally = match d.position {
                Position::Solo => &mut report.solo,
                Position::First => &mut report.first,
                Position::Second => &mut report.second,
            };
            tally.record(d.success);
            if let (Some(ranks), Some(i)) = (&mut report.ranks, d.rank) {
                let by_rank = match d.position {
                    Position::Solo => &mut ranks.solo,
                    Position::First => &mut ranks.first,
                    Position::Second => &mut ranks.second,
                };
                by_rank[i - 1].record(d.success);
            }
        }
        report.k1_counts[outcome.decoded] += 1;
        report.relay[outcome.decoded].record(outcome.relay_success);
        report.active.record(outcome.decoded as u64);
        report.served.record(outcome.served() as u64);
    }
}

/// One epoch of `spec` on the given generator.
pub fn run_epoch<R: Rng + ?Sized>(spec: &SimSpec, rng: &mut R) -> Result<EpochOutcome> {
    spec.validate()?;
    if spec.scheme == SimScheme::OptTiny {
        return Err(Error::InvalidConfig(
            "the exhaustive scheduler needs the quadrature settings; use run_opt_tiny".into(),
        ));
    }
    Ok(Prepared::new(spec)?.epoch(rng))
}
