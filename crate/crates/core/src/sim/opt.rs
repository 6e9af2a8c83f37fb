use std::cell::RefCell;

use rand::Rng;

use super::epoch::{Channel, Prepared};
use super::report::SimReport;
use super::{replication_rng, run_chunked, SimScheme, SimSpec};
use crate::error::{Error, Result};
use crate::numerics::{regularized_gamma_q, QuadratureSpec};
use crate::searchspace::{enumerate_allocations, Allocation, MAX_ENUM_CHANNELS, MAX_ENUM_DEVICES};

pub const OPT_MAX_DEVICES: usize = MAX_ENUM_DEVICES;
pub const OPT_MAX_CHANNELS: usize = MAX_ENUM_CHANNELS;

/// Smallest acceptable `Pr(K <= 8)` for drawing the truncated load by rejection.
const MIN_ACCEPTANCE: f64 = 1e-3;

pub(crate) fn check_scale(spec: &SimSpec) -> Result<()> {
    let cfg = &spec.cfg;
    if cfg.channels > OPT_MAX_CHANNELS {
        return Err(Error::Scale(format!(
            "exhaustive scheduling supports at most {OPT_MAX_CHANNELS} channels, got {}",
            cfg.channels
        )));
    }
    if cfg.is_oma() {
        return Err(Error::InvalidConfig("exhaustive scheduling needs two devices per channel".into()));
    }
    match spec.conditioning {
        Some(k) if k > OPT_MAX_DEVICES => {
            Err(Error::Scale(format!("exhaustive scheduling supports at most {OPT_MAX_DEVICES} devices, got {k}")))
        }
        Some(_) => Ok(()),
        None => {
            let accept = regularized_gamma_q(OPT_MAX_DEVICES as f64 + 1.0, cfg.mean_load)?;
            if accept < MIN_ACCEPTANCE {
                return Err(Error::Scale(format!(
                    "mean load {} leaves Pr(K <= {OPT_MAX_DEVICES}) = {accept:.2e}; too small to truncate",
                    cfg.mean_load
                )));
            }
            Ok(())
        }
    }
}

/// Conditional success probabilities given the drawn gains, computed on demand.
struct Conditional<'a> {
    prepared: &'a Prepared,
    quad: &'a QuadratureSpec,
    gains: &'a [f64],
    solo: RefCell<Vec<Option<f64>>>,
    pair: RefCell<Vec<Option<(f64, f64)>>>,
}

impl<'a> Conditional<'a> {
    fn new(prepared: &'a Prepared, quad: &'a QuadratureSpec, gains: &'a [f64]) -> Self {
        let k = gains.len();
        Self { prepared, quad, gains, solo: RefCell::new(vec![None; k]), pair: RefCell::new(vec![None; k * k]) }
    }

    fn solo(&self, d: usize) -> Result<f64> {
        if let Some(p) = self.solo.borrow()[d] {
            return Ok(p);
        }
        let cfg = self.prepared.cfg();
        let p = self.prepared.field1().cdf(self.gains[d] / cfg.theta, self.quad)?;
        self.solo.borrow_mut()[d] = Some(p);
        Ok(p)
    }

    /// Sum of both success probabilities of the pair `(x, y)`.
    fn pair(&self, x: usize, y: usize) -> Result<f64> {
        let (s, w) = if self.gains[x] >= self.gains[y] { (x, y) } else { (y, x) };
        let idx = s * self.gains.len() + w;
        if let Some((a, b)) = self.pair.borrow()[idx] {
            return Ok(a + b);
        }
        let cfg = self.prepared.cfg();
        let (a1, a2, theta) = (cfg.split.a1, cfg.split.a2, cfg.theta);
        let (hs, hw) = (self.gains[s], self.gains[w]);
        let field = self.prepared.field1();
        let first = field.cdf(a1 * hs / theta - a2 * hw, self.quad)?;
        let second = field.cdf(a2 * hw / theta - cfg.mu * a1 * hs, self.quad)?;
        self.pair.borrow_mut()[idx] = Some((first, second));
        Ok(first + second)
    }

    fn expected(&self, alloc: &Allocation) -> Result<f64> {
        let mut sum = 0.0;
        for &d in &alloc.solo {
            sum += self.solo(d)?;
        }
        for &(x, y) in &alloc.pairs {
            sum += self.pair(x, y)?;
        }
        Ok(sum)
    }
}

/// The allocation of channel-dependent scheduling in enumeration form.
fn canonical(channels: &[(Channel, Option<usize>)], k: usize) -> Allocation {
    let mut solo = Vec::new();
    let mut pairs = Vec::new();
    for (ch, _) in channels {
        match *ch {
            Channel::Solo(d) => solo.push(d),
            Channel::Pair { first, second } => pairs.push((first.min(second), first.max(second))),
        }
    }
    solo.sort_unstable();
    pairs.sort_unstable();
    let used = |d: &usize| solo.contains(d) || pairs.iter().any(|&(x, y)| x == *d || y == *d);
    let silent = (0..k).filter(|d| !used(d)).collect();
    Allocation { solo, pairs, silent }
}

/// Simulates epochs scheduled by exhaustive search over all allocations.
///
/// Per epoch the allocation maximizing the expected number of successes
/// given the drawn gains is chosen, where each success probability is the
/// interference CDF at the device's SIR threshold. The load is Poisson
/// conditioned on `K <= 8` (drawn by rejection) unless fixed by the spec.
pub fn run_opt_tiny(spec: &SimSpec, quad: &QuadratureSpec) -> Result<SimReport> {
    let spec = SimSpec { scheme: SimScheme::OptTiny, ..spec.clone() };
    spec.validate()?;
    quad.validate()?;
    let prepared = Prepared::new(&spec)?;
    let n = spec.cfg.channels;
    let tables: Vec<Vec<Allocation>> =
        (0..=OPT_MAX_DEVICES).map(|k| enumerate_allocations(k, n)).collect::<Result<_>>()?;
    let empty = prepared.empty_report();
    run_chunked(&spec, &empty, |range, report| {
        for r in range {
            let mut rng = replication_rng(spec.base_seed, r);
            opt_epoch(&prepared, quad, &tables, &mut rng, report)?;
        }
        Ok(())
    })
}

fn opt_epoch<R: Rng + ?Sized>(
    prepared: &Prepared,
    quad: &QuadratureSpec,
    tables: &[Vec<Allocation>],
    rng: &mut R,
    report: &mut SimReport,
) -> Result<()> {
    let n = prepared.cfg().channels;
    let k = loop {
        let k = prepared.draw_population(rng);
        if k <= OPT_MAX_DEVICES {
            break k;
        }
    };
    let gains = prepared.draw_gains(k, rng);
    let cond = Conditional::new(prepared, quad, &gains);
    let allocations = &tables[k];

    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    let mut total = 0.0;
    for (i, a) in allocations.iter().enumerate() {
        let v = cond.expected(a)?;
        total += v;
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    let crs_alloc = canonical(&prepared.schedule_crs(&gains), k);
    let crs_value = cond.expected(&crs_alloc)?;
    let chosen = &allocations[best];

    let stats = report.opt.as_mut().expect("report built for the exhaustive scheduler");
    stats.epochs += 1;
    stats.expected_opt += best_value;
    stats.expected_crs += crs_value;
    stats.expected_rrs += total / allocations.len() as f64;
    if best_value < crs_value - 1e-12 {
        stats.opt_below_crs += 1;
    }
    if *chosen == crs_alloc {
        stats.crs_optimal_epochs += 1;
    }
    if !chosen.pairs.is_empty() {
        stats.paired_epochs += 1;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| gains[y].total_cmp(&gains[x]));
        let strong = |d: usize| order[..n.min(k)].contains(&d);
        if chosen.pairs.iter().all(|&(x, y)| strong(x) != strong(y)) {
            stats.strong_weak_epochs += 1;
        }
    }

    let channels: Vec<(Channel, Option<usize>)> = chosen
        .solo
        .iter()
        .map(|&d| (Channel::Solo(d), None))
        .chain(chosen.pairs.iter().map(|&(x, y)| (Channel::pair(x, y, &gains), None)))
        .collect();
    let outcome = prepared.finish(k, &gains, &channels, rng);
    prepared.record(&outcome, report);
    Ok(())
}
