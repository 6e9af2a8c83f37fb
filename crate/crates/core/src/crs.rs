//! Channel-dependent resource scheduling.
//!
//! Devices are ranked by decreasing channel gain. Ranks `1..=N` get a channel
//! each and rank `i + N` shares the channel of rank `i`. Each success
//! probability is approximated by replacing the ordered gains with their
//! means `E[h_i] = ψ(K+1) - ψ(i)`, which leaves a threshold `B` on the
//! outside interference alone.

use crate::config::{PowerSplit, SystemConfig};
use crate::error::{domain, Error, Result};
use crate::interference::InterferenceField;
use crate::numerics::{psi, QuadratureSpec};
use crate::parallel;
use crate::pmf::Pmf;
use crate::rrs::{self, SuccessProbs};

/// One channel under CRS: rank of its first-allocated device and the
/// instantaneous number of requesting devices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrsContext {
    pub rank: usize,
    pub population: usize,
    pub split: PowerSplit,
}

impl CrsContext {
    /// Context with the configured split for `rank`.
    pub fn new(cfg: &SystemConfig, rank: usize, population: usize) -> Self {
        Self { rank, population, split: cfg.split_for_rank(rank) }
    }
}

/// Decode position `j` and channel occupancy `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// `(j, u) = (1, 1)`: alone on the channel.
    Solo,
    /// `(1, 2)`: decoded first in a pair.
    First,
    /// `(2, 2)`: decoded second in a pair.
    Second,
}

impl Slot {
    pub fn from_indices(j: u8, u: u8) -> Result<Self> {
        match (j, u) {
            (1, 1) => Ok(Slot::Solo),
            (1, 2) => Ok(Slot::First),
            (2, 2) => Ok(Slot::Second),
            _ => Err(domain(format!("invalid decode position/occupancy ({j}, {u})"))),
        }
    }
}

fn check_context(ctx: &CrsContext, slot: Slot, channels: usize) -> Result<()> {
    let CrsContext { rank: i, population: k, .. } = *ctx;
    if i == 0 || i > k {
        return Err(domain(format!("rank {i} outside 1..={k}")));
    }
    if slot != Slot::Solo && i + channels > k {
        return Err(domain(format!("rank {i} has no partner: {i} + {channels} exceeds population {k}")));
    }
    Ok(())
}

/// Interference threshold `B` such that success is approximated by `Pr(I < B)`.
pub fn b_coefficient(ctx: &CrsContext, slot: Slot, cfg: &SystemConfig) -> Result<f64> {
    let n = cfg.channels;
    check_context(ctx, slot, n)?;
    let (i, k) = (ctx.rank as f64, ctx.population as f64);
    let (a1, a2, theta, mu) = (ctx.split.a1, ctx.split.a2, cfg.theta, cfg.mu);
    let top = psi(k + 1.0);
    Ok(match slot {
        Slot::Solo => (top - psi(i)) / theta,
        Slot::First => (a1 / theta - a2) * top + a2 * psi(i + n as f64) - a1 / theta * psi(i),
        Slot::Second => (a2 / theta - mu * a1) * top + mu * a1 * psi(i) - a2 / theta * psi(i + n as f64),
    })
}

/// Approximate success probability of the device in `slot` on the channel
/// described by `ctx`.
pub fn success(ctx: &CrsContext, slot: Slot, cfg: &SystemConfig, spec: &QuadratureSpec) -> Result<f64> {
    cfg.validate()?;
    let b = b_coefficient(ctx, slot, cfg)?;
    cfg.field1()?.cdf(b, spec)
}

fn success_with(
    field: &InterferenceField,
    cfg: &SystemConfig,
    rank: usize,
    k: usize,
    slot: Slot,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let ctx = CrsContext::new(cfg, rank, k);
    field.cdf(b_coefficient(&ctx, slot, cfg)?, spec)
}

fn mean_over<I>(
    field: &InterferenceField,
    cfg: &SystemConfig,
    ranks: I,
    k: usize,
    slot: Slot,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    I: Iterator<Item = usize>,
{
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in ranks {
        sum += success_with(field, cfg, i, k, slot, spec)?;
        count += 1;
    }
    Ok(sum / count as f64)
}

/// Mean solo success over ranks `k-N+1..=N`, for `N < k < 2N`.
pub fn mean_solo(cfg: &SystemConfig, k: usize, spec: &QuadratureSpec) -> Result<f64> {
    let n = cfg.channels;
    if !(n < k && k < 2 * n) {
        return Err(Error::Range(format!("solo average needs N < k < 2N, got k={k}, N={n}")));
    }
    mean_over(&cfg.field1()?, cfg, k - n + 1..=n, k, Slot::Solo, spec)
}

/// Mean pair successes (first, second) over ranks `1..=k-N`, for `k > N`.
pub fn mean_pair_partial(cfg: &SystemConfig, k: usize, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let n = cfg.channels;
    if k <= n {
        return Err(Error::Range(format!("partial pair average needs k > N, got k={k}, N={n}")));
    }
    let field = cfg.field1()?;
    Ok((
        mean_over(&field, cfg, 1..=k - n, k, Slot::First, spec)?,
        mean_over(&field, cfg, 1..=k - n, k, Slot::Second, spec)?,
    ))
}

/// Mean pair successes (first, second) over ranks `1..=N`, for `k >= 2N`.
pub fn mean_pair_full(cfg: &SystemConfig, k: usize, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let n = cfg.channels;
    if k < 2 * n {
        return Err(Error::Range(format!("full pair average needs k >= 2N, got k={k}, N={n}")));
    }
    let field = cfg.field1()?;
    Ok((mean_over(&field, cfg, 1..=n, k, Slot::First, spec)?, mean_over(&field, cfg, 1..=n, k, Slot::Second, spec)?))
}

/// Rank-averaged probabilities for a population of `k` devices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedProbs {
    /// Solo success; absent once every channel is shared (`k >= 2N`).
    pub p11: Option<f64>,
    pub p12: f64,
    pub p22: f64,
}

pub fn averaged_probs(cfg: &SystemConfig, k: usize, spec: &QuadratureSpec) -> Result<AveragedProbs> {
    cfg.validate()?;
    let n = cfg.channels;
    if k <= n {
        return Err(Error::Range(format!("no shared channel when k={k} <= N={n}")));
    }
    if k < 2 * n {
        let (p12, p22) = mean_pair_partial(cfg, k, spec)?;
        Ok(AveragedProbs { p11: Some(mean_solo(cfg, k, spec)?), p12, p22 })
    } else {
        let (p12, p22) = mean_pair_full(cfg, k, spec)?;
        Ok(AveragedProbs { p11: None, p12, p22 })
    }
}

/// Mean success over the top `N` ranks when only one device fits per channel.
fn mean_oma(cfg: &SystemConfig, k: usize, spec: &QuadratureSpec) -> Result<f64> {
    mean_over(&cfg.field1()?, cfg, 1..=cfg.channels, k, Slot::Solo, spec)
}

/// Approximate PMF of the number of successful devices under CRS.
///
/// Populations up to `N` are exact (the solo devices form an exchangeable
/// set). Larger populations plug the rank-averaged probabilities into the
/// binomial structure of random scheduling, truncating the Poisson sum once
/// less than `1e-12` of its mass remains.
pub fn pmf(cfg: &SystemConfig, spec: &QuadratureSpec) -> Result<Pmf> {
    cfg.validate()?;
    let n = cfg.channels;
    let oma = cfg.is_oma();
    let len = rrs::support_len(cfg);
    let p11 = rrs::p11(cfg)?;
    let mut probs = vec![0.0; len];
    for (k1, v) in rrs::solo_block(n, cfg.mean_load, p11).into_iter().enumerate() {
        probs[k1] = v;
    }
    let (k_max, tail) = rrs::poisson_truncation(cfg.mean_load);
    let ks: Vec<usize> = (n + 1..=k_max.max(2 * n)).collect();
    let blocks = parallel::map(&ks, |&k| -> Result<Vec<f64>> {
        let w = rrs::ln_poisson(k, cfg.mean_load).exp();
        if k >= 2 * n && k > k_max {
            return Ok(Vec::new());
        }
        let p = if oma {
            SuccessProbs { p11: mean_oma(cfg, k, spec)?, p12: 0.0, p22: 0.0 }
        } else {
            let avg = averaged_probs(cfg, k, spec)?;
            SuccessProbs { p11: avg.p11.unwrap_or(0.0), p12: avg.p12, p22: avg.p22 }
        };
        let cond = rrs::conditional_probs(n, oma, k, &p, len);
        Ok(cond.into_iter().map(|c| w * c).collect())
    });
    for block in blocks {
        for (slot, v) in probs.iter_mut().zip(block?) {
            *slot += v;
        }
    }
    for v in &mut probs {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(Pmf::from_raw(probs, tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    #[test]
    fn b11_recurrence_values() {
        let c = SystemConfig { theta: 2.0, ..cfg() };
        let k = 7;
        let b = b_coefficient(&CrsContext::new(&c, k, k), Slot::Solo, &c).unwrap();
        assert!((b - 1.0 / (k as f64 * 2.0)).abs() < 1e-12);
        let c = SystemConfig { theta: 1.0, ..cfg() };
        let b = b_coefficient(&CrsContext::new(&c, 1, 2), Slot::Solo, &c).unwrap();
        assert!((b - 1.5).abs() < 1e-12);
    }

    #[test]
    fn b22_without_residual() {
        let n = 4;
        let c = SystemConfig { channels: n, mu: 0.0, theta: 1.0, ..cfg() };
        let k = 2 * n;
        let b = b_coefficient(&CrsContext::new(&c, 1, k), Slot::Second, &c).unwrap();
        let expected = 0.5 * (psi(k as f64 + 1.0) - psi(1.0 + n as f64));
        assert!((b - expected).abs() < 1e-12);
    }

    #[test]
    fn invalid_contexts() {
        let c = SystemConfig { channels: 3, ..cfg() };
        assert!(b_coefficient(&CrsContext::new(&c, 0, 5), Slot::Solo, &c).is_err());
        assert!(b_coefficient(&CrsContext::new(&c, 3, 5), Slot::First, &c).is_err());
        assert!(Slot::from_indices(2, 1).is_err());
        assert_eq!(Slot::from_indices(2, 2).unwrap(), Slot::Second);
    }

    #[test]
    fn success_is_cdf_of_b() {
        let c = cfg();
        let spec = QuadratureSpec::default();
        let ctx = CrsContext::new(&c, 3, 60);
        let b = b_coefficient(&ctx, Slot::First, &c).unwrap();
        let direct = c.field1().unwrap().cdf(b, &spec).unwrap();
        assert_eq!(success(&ctx, Slot::First, &c, &spec).unwrap(), direct);
    }

    #[test]
    fn rank_ranges() {
        let c = SystemConfig { channels: 3, ..cfg() };
        let spec = QuadratureSpec::default();
        let solo = mean_solo(&c, 5, &spec).unwrap();
        let only = success(&CrsContext::new(&c, 3, 5), Slot::Solo, &c, &spec).unwrap();
        assert_eq!(solo, only);
        let (f, _) = mean_pair_partial(&c, 4, &spec).unwrap();
        let single = success(&CrsContext::new(&c, 1, 4), Slot::First, &c, &spec).unwrap();
        assert_eq!(f, single);
        assert!(matches!(mean_solo(&c, 6, &spec), Err(Error::Range(_))));
        assert!(matches!(mean_pair_full(&c, 5, &spec), Err(Error::Range(_))));
        assert!(averaged_probs(&c, 6, &spec).unwrap().p11.is_none());
    }

    #[test]
    fn light_load_matches_random_scheduling() {
        let c = SystemConfig { mean_load: 1.0, channels: 30, ..cfg() };
        let spec = QuadratureSpec::default();
        let crs = pmf(&c, &spec).unwrap();
        let rrs = rrs::pmf(&c).unwrap();
        assert!(crs.max_abs_diff(&rrs) < 1e-6);
    }

    #[test]
    fn section_v_pmf_normalized() {
        let p = pmf(&cfg(), &QuadratureSpec::default()).unwrap();
        p.validate().unwrap();
        assert!((p.sum() - 1.0).abs() < 1e-8 + p.truncation_mass());
    }
}
