//! One-dimensional searches over the power split `a1 + a2 = delta`.

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;
use crate::rrs::{self, Interval};
use crate::{parallel, relay, Scheme};

/// Root tolerance on `p12 - p22`.
const ROOT_TOL: f64 = 1e-12;
/// Number of interior probes used to detect an identically zero gap.
const DEGENERACY_PROBES: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualReliability {
    pub a1: f64,
    /// `p12 - p22` at `a1`.
    pub gap: f64,
    /// Both devices are equally reliable over the whole feasible region; `a1`
    /// is then its midpoint.
    pub degenerate: bool,
    /// Whether `a1` lies strictly inside the feasible region `θ < a1/a2 < 1/(θμ)`.
    pub in_region: bool,
}

fn reliability_gap(cfg: &SystemConfig, a1: f64) -> Result<f64> {
    let c = cfg.with_a1(a1)?;
    Ok(rrs::p12(&c)? - rrs::p22(&c)?)
}

/// Power split giving both devices of a pair the same success probability.
///
/// The gap `p12 - p22` is negative for a vanishing first coefficient and
/// positive where the residual blocks the second device, `a1 = δ/(1+θμ)`;
/// the root is found by bisection between the two.
pub fn equal_reliability_a1(cfg: &SystemConfig) -> Result<EqualReliability> {
    cfg.validate()?;
    let delta = cfg.delta();
    let region = rrs::feasible_region(cfg.theta, cfg.mu, delta);
    if region.is_empty() {
        return Err(Error::Infeasible(format!(
            "no power split satisfies theta < a1/a2 < 1/(theta mu) at theta={}, mu={}",
            cfg.theta, cfg.mu
        )));
    }
    let mut degenerate = true;
    for j in 1..=DEGENERACY_PROBES {
        let a1 = region.lo + (region.hi - region.lo) * j as f64 / (DEGENERACY_PROBES + 1) as f64;
        if reliability_gap(cfg, a1)?.abs() > ROOT_TOL {
            degenerate = false;
            break;
        }
    }
    if degenerate {
        let a1 = region.midpoint();
        return Ok(EqualReliability { a1, gap: reliability_gap(cfg, a1)?, degenerate, in_region: true });
    }

    let mut lo = 1e-9 * delta;
    let mut hi = delta / (1.0 + cfg.theta * cfg.mu);
    let (g_lo, g_hi) = (reliability_gap(cfg, lo)?, reliability_gap(cfg, hi)?);
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::Infeasible(format!(
            "p12 - p22 does not change sign on ({lo:e}, {hi}): {g_lo:e} and {g_hi:e}"
        )));
    }
    let mut mid = 0.5 * (lo + hi);
    let mut gap = reliability_gap(cfg, mid)?;
    for _ in 0..200 {
        if gap.abs() <= ROOT_TOL || hi - lo <= f64::EPSILON * delta {
            break;
        }
        if gap < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        gap = reliability_gap(cfg, mid)?;
    }
    Ok(EqualReliability { a1: mid, gap, degenerate: false, in_region: region.contains(mid) })
}

/// Quantity maximized by [`max_served_a1`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Expected number of devices decoded by the aggregator.
    Aggregation,
    /// Expected number of devices delivered to the base station.
    EndToEnd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    /// Points of the coarse grid.
    pub grid: usize,
    /// Distance of the grid ends from `0` and `delta`, relative to `delta`.
    pub margin: f64,
    /// Final bracket width of the golden-section refinement.
    pub tol: f64,
    /// Objective spread over the grid below which it is treated as flat.
    pub flat_tol: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self { grid: 128, margin: 1e-4, tol: 1e-5, flat_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxServed {
    pub a1: f64,
    pub value: f64,
    /// The objective does not depend on `a1`; `a1` is then `delta / 2`.
    pub flat: bool,
}

/// Objective at one split. Per-rank splits are dropped so that `a1` applies
/// to every channel.
pub fn objective_at(
    cfg: &SystemConfig,
    a1: f64,
    scheme: Scheme,
    objective: Objective,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let mut c = cfg.with_a1(a1)?;
    c.rank_splits = None;
    match objective {
        Objective::Aggregation => relay::avg_active(&c, scheme, quad),
        Objective::EndToEnd => Ok(relay::avg_successful(&c, scheme, quad)?.overall),
    }
}

/// Split maximizing the objective: the best point of a uniform grid (plus
/// `delta / 2`), refined by golden-section search over its neighbouring cells.
pub fn max_served_a1(
    cfg: &SystemConfig,
    scheme: Scheme,
    objective: Objective,
    settings: &SearchSettings,
    quad: &QuadratureSpec,
) -> Result<MaxServed> {
    cfg.validate()?;
    if settings.grid < 3 || !(settings.margin > 0.0 && settings.margin < 0.5) || !(settings.tol > 0.0) {
        return Err(Error::InvalidConfig(format!("invalid search settings {settings:?}")));
    }
    let delta = cfg.delta();
    let (lo, hi) = (settings.margin * delta, (1.0 - settings.margin) * delta);
    let step = (hi - lo) / (settings.grid - 1) as f64;
    let mut points: Vec<f64> = (0..settings.grid).map(|j| lo + step * j as f64).collect();
    points.push(0.5 * delta);
    let f = |a1: f64| objective_at(cfg, a1, scheme, objective, quad);
    let values = parallel::map(&points, |&a1| f(a1)).into_iter().collect::<Result<Vec<f64>>>()?;

    let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if max - min <= settings.flat_tol * max.abs().max(1.0) {
        return Ok(MaxServed { a1: 0.5 * delta, value: values[settings.grid], flat: true });
    }
    let best = (0..values.len()).fold(0, |b, j| if values[j] > values[b] { j } else { b });
    let (best_a1, best_value) = (points[best], values[best]);
    let bracket = Interval { lo: (best_a1 - step).max(lo), hi: (best_a1 + step).min(hi) };
    let (a1, value) = golden_section(f, bracket, settings.tol)?;
    if value >= best_value {
        Ok(MaxServed { a1, value, flat: false })
    } else {
        Ok(MaxServed { a1: best_a1, value: best_value, flat: false })
    }
}

/// Maximizes `f` over `bracket` until the bracket is narrower than `tol`.
fn golden_section<F>(f: F, bracket: Interval, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn equal_reliability_root() {
        let cfg = SystemConfig::default();
        let r = equal_reliability_a1(&cfg).unwrap();
        assert!(!r.degenerate);
        assert!(r.gap.abs() <= 1e-9);
        assert!(r.a1 < cfg.delta() / (1.0 + cfg.theta * cfg.mu));
    }

    #[test]
    fn equal_reliability_degenerate_without_interference() {
        let cfg = SystemConfig { phi1: 0.0, mu: 0.0, ..SystemConfig::default() };
        let r = equal_reliability_a1(&cfg).unwrap();
        assert!(r.degenerate && r.in_region);
        assert!((r.a1 - rrs::feasible_region(1.0, 0.0, 1.0).midpoint()).abs() < 1e-15);
    }

    #[test]
    fn equal_reliability_infeasible_region() {
        let cfg = SystemConfig { theta: 2.0, mu: 0.5, ..SystemConfig::default() };
        assert!(matches!(equal_reliability_a1(&cfg), Err(Error::Infeasible(_))));
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, v) = golden_section(|x| Ok(-(x - 0.3) * (x - 0.3)), Interval { lo: 0.0, hi: 1.0 }, 1e-8).unwrap();
        assert!((x - 0.3).abs() < 1e-8 && v <= 0.0);
    }

    #[test]
    fn flat_objective_returns_midpoint() {
        let cfg = SystemConfig { mean_load: 10.0, channels: 100, ..SystemConfig::default() };
        let r = max_served_a1(&cfg, Scheme::Rrs, Objective::Aggregation, &SearchSettings::default(), &quad()).unwrap();
        assert!(r.flat);
        assert_eq!(r.a1, 0.5);
    }

    #[test]
    fn optimum_beats_reference_points() {
        let cfg = SystemConfig::default();
        let s = SearchSettings::default();
        for objective in [Objective::Aggregation, Objective::EndToEnd] {
            let r = max_served_a1(&cfg, Scheme::Rrs, objective, &s, &quad()).unwrap();
            assert!(!r.flat);
            for a1 in [0.5, s.margin, 1.0 - s.margin] {
                assert!(r.value >= objective_at(&cfg, a1, Scheme::Rrs, objective, &quad()).unwrap());
            }
        }
    }
}
