//! Relaying of the aggregated data to the base station, and the end-to-end
//! number of served devices.

use crate::config::SystemConfig;
use crate::error::Result;
use crate::numerics::QuadratureSpec;
use crate::pmf::Pmf;
use crate::{crs, rrs, Scheme};

/// Probability that the relay carrying `k1` payloads of `tau` bits per channel
/// use reaches the base station.
pub fn relay_success(cfg: &SystemConfig, k1: usize) -> Result<f64> {
    cfg.validate()?;
    Ok(relay_success_unchecked(cfg, k1))
}

fn relay_success_unchecked(cfg: &SystemConfig, k1: usize) -> f64 {
    if k1 == 0 || cfg.tau == 0.0 {
        return 1.0;
    }
    let threshold = (cfg.tau * k1 as f64 * std::f64::consts::LN_2).exp_m1();
    let field = cfg.field2().expect("validated config");
    field.laplace_unchecked(threshold)
}

/// Relay success for every `k1` in the support together with the expected
/// number of devices that survive both phases.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayResult {
    pub per_k1: Vec<f64>,
    pub overall: f64,
}

/// Combines a PMF of successful aggregations with relay success.
pub fn served_from_pmf(cfg: &SystemConfig, pmf: &Pmf) -> Result<RelayResult> {
    cfg.validate()?;
    let per_k1: Vec<f64> = (0..pmf.len()).map(|k1| relay_success_unchecked(cfg, k1)).collect();
    let overall = pmf.probs().iter().zip(&per_k1).enumerate().map(|(k1, (p, r))| k1 as f64 * p * r).sum();
    Ok(RelayResult { per_k1, overall })
}

pub fn scheme_pmf(cfg: &SystemConfig, scheme: Scheme, spec: &QuadratureSpec) -> Result<Pmf> {
    match scheme {
        Scheme::Rrs => rrs::pmf(cfg),
        Scheme::Crs => crs::pmf(cfg, spec),
    }
}

/// Expected number of devices decoded by the aggregator and delivered by the relay.
pub fn avg_successful(cfg: &SystemConfig, scheme: Scheme, spec: &QuadratureSpec) -> Result<RelayResult> {
    served_from_pmf(cfg, &scheme_pmf(cfg, scheme, spec)?)
}

/// Expected number of devices decoded by the aggregator, ignoring the relay.
pub fn avg_active(cfg: &SystemConfig, scheme: Scheme, spec: &QuadratureSpec) -> Result<f64> {
    Ok(scheme_pmf(cfg, scheme, spec)?.mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{regularized_gamma_p, regularized_gamma_q};

    #[test]
    fn trivial_relay_cases() {
        let cfg = SystemConfig::default();
        assert_eq!(relay_success(&cfg, 0).unwrap(), 1.0);
        let zero_rate = SystemConfig { tau: 0.0, ..cfg.clone() };
        assert_eq!(relay_success(&zero_rate, 17).unwrap(), 1.0);
        let f = cfg.field2().unwrap();
        let expected = f.laplace(2f64.powf(0.2 * 30.0) - 1.0).unwrap();
        assert!((relay_success(&cfg, 30).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn relay_decreases_in_load() {
        let cfg = SystemConfig::default();
        let r: Vec<f64> = (0..=60).map(|k| relay_success(&cfg, k).unwrap()).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn perfect_channels_serve_min_of_load_and_capacity() {
        let n = 20;
        let cfg = SystemConfig { channels: n, tau: 0.0, mu: 0.0, phi1: 1e-300, ..SystemConfig::default() };
        let got = avg_successful(&cfg, Scheme::Rrs, &QuadratureSpec::default()).unwrap();
        let m = cfg.mean_load;
        let mut oracle = 0.0;
        let mut w = (-m).exp();
        for k in 0..400usize {
            if k > 0 {
                w *= m / k as f64;
            }
            oracle += (k.min(2 * n)) as f64 * w;
        }
        assert!((got.overall - oracle).abs() < 1e-9, "{} vs {oracle}", got.overall);
        // E[min(K, c)] = m Pr(K <= c - 2) + c Pr(K >= c)
        let c = (2 * n) as f64;
        let closed = m * regularized_gamma_q(c - 1.0, m).unwrap() + c * regularized_gamma_p(c, m).unwrap();
        assert!((oracle - closed).abs() < 1e-9);
    }

    #[test]
    fn negligible_load_serves_nobody() {
        let cfg = SystemConfig { mean_load: 1e-9, ..SystemConfig::default() };
        let r = avg_successful(&cfg, Scheme::Rrs, &QuadratureSpec::default()).unwrap();
        assert!(r.overall < 1e-8);
    }
}
