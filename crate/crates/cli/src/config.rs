//! JSON scenario files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use mmtc_core::config::db_to_linear;
use mmtc_core::{PowerSplit, SystemConfig};
use serde::Deserialize;

/// On-disk scenario. Every key is optional and falls back to the default
/// scenario; interference factors are given in dB.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mean_load: Option<f64>,
    pub channels: Option<usize>,
    pub max_per_channel: Option<u8>,
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub theta: Option<f64>,
    /// Relay rate in bits per channel use per device.
    pub tau: Option<f64>,
    /// Payload bits per device; with `slot_s` and `bandwidth_hz` an
    /// alternative to `tau`.
    pub payload_bits: Option<f64>,
    pub slot_s: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub phi1_db: Option<f64>,
    pub phi2_db: Option<f64>,
    pub delta: Option<f64>,
    pub a1: Option<f64>,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
}

/// A validated scenario and the seed it asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cfg: SystemConfig,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed configuration")
    }

    pub fn into_scenario(self) -> Result<Scenario> {
        let base = SystemConfig::default();
        let tau = match (self.tau, self.payload_bits, self.slot_s, self.bandwidth_hz) {
            (Some(_), Some(_), _, _) | (Some(_), _, Some(_), _) | (Some(_), _, _, Some(_)) => {
                bail!("give either tau or payload_bits/slot_s/bandwidth_hz, not both")
            }
            (Some(t), None, None, None) => t,
            (None, Some(b), Some(t), Some(w)) => {
                if !(t > 0.0 && w > 0.0) {
                    bail!("slot_s and bandwidth_hz must be positive");
                }
                b / (t * w)
            }
            (None, None, None, None) => base.tau,
            _ => bail!("payload_bits, slot_s and bandwidth_hz must be given together"),
        };
        let delta = self.delta.unwrap_or(base.delta());
        let a1 = self.a1.unwrap_or(0.5 * delta);
        let cfg = SystemConfig {
            mean_load: self.mean_load.unwrap_or(base.mean_load),
            channels: self.channels.unwrap_or(base.channels),
            max_per_channel: self.max_per_channel.unwrap_or(base.max_per_channel),
            alpha: self.alpha.unwrap_or(base.alpha),
            mu: self.mu.unwrap_or(base.mu),
            theta: self.theta.unwrap_or(base.theta),
            tau,
            phi1: self.phi1_db.map(db_to_linear).unwrap_or(base.phi1),
            phi2: self.phi2_db.map(db_to_linear).unwrap_or(base.phi2),
            split: PowerSplit { a1, a2: delta - a1 },
            rank_splits: None,
            rho: self.rho.unwrap_or(base.rho),
        };
        cfg.validate()?;
        Ok(Scenario { cfg, seed: self.seed })
    }
}

pub fn parse_config(text: &str) -> Result<Scenario> {
    FileConfig::parse(text)?.into_scenario()
}

pub fn load_config(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default_scenario() {
        let s = parse_config("{}").unwrap();
        assert_eq!(s.cfg, SystemConfig::default());
        assert_eq!(s.seed, None);
    }

    #[test]
    fn decibels_and_split_defaults() {
        let s = parse_config(r#"{"phi1_db": -10, "phi2_db": -26, "delta": 2, "seed": 7}"#).unwrap();
        assert!((s.cfg.phi1 - 0.1).abs() < 1e-15);
        assert!((s.cfg.phi2 - 10f64.powf(-2.6)).abs() < 1e-18);
        assert_eq!((s.cfg.split.a1, s.cfg.split.a2), (1.0, 1.0));
        assert_eq!(s.seed, Some(7));
    }

    #[test]
    fn rate_from_payload_slot_and_bandwidth() {
        let s = parse_config(r#"{"payload_bits": 200, "slot_s": 0.001, "bandwidth_hz": 1e6}"#).unwrap();
        assert!((s.cfg.tau - 0.2).abs() < 1e-15);
        assert!(parse_config(r#"{"tau": 0.1, "payload_bits": 200}"#).is_err());
        assert!(parse_config(r#"{"payload_bits": 200}"#).is_err());
    }

    #[test]
    fn unknown_keys_and_bad_values() {
        let err = format!("{:#}", parse_config(r#"{"alpha": 3, "gamma": 1}"#).unwrap_err());
        assert!(err.contains("unknown field"), "{err}");
        let err = format!("{:#}", parse_config(r#"{"alpha": 1.5}"#).unwrap_err());
        assert!(err.contains("alpha must exceed 2"), "{err}");
        let err = format!("{:#}", parse_config("{\n  \"alpha\": ,\n}").unwrap_err());
        assert!(err.contains("line 2"), "{err}");
    }
}
