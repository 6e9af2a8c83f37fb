//! Scenario parameters.

use crate::error::{Error, Result};
use crate::interference::InterferenceField;

const SPLIT_TOL: f64 = 1e-12;

/// Per-channel power split between the first- and second-decoded device,
/// `a1 + a2 = delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub a1: f64,
    pub a2: f64,
}

impl PowerSplit {
    /// Split with `a1` for the first-decoded device and `delta - a1` for the second.
    pub fn new(a1: f64, delta: f64) -> Result<Self> {
        let split = Self { a1, a2: delta - a1 };
        split.validate()?;
        Ok(split)
    }

    pub fn even(delta: f64) -> Result<Self> {
        Self::new(0.5 * delta, delta)
    }

    pub fn delta(&self) -> f64 {
        self.a1 + self.a2
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a1, a2 } = *self;
        if !a1.is_finite() || !a2.is_finite() || a1 < -SPLIT_TOL || a2 < -SPLIT_TOL {
            return Err(Error::InvalidConfig(format!("power coefficients must be nonnegative, got a1={a1}, a2={a2}")));
        }
        if !(self.delta() > 0.0) {
            return Err(Error::InvalidConfig("delta must be positive".into()));
        }
        Ok(())
    }

    /// Same split with the coefficients clamped to `[0, delta]`.
    pub(crate) fn clamped(&self) -> Self {
        let delta = self.delta();
        let a1 = self.a1.clamp(0.0, delta);
        Self { a1, a2: delta - a1 }
    }
}

/// All parameters of one aggregation scenario. Interference factors are linear.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Mean number of devices requesting service per epoch.
    pub mean_load: f64,
    pub channels: usize,
    /// 1 for OMA, 2 for the hybrid scheme.
    pub max_per_channel: u8,
    pub alpha: f64,
    /// Fraction of the first-decoded signal left after cancellation.
    pub mu: f64,
    pub theta: f64,
    /// Relay rate in bits per channel use per device.
    pub tau: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub split: PowerSplit,
    /// Optional channel-dependent splits indexed by rank `i - 1`; ranks beyond
    /// the table use `split`.
    pub rank_splits: Option<Vec<PowerSplit>>,
    /// Power-control target. The model is interference limited, so it has no
    /// effect on any result.
    pub rho: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            mean_load: 60.0,
            channels: 30,
            max_per_channel: 2,
            alpha: 3.6,
            mu: 0.1,
            theta: 1.0,
            tau: 0.2,
            phi1: 0.1,
            phi2: 10f64.powf(-2.6),
            split: PowerSplit { a1: 0.5, a2: 0.5 },
            rank_splits: None,
            rho: 1.0,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.mean_load > 0.0) || !self.mean_load.is_finite() {
            return fail(format!("mean_load must be positive, got {}", self.mean_load));
        }
        if self.channels == 0 {
            return fail("channels must be at least 1".into());
        }
        if !matches!(self.max_per_channel, 1 | 2) {
            return fail(format!("max_per_channel must be 1 or 2, got {}", self.max_per_channel));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return fail(format!("alpha must exceed 2, got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return fail(format!("mu must lie in [0, 1], got {}", self.mu));
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return fail(format!("theta must be positive, got {}", self.theta));
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return fail(format!("tau must be nonnegative, got {}", self.tau));
        }
        for (name, v) in [("phi1", self.phi1), ("phi2", self.phi2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return fail(format!("{name} must be nonnegative, got {v}"));
            }
        }
        self.split.validate()?;
        if let Some(table) = &self.rank_splits {
            for s in table {
                s.validate()?;
                if (s.delta() - self.split.delta()).abs() > SPLIT_TOL {
                    return fail(format!("rank split sums to {} but delta is {}", s.delta(), self.split.delta()));
                }
            }
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.split.delta()
    }

    /// Interference law on the aggregation channels.
    pub fn field1(&self) -> Result<InterferenceField> {
        InterferenceField::new(self.phi1, self.alpha)
    }

    /// Interference law on the relay channel.
    pub fn field2(&self) -> Result<InterferenceField> {
        InterferenceField::new(self.phi2, self.alpha)
    }

    /// Copy with a new first-device coefficient and the same total budget.
    pub fn with_a1(&self, a1: f64) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.split = PowerSplit::new(a1, self.delta())?;
        Ok(cfg)
    }

    /// Power split for the channel whose first-allocated device has rank `i` (1-based).
    pub fn split_for_rank(&self, i: usize) -> PowerSplit {
        self.rank_splits.as_ref().and_then(|t| t.get(i.wrapping_sub(1)).copied()).unwrap_or(self.split)
    }

    pub fn is_oma(&self) -> bool {
        self.max_per_channel == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        let cfg = SystemConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.delta(), 1.0);
        assert!((cfg.phi1 - db_to_linear(-10.0)).abs() < 1e-15);
        assert!((cfg.phi2 - db_to_linear(-26.0)).abs() < 1e-18);
    }

    #[test]
    fn alpha_bound() {
        let cfg = SystemConfig { alpha: 1.5, ..SystemConfig::default() };
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("alpha must exceed 2"), "{err}");
    }

    #[test]
    fn split_constraints() {
        assert!(PowerSplit::new(1.2, 1.0).is_err());
        assert!(PowerSplit::new(-0.1, 1.0).is_err());
        let s = PowerSplit::new(0.3, 2.0).unwrap();
        assert!((s.a2 - 1.7).abs() < 1e-15);
        assert!(PowerSplit::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn rank_split_lookup() {
        let mut cfg =
            SystemConfig { rank_splits: Some(vec![PowerSplit::new(0.8, 1.0).unwrap()]), ..SystemConfig::default() };
        cfg.validate().unwrap();
        assert_eq!(cfg.split_for_rank(1).a1, 0.8);
        assert_eq!(cfg.split_for_rank(2).a1, 0.5);
        cfg.rank_splits = Some(vec![PowerSplit::new(0.8, 2.0).unwrap()]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn other_invariants() {
        let base = SystemConfig::default();
        assert!(SystemConfig { mean_load: 0.0, ..base.clone() }.validate().is_err());
        assert!(SystemConfig { channels: 0, ..base.clone() }.validate().is_err());
        assert!(SystemConfig { max_per_channel: 3, ..base.clone() }.validate().is_err());
        assert!(SystemConfig { mu: 1.5, ..base.clone() }.validate().is_err());
        assert!(SystemConfig { theta: 0.0, ..base.clone() }.validate().is_err());
        assert!(SystemConfig { tau: -1.0, ..base }.validate().is_err());
    }
}
