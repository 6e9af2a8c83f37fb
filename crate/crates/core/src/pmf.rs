//! Probability mass functions over the number of successful devices.

use crate::error::{Error, Result};
use crate::numerics::{ln_choose, ln_pow};

const SUM_TOL: f64 = 1e-8;

/// A PMF over `0..len`, together with the probability mass left out by
/// truncating an infinite mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    truncation_mass: f64,
}

impl Pmf {
    /// Checks that entries lie in `[0, 1]` and that the total accounts for
    /// everything except `truncation_mass`.
    pub fn new(probs: Vec<f64>, truncation_mass: f64) -> Result<Self> {
        let pmf = Self { probs, truncation_mass };
        pmf.validate()?;
        Ok(pmf)
    }

    pub(crate) fn from_raw(probs: Vec<f64>, truncation_mass: f64) -> Self {
        Self { probs, truncation_mass }
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        let mut probs = vec![0.0; len.max(at + 1)];
        probs[at] = 1.0;
        Self { probs, truncation_mass: 0.0 }
    }

    /// Empirical PMF from integer tallies.
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let probs = if total == 0 {
            vec![0.0; counts.len()]
        } else {
            counts.iter().map(|&c| c as f64 / total as f64).collect()
        };
        Self { probs, truncation_mass: 0.0 }
    }

    /// `Binomial(n, p)` on `0..=n`.
    pub fn binomial(n: usize, p: f64) -> Self {
        Self::from_raw(binomial_probs(n as u64, p), 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((k, p)) = self.probs.iter().enumerate().find(|(_, &p)| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Consistency(format!("pmf entry {k} = {p} outside [0, 1]")));
        }
        let sum = self.sum();
        if sum < 1.0 - self.truncation_mass - SUM_TOL || sum > 1.0 + SUM_TOL {
            return Err(Error::Consistency(format!("pmf sums to {sum} with truncation mass {}", self.truncation_mass)));
        }
        Ok(())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `Pr(K1 = k)`, zero outside the support.
    pub fn get(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs.iter().enumerate().map(|(k, p)| (k as f64 - m).powi(2) * p).sum()
    }

    /// Half the L1 distance, padding the shorter PMF with zeros.
    pub fn total_variation(&self, other: &Pmf) -> f64 {
        let n = self.len().max(other.len());
        0.5 * (0..n).map(|k| (self.get(k) - other.get(k)).abs()).sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        let n = self.len().max(other.len());
        (0..n).map(|k| (self.get(k) - other.get(k)).abs()).fold(0.0, f64::max)
    }
}

/// `Binomial(n, p)` probabilities evaluated in log space.
pub(crate) fn binomial_probs(n: u64, p: f64) -> Vec<f64> {
    (0..=n).map(|k| (ln_choose(n, k) + ln_pow(p, k) + ln_pow(1.0 - p, n - k)).exp()).collect()
}
