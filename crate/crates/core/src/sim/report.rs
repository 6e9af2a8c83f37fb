use crate::pmf::Pmf;

/// Bernoulli trial counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub successes: u64,
}

impl Tally {
    pub fn record(&mut self, success: bool) {
        self.trials += 1;
        self.successes += u64::from(success);
    }

    pub fn merge(&mut self, other: &Tally) {
        self.trials += other.trials;
        self.successes += other.successes;
    }

    /// Empirical success rate, `NaN` without trials.
    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            f64::NAN
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// `sqrt(p (1 - p) / n)`.
    pub fn stderr(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Running sums of an integer-valued per-epoch quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Moments {
    pub count: u64,
    pub sum: u64,
    pub sum_sq: u64,
}

impl Moments {
    pub fn record(&mut self, x: u64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        let n = self.count as f64;
        let mean = self.mean();
        let var = (self.sum_sq as f64 - n * mean * mean) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    }
}

/// Per-rank tallies under channel-dependent scheduling, indexed by `rank - 1`
/// of the first-allocated device on the channel.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankTallies {
    pub solo: Vec<Tally>,
    pub first: Vec<Tally>,
    pub second: Vec<Tally>,
}

impl RankTallies {
    pub(crate) fn new(channels: usize) -> Self {
        Self {
            solo: vec![Tally::default(); channels],
            first: vec![Tally::default(); channels],
            second: vec![Tally::default(); channels],
        }
    }

    fn merge(&mut self, other: &RankTallies) {
        for (a, b) in
            [(&mut self.solo, &other.solo), (&mut self.first, &other.first), (&mut self.second, &other.second)]
        {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
    }
}

/// Statistics of the exhaustive scheduler, comparing the expected number of
/// successes (given the drawn gains) of the optimum with the allocations the
/// two heuristic schemes would have chosen.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptStats {
    pub epochs: u64,
    pub expected_opt: f64,
    pub expected_crs: f64,
    pub expected_rrs: f64,
    /// Epochs in which the optimum fell short of the channel-dependent
    /// allocation by more than rounding; zero by construction.
    pub opt_below_crs: u64,
    /// Epochs with at least one pair in the optimum allocation.
    pub paired_epochs: u64,
    /// Of those, epochs where every pair joins one of the `N` strongest
    /// devices with one of the remaining devices.
    pub strong_weak_epochs: u64,
    /// Epochs where the optimum coincides with the channel-dependent allocation.
    pub crs_optimal_epochs: u64,
}

impl OptStats {
    fn merge(&mut self, other: &OptStats) {
        self.epochs += other.epochs;
        self.expected_opt += other.expected_opt;
        self.expected_crs += other.expected_crs;
        self.expected_rrs += other.expected_rrs;
        self.opt_below_crs += other.opt_below_crs;
        self.paired_epochs += other.paired_epochs;
        self.strong_weak_epochs += other.strong_weak_epochs;
        self.crs_optimal_epochs += other.crs_optimal_epochs;
    }

    pub fn mean_opt(&self) -> f64 {
        self.expected_opt / self.epochs as f64
    }

    pub fn mean_crs(&self) -> f64 {
        self.expected_crs / self.epochs as f64
    }

    pub fn mean_rrs(&self) -> f64 {
        self.expected_rrs / self.epochs as f64
    }

    /// Fraction of paired epochs whose optimum pairs strong with weak devices.
    pub fn strong_weak_frequency(&self) -> f64 {
        self.strong_weak_epochs as f64 / self.paired_epochs as f64
    }
}

/// Aggregated Monte Carlo estimates.
///
/// All tallies are integers, so merging partial reports is exact and the
/// result does not depend on how replications were split across workers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimReport {
    pub replications: u64,
    /// Devices alone on their channel.
    pub solo: Tally,
    /// First-decoded devices of a pair.
    pub first: Tally,
    /// Second-decoded devices of a pair.
    pub second: Tally,
    pub ranks: Option<RankTallies>,
    /// Histogram of the number of devices decoded per epoch.
    pub k1_counts: Vec<u64>,
    /// Relay outcomes by the number of devices carried.
    pub relay: Vec<Tally>,
    /// Devices decoded by the aggregator per epoch.
    pub active: Moments,
    /// Devices delivered end to end per epoch.
    pub served: Moments,
    pub opt: Option<OptStats>,
}

impl SimReport {
    pub(crate) fn empty(support: usize, ranks: Option<usize>, opt: bool) -> Self {
        Self {
            k1_counts: vec![0; support],
            relay: vec![Tally::default(); support],
            ranks: ranks.map(RankTallies::new),
            opt: opt.then(OptStats::default),
            ..Self::default()
        }
    }

    pub fn merge(&mut self, other: &SimReport) {
        self.replications += other.replications;
        self.solo.merge(&other.solo);
        self.first.merge(&other.first);
        self.second.merge(&other.second);
        if let (Some(a), Some(b)) = (&mut self.ranks, &other.ranks) {
            a.merge(b);
        }
        for (a, b) in self.k1_counts.iter_mut().zip(&other.k1_counts) {
            *a += b;
        }
        for (a, b) in self.relay.iter_mut().zip(&other.relay) {
            a.merge(b);
        }
        self.active.merge(&other.active);
        self.served.merge(&other.served);
        if let (Some(a), Some(b)) = (&mut self.opt, &other.opt) {
            a.merge(b);
        }
    }

    /// Empirical PMF of the number of decoded devices.
    pub fn pmf(&self) -> Pmf {
        Pmf::from_counts(&self.k1_counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_statistics() {
        let mut t = Tally::default();
        assert!(t.estimate().is_nan());
        for i in 0..100 {
            t.record(i % 4 == 0);
        }
        assert_eq!(t.estimate(), 0.25);
        assert!((t.stderr() - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn moments() {
        let mut m = Moments::default();
        for x in [1, 2, 3, 4] {
            m.record(x);
        }
        assert_eq!(m.mean(), 2.5);
        let var = 5.0 / 3.0;
        assert!((m.stderr() - (var / 4.0f64).sqrt()).abs() < 1e-15);
    }
}
