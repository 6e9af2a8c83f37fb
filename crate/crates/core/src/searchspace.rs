//! Size of the exhaustive scheduling search space.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{domain, Error, Result};
use crate::numerics::{ln_factorial, ln_kummer_1f1_nonneg_terms, ln_q, log_sum_exp};

/// Counted number of allocations of `k` devices onto `n` channels with at
/// most two per channel.
pub fn dim(k: usize, n: usize) -> BigUint {
    if k <= n {
        return BigUint::one();
    }
    if k <= 2 * n {
        let m = k - n;
        binomial(k, 2 * n - k) * BigUint::from(2 * m - 1) * BigUint::from(m)
    } else {
        binomial(k, 2 * n) * BigUint::from(n) * BigUint::from(2 * n - 1)
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= BigUint::from(n - j);
        acc /= BigUint::from(j + 1);
    }
    acc
}

/// `ln` of the Poisson average of [`dim`] over `K ~ Poisson(mean)`.
pub fn ln_avg_dim(mean: f64, n: usize) -> Result<f64> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(domain(format!("mean load must be positive, got {mean}")));
    }
    if n == 0 {
        return Err(domain("at least one channel is required"));
    }
    let nf = n as f64;
    let ln_m = mean.ln();
    let z = -mean / 4.0;

    // Pr(K <= N)
    let alone = ln_q(nf + 1.0, mean);

    // N < K <= 2N, summed through two terminating Kummer series
    let mut bracket = vec![3f64.ln() + ln_kummer_1f1_nonneg_terms(1 - n as i64, 1.5, z)];
    if n > 1 {
        bracket.push(ln_m + (nf - 1.0).ln() + ln_kummer_1f1_nonneg_terms(2 - n as i64, 2.5, z));
    }
    let shared = -mean + (1.0 + nf) * ln_m - 6f64.ln() - ln_factorial(n as u64 - 1) + log_sum_exp(&bracket);

    // K > 2N
    let full =
        (-(-mean).exp_m1()).ln() + 2.0 * nf * ln_m + nf.ln() + (2.0 * nf - 1.0).ln() - ln_factorial(2 * n as u64);

    Ok(log_sum_exp(&[alone, shared, full]))
}

/// Poisson average of [`dim`].
pub fn avg_dim(mean: f64, n: usize) -> Result<f64> {
    let ln = ln_avg_dim(mean, n)?;
    if ln >= f64::MAX.ln() {
        return Err(Error::Overflow(format!("average search-space size exp({ln:.2}) exceeds f64 range")));
    }
    Ok(ln.exp())
}

/// One way of placing devices `0..k` on channels: some alone, some in
/// unordered pairs (the receiver decodes the stronger one first), the rest
/// left out. Channels are interchangeable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    pub solo: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
    pub silent: Vec<usize>,
}

pub const MAX_ENUM_DEVICES: usize = 8;
pub const MAX_ENUM_CHANNELS: usize = 4;

/// Every distinct allocation of `k` devices onto `n` channels.
///
/// When `k > n` every channel is used, with `2n - k` solo devices and the
/// rest paired, or `n` pairs and `k - 2n` silent devices once `k > 2n`.
pub fn enumerate_allocations(k: usize, n: usize) -> Result<Vec<Allocation>> {
    if k > MAX_ENUM_DEVICES || n > MAX_ENUM_CHANNELS || n == 0 {
        return Err(Error::Scale(format!(
            "enumeration limited to k <= {MAX_ENUM_DEVICES} and 1 <= n <= {MAX_ENUM_CHANNELS}, got k={k}, n={n}"
        )));
    }
    let devices: Vec<usize> = (0..k).collect();
    if k <= n {
        return Ok(vec![Allocation { solo: devices, pairs: Vec::new(), silent: Vec::new() }]);
    }
    let mut out = Vec::new();
    if k <= 2 * n {
        for solo in subsets(&devices, 2 * n - k) {
            let rest: Vec<usize> = devices.iter().copied().filter(|d| !solo.contains(d)).collect();
            for pairs in matchings(&rest) {
                out.push(Allocation { solo: solo.clone(), pairs, silent: Vec::new() });
            }
        }
    } else {
        for served in subsets(&devices, 2 * n) {
            let silent: Vec<usize> = devices.iter().copied().filter(|d| !served.contains(d)).collect();
            for pairs in matchings(&served) {
                out.push(Allocation { solo: Vec::new(), pairs, silent: silent.clone() });
            }
        }
    }
    Ok(out)
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let (head, tail) = (items[0], &items[1..]);
    let mut out: Vec<Vec<usize>> = subsets(tail, size - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, head);
            s
        })
        .collect();
    out.extend(subsets(tail, size));
    out
}

/// All perfect matchings of an even-sized set.
fn matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let first = items[0];
    let mut out = Vec::new();
    for j in 1..items.len() {
        let rest: Vec<usize> = items[1..].iter().copied().filter(|&x| x != items[j]).collect();
        for mut m in matchings(&rest) {
            m.insert(0, (first, items[j]));
            out.push(m);
        }
    }
    out
}

/// Enumerated cardinality next to the counting formula of [`dim`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub k: usize,
    pub n: usize,
    pub enumerated: usize,
    pub formula: BigUint,
}

impl CountReport {
    pub fn matches(&self) -> bool {
        BigUint::from(self.enumerated) == self.formula
    }

    /// Explanation of a mismatch, if any.
    pub fn note(&self) -> Option<String> {
        if self.matches() {
            return None;
        }
        Some(format!(
            "k={} n={}: {} distinct allocations but the formula counts {}; the pairing \
             factor (2m-1)m counts candidate pairs, while the number of ways to pair 2m \
             devices is (2m-1)!!",
            self.k, self.n, self.enumerated, self.formula
        ))
    }
}

pub fn count_report(k: usize, n: usize) -> Result<CountReport> {
    let enumerated = enumerate_allocations(k, n)?.len();
    Ok(CountReport { k, n, enumerated, formula: dim(k, n) })
}

/// Every report with `k <= 8` and `1 <= n <= 4`.
pub fn all_count_reports() -> Vec<CountReport> {
    let mut out = Vec::new();
    for n in 1..=MAX_ENUM_CHANNELS {
        for k in 0..=MAX_ENUM_DEVICES {
            out.push(count_report(k, n).expect("within enumeration bounds"));
        }
    }
    out
}

/// `dim(k, n)` as a float, for summation oracles and plotting.
pub fn dim_f64(k: usize, n: usize) -> f64 {
    dim(k, n).to_f64().unwrap_or(f64::INFINITY)
}

/// [`avg_dim`] by summing `dim(k, n) Pr(K = k)` term by term until the
/// terms past the mode stop contributing.
pub fn avg_dim_direct(mean: f64, n: usize) -> Result<f64> {
    if !(mean > 0.0) || !mean.is_finite() || n == 0 {
        return Err(domain(format!("need mean > 0 and n >= 1, got mean={mean}, n={n}")));
    }
    let mut sum = 0.0;
    let mut k = 0usize;
    loop {
        let ln_w = -mean + k as f64 * mean.ln() - ln_factorial(k as u64);
        let term = dim_f64(k, n) * ln_w.exp();
        sum += term;
        if k > 2 * n + mean as usize && term < 1e-17 * sum {
            return Ok(sum);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn dim_branches() {
        assert_eq!(dim(2, 2), BigUint::one());
        assert_eq!(dim(3, 2), BigUint::from(3u32));
        assert_eq!(dim(3, 1), BigUint::from(3u32));
        assert_eq!(dim(5, 2), BigUint::from(30u32));
        assert_eq!(dim(0, 3), BigUint::one());
    }

    #[test]
    fn dim_handles_big_counts() {
        let d = dim(200, 60);
        assert!(d.bits() > 100);
    }

    fn direct_avg(mean: f64, n: usize) -> f64 {
        avg_dim_direct(mean, n).unwrap()
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        for n in 2..=10 {
            for &m in &[1.0, 5.0, 10.0, 20.0] {
                let closed = avg_dim(m, n).unwrap();
                let direct = direct_avg(m, n);
                assert!(((closed - direct) / direct).abs() < 1e-9, "n={n} m={m}: {closed} vs {direct}");
            }
        }
    }

    #[test]
    fn single_channel_and_tiny_load() {
        let closed = avg_dim(3.0, 1).unwrap();
        assert!(((closed - direct_avg(3.0, 1)) / closed).abs() < 1e-9);
        assert!((avg_dim(1e-9, 5).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn explosion_at_section_v_scale() {
        assert!(avg_dim(60.0, 30).unwrap() > 1e15);
        assert!(ln_avg_dim(500.0, 200).unwrap().is_finite());
    }

    #[test]
    fn enumerations_are_distinct_and_cover_every_device() {
        for n in 1..=4 {
            for k in 0..=8 {
                let all = enumerate_allocations(k, n).unwrap();
                let set: HashSet<_> = all.iter().cloned().collect();
                assert_eq!(set.len(), all.len());
                for a in &all {
                    let used = a.solo.len() + 2 * a.pairs.len();
                    assert_eq!(used + a.silent.len(), k);
                    assert!(a.solo.len() + a.pairs.len() <= n);
                }
            }
        }
    }

    #[test]
    fn enumerated_counts_follow_double_factorial() {
        fn double_factorial(m: usize) -> usize {
            (1..=m).rev().step_by(2).product::<usize>().max(1)
        }
        fn choose(n: usize, k: usize) -> usize {
            (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
        }
        for n in 1..=4 {
            for k in 0..=8 {
                let count = enumerate_allocations(k, n).unwrap().len();
                let expected = if k <= n {
                    1
                } else if k <= 2 * n {
                    choose(k, 2 * n - k) * double_factorial(2 * (k - n) - 1)
                } else {
                    choose(k, 2 * n) * double_factorial(2 * n - 1)
                };
                assert_eq!(count, expected, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn reports_flag_mismatches() {
        let r = count_report(3, 2).unwrap();
        assert!(r.matches() && r.note().is_none());
        let r = count_report(5, 2).unwrap();
        assert_eq!(r.enumerated, 15);
        assert!(!r.matches());
        assert!(r.note().unwrap().contains("30"));
    }

    #[test]
    fn scale_limits() {
        assert!(matches!(enumerate_allocations(9, 2), Err(Error::Scale(_))));
        assert!(matches!(enumerate_allocations(3, 5), Err(Error::Scale(_))));
    }
}
