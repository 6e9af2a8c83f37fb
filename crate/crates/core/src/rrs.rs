//! Random resource scheduling: success probabilities and the distribution of
//! the number of successfully decoded devices.
//!
//! With `K` requesting devices and `N` channels, `K <= N` devices transmit
//! alone, `N < K < 2N` leaves `2N - K` alone and `K - N` pairs, and `K >= 2N`
//! fills every channel with a pair. Within a pair the stronger device is
//! decoded first.

use crate::config::SystemConfig;
use crate::error::{domain, Error, Result};
use crate::numerics::{ln_factorial, ln_p, ln_pow, ln_q};
use crate::pmf::Pmf;

const MIXTURE_TAIL: f64 = 1e-12;
const CONSISTENCY_TOL: f64 = 1e-8;

/// Success probabilities of a solo device, the first-decoded device of a
/// pair and the second-decoded device of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessProbs {
    pub p11: f64,
    pub p12: f64,
    pub p22: f64,
}

pub fn p11(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(cfg.field1()?.laplace_unchecked(cfg.theta))
}

/// Success probability of the first-decoded (stronger) device of a pair.
pub fn p12(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let field = cfg.field1()?;
    let split = cfg.split.clamped();
    let (a1, a2, theta) = (split.a1, split.a2, cfg.theta);
    if a1 <= 0.0 {
        return Err(domain("p12 requires a1 > 0"));
    }
    let lead = 2.0 * a1 / (a1 + theta * a2) * field.laplace_unchecked(theta / a1);
    if theta * a2 < a1 {
        let gap = a1 - theta * a2;
        let tail = gap / (a1 + theta * a2) * field.laplace_unchecked(2.0 * theta / gap);
        Ok((lead - tail).clamp(0.0, 1.0))
    } else {
        Ok(lead.clamp(0.0, 1.0))
    }
}

/// Success probability of the second-decoded (weaker) device of a pair.
/// Exactly zero once the residual of the first signal alone blocks it.
pub fn p22(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let field = cfg.field1()?;
    let split = cfg.split.clamped();
    let (a1, a2, theta, mu) = (split.a1, split.a2, cfg.theta, cfg.mu);
    let residual = theta * mu * a1;
    if a2 <= 0.0 || residual >= a2 {
        return Ok(0.0);
    }
    let gap = a2 - residual;
    Ok((gap / (a2 + residual) * field.laplace_unchecked(2.0 * theta / gap)).clamp(0.0, 1.0))
}

pub fn success_probs(cfg: &SystemConfig) -> Result<SuccessProbs> {
    let p11 = p11(cfg)?;
    if cfg.is_oma() {
        return Ok(SuccessProbs { p11, p12: 0.0, p22: 0.0 });
    }
    Ok(SuccessProbs { p11, p12: p12(cfg)?, p22: p22(cfg)? })
}

/// CDF of `V1 = max(h1, h2) - (θ a2 / a1) min(h1, h2)` for iid unit
/// exponentials.
pub fn cdf_v1(v: f64, a1: f64, a2: f64, theta: f64) -> Result<f64> {
    if !(a1 > 0.0) {
        return Err(domain(format!("cdf_v1 requires a1 > 0, got {a1}")));
    }
    if !(a2 >= 0.0) || !(theta > 0.0) || v.is_nan() {
        return Err(domain("cdf_v1 requires a2 >= 0, theta > 0 and a numeric v"));
    }
    let c = theta * a2 / a1;
    if v < 0.0 {
        return Ok(if c > 1.0 { (c - 1.0) / (c + 1.0) * (2.0 * v / (c - 1.0)).exp() } else { 0.0 });
    }
    let mut survival = 2.0 / (1.0 + c) * (-v).exp();
    if c < 1.0 {
        survival -= (1.0 - c) / (1.0 + c) * (-2.0 * v / (1.0 - c)).exp();
    }
    Ok((1.0 - survival).clamp(0.0, 1.0))
}

/// CDF of `V2 = min(h1, h2) - (θ μ a1 / a2) max(h1, h2)` for iid unit
/// exponentials.
pub fn cdf_v2(v: f64, a1: f64, a2: f64, theta: f64, mu: f64) -> Result<f64> {
    if !(a2 > 0.0) {
        return Err(domain(format!("cdf_v2 requires a2 > 0, got {a2}")));
    }
    if !(a1 >= 0.0) || !(theta > 0.0) || !(0.0..=1.0).contains(&mu) || v.is_nan() {
        return Err(domain("cdf_v2 requires a1 >= 0, theta > 0, mu in [0, 1]"));
    }
    let c = theta * mu * a1 / a2;
    if v < 0.0 {
        if c == 0.0 {
            return Ok(0.0);
        }
        let mut f = 2.0 * c / (1.0 + c) * (v / c).exp();
        if c > 1.0 {
            f -= (c - 1.0) / (c + 1.0) * (2.0 * v / (c - 1.0)).exp();
        }
        return Ok(f.clamp(0.0, 1.0));
    }
    if c >= 1.0 {
        return Ok(1.0);
    }
    Ok((1.0 - (1.0 - c) / (1.0 + c) * (-2.0 * v / (1.0 - c)).exp()).clamp(0.0, 1.0))
}

/// Open interval of `a1` values for which both devices of a pair avoid the
/// degenerate branches: `θ < a1/a2 < 1/(θμ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

pub fn feasible_region(theta: f64, mu: f64, delta: f64) -> Interval {
    let lo = theta * delta / (1.0 + theta);
    let hi = delta / (1.0 + theta * mu);
    if theta * theta * mu >= 1.0 {
        return Interval { lo, hi: lo };
    }
    Interval { lo, hi }
}

/// Number of possible values of `K1`: `0..=L*N`.
pub(crate) fn support_len(cfg: &SystemConfig) -> usize {
    cfg.max_per_channel as usize * cfg.channels + 1
}

pub(crate) fn ln_poisson(k: usize, mean: f64) -> f64 {
    -mean + ln_pow(mean, k as u64) - ln_factorial(k as u64)
}

/// `ln` of the `Binomial(n, p)` probabilities.
fn ln_binomial_probs(n: usize, p: f64) -> Vec<f64> {
    let n64 = n as u64;
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let ln_fact_n = ln_factorial(n64);
    (0..=n64)
        .map(|r| {
            let lp_term = if r == 0 { 0.0 } else { r as f64 * lp };
            let lq_term = if r == n64 { 0.0 } else { (n64 - r) as f64 * lq };
            ln_fact_n - ln_factorial(r) - ln_factorial(n64 - r) + lp_term + lq_term
        })
        .collect()
}

/// `Pr(K1 = k1 | K = k)` for `k1 = 0..len`, with per-regime success
/// probabilities supplied by the caller.
pub(crate) fn conditional_probs(n: usize, oma: bool, k: usize, p: &SuccessProbs, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    if k == 0 {
        out[0] = 1.0;
        return out;
    }
    if k <= n || oma {
        for (k1, lp) in ln_binomial_probs(k.min(n), p.p11).into_iter().enumerate() {
            out[k1] = lp.exp();
        }
        return out;
    }
    let (solo, pairs) = if k < 2 * n { (2 * n - k, k - n) } else { (0, n) };
    let ls = ln_binomial_probs(solo, p.p11);
    let l1 = ln_binomial_probs(pairs, p.p12);
    let l2 = ln_binomial_probs(pairs, p.p22);
    for (k1, slot) in out.iter_mut().enumerate().take(solo + 2 * pairs + 1) {
        let mut acc = 0.0;
        for (r1, lsr) in ls.iter().enumerate().take(k1.min(solo) + 1) {
            for (r2, l1r) in l1.iter().enumerate().take((k1 - r1).min(pairs) + 1) {
                let r3 = k1 - r1 - r2;
                if r3 <= pairs {
                    acc += (lsr + l1r + l2[r3]).exp();
                }
            }
        }
        *slot = acc;
    }
    out
}

/// Conditional PMF of the number of successful devices given `k` requests.
pub fn pmf_given_k(cfg: &SystemConfig, k: usize) -> Result<Pmf> {
    let p = success_probs(cfg)?;
    let probs = conditional_probs(cfg.channels, cfg.is_oma(), k, &p, support_len(cfg));
    Ok(Pmf::from_raw(probs, 0.0))
}

/// `Σ_{k<=N} Pr(K1 = k1 | k) Pr(K = k)` for `k1 = 0..=N`, summed in closed
/// form through the regularized incomplete gamma function.
pub(crate) fn solo_block(n: usize, mean: f64, p11: f64) -> Vec<f64> {
    let rest = mean * (1.0 - p11);
    (0..=n)
        .map(|k1| {
            let ln =
                -mean * p11 + ln_pow(mean * p11, k1 as u64) - ln_factorial(k1 as u64) + ln_q((n - k1 + 1) as f64, rest);
            ln.exp()
        })
        .collect()
}

/// Unconditional PMF of the number of successful devices, in closed form.
pub fn pmf(cfg: &SystemConfig) -> Result<Pmf> {
    let p = success_probs(cfg)?;
    let n = cfg.channels;
    let len = support_len(cfg);
    let mut probs = vec![0.0; len];
    for (k1, v) in solo_block(n, cfg.mean_load, p.p11).into_iter().enumerate() {
        probs[k1] = v;
    }
    if cfg.is_oma() {
        // Every K > N serves exactly N devices.
        let overflow = ln_p((n + 1) as f64, cfg.mean_load).exp();
        for (k1, b) in conditional_probs(n, true, n, &p, len).into_iter().enumerate() {
            probs[k1] += overflow * b;
        }
    } else {
        for k in n + 1..2 * n {
            let w = ln_poisson(k, cfg.mean_load).exp();
            for (slot, c) in probs.iter_mut().zip(conditional_probs(n, false, k, &p, len)) {
                *slot += w * c;
            }
        }
        let full = ln_p((2 * n) as f64, cfg.mean_load).exp();
        for (slot, c) in probs.iter_mut().zip(conditional_probs(n, false, 2 * n, &p, len)) {
            *slot += full * c;
        }
    }
    for v in &mut probs {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(Pmf::from_raw(probs, 0.0))
}

/// Smallest `k_max` with `Pr(K > k_max) < 1e-12`, and that tail mass.
pub(crate) fn poisson_truncation(mean: f64) -> (usize, f64) {
    let mut k = mean.ceil() as usize;
    loop {
        let tail = ln_p((k + 1) as f64, mean).exp();
        if tail < MIXTURE_TAIL {
            // step back while the tail bound still holds
            while k > 0 {
                let t = ln_p(k as f64, mean).exp();
                if t >= MIXTURE_TAIL {
                    break;
                }
                k -= 1;
            }
            return (k, ln_p((k + 1) as f64, mean).exp());
        }
        k += 1 + k / 16;
    }
}

/// The same PMF by summing `Pr(K1 = k1 | k) Pr(K = k)` term by term.
pub fn pmf_direct(cfg: &SystemConfig) -> Result<Pmf> {
    let p = success_probs(cfg)?;
    let len = support_len(cfg);
    let (k_max, tail) = poisson_truncation(cfg.mean_load);
    let mut probs = vec![0.0; len];
    for k in 0..=k_max {
        let w = ln_poisson(k, cfg.mean_load).exp();
        if w == 0.0 {
            continue;
        }
        let cond = conditional_probs(cfg.channels, cfg.is_oma(), k, &p, len);
        for (slot, c) in probs.iter_mut().zip(cond) {
            *slot += w * c;
        }
    }
    Ok(Pmf::from_raw(probs, tail))
}

/// Closed-form PMF, cross-checked against the direct mixture.
pub fn pmf_checked(cfg: &SystemConfig) -> Result<Pmf> {
    let closed = pmf(cfg)?;
    let direct = pmf_direct(cfg)?;
    let diff = closed.max_abs_diff(&direct);
    if diff > CONSISTENCY_TOL + direct.truncation_mass() {
        return Err(Error::Consistency(format!("closed-form and direct-mixture PMFs differ by {diff:e}")));
    }
    Ok(closed)
}
