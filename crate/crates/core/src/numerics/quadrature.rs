//! Panel quadrature for slowly decaying oscillatory integrals on `[0, ∞)`.
//!
//! The half-line is cut into panels, either at the zero crossings of
//! `sin(phase(x))` or geometrically when no phase is known. Each panel is
//! integrated with an adaptive 10-point Gauss / 21-point Kronrod rule and the
//! partial sums are accelerated with Wynn's epsilon algorithm.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tolerances and budgets for [`integrate_oscillatory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Total number of panels plus in-panel bisections allowed.
    pub max_subdivisions: usize,
    /// Stop once `max|f| * width` over a panel falls below this.
    pub tail_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-10, max_subdivisions: 1_000_000, tail_cutoff: 1e-14 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.rel_tol) || !positive(self.abs_tol) || !positive(self.tail_cutoff) {
            return Err(Error::InvalidConfig(format!("quadrature tolerances must be positive and finite: {self:?}")));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidConfig("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_151_171_035,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    max_abs: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut max_abs = fc.abs();
    for i in 0..10 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
        max_abs = max_abs.max(f1.abs()).max(f2.abs());
    }
    Segment { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs(), max_abs }
}

/// Adaptive GK21 on `[a, b]`, drawing bisections from the shared `budget`.
fn integrate_panel<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    budget: &mut usize,
    running: f64,
) -> Result<Segment> {
    let mut segments = vec![gk21(f, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        // Panels are summed in long alternating chains, so each gets a share
        // of the tolerance scaled to the larger of the panel and the total.
        let target = 0.01 * spec.target(value.abs().max(running.abs()));
        let max_abs = segments.iter().map(|s| s.max_abs).fold(0.0, f64::max);
        if !value.is_finite() {
            return Err(Error::Domain(format!("integrand not finite on [{a}, {b}]")));
        }
        if error <= target {
            return Ok(Segment { a, b, value, error, max_abs });
        }
        let (worst, _) =
            segments.iter().enumerate().max_by(|x, y| x.1.error.total_cmp(&y.1.error)).expect("at least one segment");
        let s = segments[worst];
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // Rounding floor reached; nothing finer is representable.
            return Ok(Segment { a, b, value, error, max_abs });
        }
        if *budget == 0 {
            return Err(Error::NonConvergence {
                subdivisions: spec.max_subdivisions,
                estimate: running + value,
                error,
            });
        }
        *budget -= 1;
        segments[worst] = gk21(f, s.a, mid);
        segments.push(gk21(f, mid, s.b));
    }
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    let mut best = sums[n - 1];
    if n < 3 {
        return best;
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur = sums.to_vec();
    let mut column = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 || !d.is_finite() {
                return best;
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        column += 1;
        prev = cur;
        cur = next;
        if column % 2 == 0 {
            let candidate = *cur.last().expect("nonempty column");
            if !candidate.is_finite() {
                return best;
            }
            best = candidate;
        }
    }
    best
}

const WYNN_WINDOW: usize = 40;
const MIN_PANELS: usize = 6;

/// Locates successive zero crossings of `sin(phase(x))`.
struct CrossingFinder<P> {
    phase: P,
    step: f64,
}

impl<P: Fn(f64) -> f64> CrossingFinder<P> {
    fn next(&mut self, x0: f64) -> f64 {
        let p0 = (self.phase)(x0);
        let mut k = (p0 / PI).floor();
        // p0 / π may round across an integer; keep k π <= p0 < (k + 1) π
        if p0 >= (k + 1.0) * PI {
            k += 1.0;
        } else if p0 < k * PI {
            k -= 1.0;
        }
        let mut lower = k * PI;
        if lower == p0 {
            lower -= PI;
        }
        let upper = (k + 1.0) * PI;
        // With no crossing in sight, cut a boundary anyway so that flat or
        // stationary stretches still advance geometrically.
        let horizon = x0 + x0.max(1.0);
        let mut x = x0;
        let mut px = p0;
        loop {
            let h = self.step.min(horizon - x);
            if h <= 0.0 {
                return horizon;
            }
            let xn = x + h;
            let pn = (self.phase)(xn);
            if (pn - px).abs() > 0.9 * PI && h > f64::EPSILON * x.max(1.0) {
                self.step = 0.5 * h;
                continue;
            }
            if pn <= lower || pn >= upper {
                let level = if pn <= lower { lower } else { upper };
                return self.bisect(x, xn, level);
            }
            if (pn - px).abs() < 0.1 * PI {
                self.step = 2.0 * h;
            }
            x = xn;
            px = pn;
            if x >= horizon {
                return horizon;
            }
        }
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, level: f64) -> f64 {
        let below = (self.phase)(lo) < level;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if ((self.phase)(mid) < level) == below {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Integrates `f` over `[0, ∞)` using geometric panels `[0,1], [1,2], [2,4], …`.
///
/// `limit_at_zero` is the value of `f` as `x → 0⁺`; `f` itself is never
/// evaluated at the origin.
pub fn integrate_oscillatory<F>(f: F, limit_at_zero: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_panels(&f, limit_at_zero, spec, |x| if x == 0.0 { 1.0 } else { 2.0 * x })
}

/// Integrates `f` over `[0, ∞)` with panel boundaries at the zero crossings of
/// `sin(phase(x))`, which should carry the oscillation of `f`.
pub fn integrate_oscillatory_phased<F, P>(f: F, phase: P, limit_at_zero: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let mut finder = CrossingFinder { phase, step: 1e-3 };
    integrate_panels(&f, limit_at_zero, spec, |x| finder.next(x))
}

fn integrate_panels<F, B>(f: &F, limit_at_zero: f64, spec: &QuadratureSpec, mut boundary: B) -> Result<f64>
where
    F: Fn(f64) -> f64,
    B: FnMut(f64) -> f64,
{
    spec.validate()?;
    let mut budget = spec.max_subdivisions;
    let mut sums: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut total_error = 0.0;
    let mut extrapolated: Vec<f64> = Vec::new();
    let mut magnitudes: Vec<f64> = Vec::new();
    let mut a = 0.0;
    let mut first = true;
    loop {
        let b = boundary(a);
        if !(b > a) || !b.is_finite() {
            return Err(Error::NonConvergence {
                subdivisions: spec.max_subdivisions - budget,
                estimate: total,
                error: f64::INFINITY,
            });
        }
        if budget == 0 {
            return Err(Error::NonConvergence {
                subdivisions: spec.max_subdivisions,
                estimate: total,
                error: total_error,
            });
        }
        budget -= 1;
        let panel = integrate_panel(f, a, b, spec, &mut budget, total)?;
        total += panel.value;
        total_error += panel.error;
        sums.push(total);
        magnitudes.push(panel.value.abs());

        let mut envelope = panel.max_abs;
        if first {
            envelope = envelope.max(limit_at_zero.abs());
            first = false;
        }
        if sums.len() >= MIN_PANELS && envelope * (b - a) < spec.tail_cutoff {
            return Ok(total);
        }

        let window = &sums[sums.len().saturating_sub(WYNN_WINDOW)..];
        extrapolated.push(wynn_epsilon(window));
        let m = extrapolated.len();
        if m >= MIN_PANELS {
            let e0 = extrapolated[m - 1];
            let tol = spec.target(e0).max(4.0 * total_error);
            let d1 = (e0 - extrapolated[m - 2]).abs();
            let d2 = (extrapolated[m - 2] - extrapolated[m - 3]).abs();
            // Extrapolation also "sums" divergent sequences, so only trust it
            // once the panel contributions are shrinking.
            let shrinking = magnitudes[m - 3..].windows(2).all(|w| w[1] <= w[0]);
            if d1 <= tol && d2 <= tol && shrinking {
                return Ok(e0);
            }
        }
        a = b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid() {
        let spec = QuadratureSpec::default();
        spec.validate().unwrap();
        assert_eq!(spec.max_subdivisions, 1_000_000);
    }

    #[test]
    fn invalid_specs_rejected() {
        let spec = QuadratureSpec { rel_tol: 0.0, ..QuadratureSpec::default() };
        assert!(spec.validate().is_err());
        let spec = QuadratureSpec { max_subdivisions: 0, ..QuadratureSpec::default() };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn exponential() {
        let v = integrate_oscillatory(|x| (-x).exp(), 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn damped_sinc_geometric_and_phased() {
        let f = |x: f64| (-x).exp() * x.sin() / x;
        let spec = QuadratureSpec::default();
        let g = integrate_oscillatory(f, 1.0, &spec).unwrap();
        let p = integrate_oscillatory_phased(f, |x| x, 1.0, &spec).unwrap();
        assert!((g - PI / 4.0).abs() < 1e-9, "{g}");
        assert!((p - PI / 4.0).abs() < 1e-9, "{p}");
    }

    #[test]
    fn slowly_damped_oscillation_matches_riemann_oracle() {
        let f = |x: f64| (-0.3 * x.sqrt()).exp() * (2.0 * x).sin() / x;
        let v = integrate_oscillatory_phased(f, |x| 2.0 * x, 2.0, &QuadratureSpec::default()).unwrap();
        // x = t² removes the √x kink at the origin; midpoint rule with 10^7
        // cells on t in [0, 50], the tail beyond is below 1e-9
        let g = |t: f64| 2.0 * (-0.3 * t).exp() * (2.0 * t * t).sin() / t;
        let n = 10_000_000usize;
        let h = 50.0 / n as f64;
        let oracle: f64 = (0..n).map(|i| g((i as f64 + 0.5) * h)).sum::<f64>() * h;
        assert!((v - oracle).abs() < 1e-7, "{v} vs {oracle}");
    }

    #[test]
    fn unbounded_oscillation_reports_non_convergence() {
        let spec = QuadratureSpec { max_subdivisions: 200, ..QuadratureSpec::default() };
        let r = integrate_oscillatory_phased(|x| x.sin() * x, |x| x, 0.0, &spec);
        assert!(matches!(r, Err(Error::NonConvergence { .. })), "{r:?}");
    }

    #[test]
    fn crossing_finder_hits_multiples_of_pi() {
        let mut finder = CrossingFinder { phase: |x: f64| x * x, step: 1e-3 };
        let mut x = 1.0;
        for k in 1..=20 {
            x = finder.next(x);
            assert!((x * x - k as f64 * PI).abs() < 1e-9, "k={k} x={x}");
        }
    }

    #[test]
    fn wynn_accelerates_alternating_harmonic() {
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        assert!((wynn_epsilon(&sums) - 2f64.ln()).abs() < 1e-10);
    }
}
