//! Outside interference: a one-sided stable law with Laplace transform
//! `exp(-χ s^{2/α})`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{domain, Error, Result};
use crate::numerics::{integrate_oscillatory_phased, ln_gamma, QuadratureSpec};

/// The interference law for one interference factor `phi` and path-loss
/// exponent `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceField {
    phi: f64,
    alpha: f64,
    chi: f64,
}

/// `Γ(1 + 2/α) Γ(1 - 2/α)`.
pub fn stable_gamma_factor(alpha: f64) -> f64 {
    let beta = 2.0 / alpha;
    (ln_gamma(1.0 + beta) + ln_gamma(1.0 - beta)).exp()
}

impl InterferenceField {
    pub fn new(phi: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(Error::InvalidConfig(format!("alpha must exceed 2, got {alpha}")));
        }
        if !(phi >= 0.0) || !phi.is_finite() {
            return Err(Error::InvalidConfig(format!("interference factor must be nonnegative, got {phi}")));
        }
        Ok(Self { phi, alpha, chi: phi * stable_gamma_factor(alpha) })
    }

    /// Builds the law directly from its scale constant `χ`.
    pub fn from_chi(chi: f64, alpha: f64) -> Result<Self> {
        let unit = Self::new(1.0, alpha)?;
        Self::new(chi / unit.chi, alpha)
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// Stable index `2/α`.
    pub fn beta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// `E[exp(-s I)]`.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(domain(format!("Laplace argument must be nonnegative, got {s}")));
        }
        Ok(self.laplace_unchecked(s))
    }

    pub(crate) fn laplace_unchecked(&self, s: f64) -> f64 {
        if s == 0.0 {
            1.0
        } else {
            (-self.chi * s.powf(self.beta())).exp()
        }
    }

    /// `Pr(I <= b)` by Gil–Pelaez inversion of the characteristic function.
    pub fn cdf(&self, b: f64, spec: &QuadratureSpec) -> Result<f64> {
        if b.is_nan() {
            return Err(domain("cdf argument is NaN"));
        }
        if b <= 0.0 {
            return Ok(0.0);
        }
        if b.is_infinite() || self.chi == 0.0 {
            return Ok(1.0);
        }
        // Gil–Pelaez with t = u^{α/2}: the t^{2/α - 1} singularity at the
        // origin becomes the finite limit (α/2) ω.
        let half_alpha = 0.5 * self.alpha;
        let c = self.chi * (PI / self.alpha).cos();
        let omega = self.chi * (PI / self.alpha).sin();
        let phase = move |u: f64| omega * u - b * u.powf(half_alpha);
        let integrand = move |u: f64| half_alpha * (-c * u).exp() * phase(u).sin() / u;
        let integral = integrate_oscillatory_phased(integrand, phase, half_alpha * omega, spec)?;
        Ok((0.5 - integral / PI).clamp(0.0, 1.0))
    }

    /// Draws one interference realization with the Kanter construction.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.chi == 0.0 {
            return 0.0;
        }
        self.chi.powf(0.5 * self.alpha) * standard_stable(self.beta(), rng)
    }
}

/// A one-sided stable variate with `E[exp(-s X)] = exp(-s^β)`, `0 < β < 1`.
pub(crate) fn standard_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    loop {
        let u = PI * rng.random::<f64>();
        let e: f64 = Exp1.sample(rng);
        if u <= 0.0 || e <= 0.0 {
            continue;
        }
        let x = (beta * u).sin() / u.sin().powf(1.0 / beta) * (((1.0 - beta) * u).sin() / e).powf((1.0 - beta) / beta);
        if x > 0.0 && x.is_finite() {
            return x;
        }
    }
}
