//! Special functions and quadrature shared by the analytical models.

mod quadrature;
mod special;

pub use quadrature::{integrate_oscillatory, integrate_oscillatory_phased, QuadratureSpec};
pub use special::{
    digamma, kummer_1f1_neg_int, ln_factorial, ln_upper_incomplete_gamma, log_binomial, log_gamma, regularized_gamma_p,
    regularized_gamma_q, upper_incomplete_gamma,
};
pub(crate) use special::{ln_choose, ln_gamma, ln_kummer_1f1_nonneg_terms, ln_p, ln_pow, ln_q, log_sum_exp, psi};
