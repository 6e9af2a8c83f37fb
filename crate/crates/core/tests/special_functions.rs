use mmtc_core::numerics::{
    digamma, kummer_1f1_neg_int, ln_factorial, log_binomial, log_gamma, regularized_gamma_p, regularized_gamma_q,
    upper_incomplete_gamma,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Terminating Kummer series in exact rational arithmetic.
fn kummer_exact(n: u32, b: &BigRational, z: &BigRational) -> f64 {
    let a = BigRational::from_integer(BigInt::from(-(n as i64)));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for j in 0..n {
        let jr = BigRational::from_integer(BigInt::from(j));
        term = term * (&a + &jr) * z / ((b + &jr) * (&jr + BigRational::one()));
        sum += &term;
    }
    sum.to_f64().unwrap()
}

#[test]
fn kummer_matches_exact_rationals() {
    for n in [0u32, 1, 2, 5, 12, 29] {
        for (bn, bd) in [(3, 2), (5, 2), (7, 3)] {
            for (zn, zd) in [(-1, 4), (-15, 1), (-60, 4), (3, 7)] {
                let exact = kummer_exact(n, &ratio(bn, bd), &ratio(zn, zd));
                let got = kummer_1f1_neg_int(-(n as i64), bn as f64 / bd as f64, zn as f64 / zd as f64).unwrap();
                let scale = exact.abs().max(1e-300);
                assert!(((got - exact) / scale).abs() < 1e-11, "n={n} b={bn}/{bd} z={zn}/{zd}: {got} vs {exact}");
            }
        }
    }
    assert!(BigRational::zero() < ratio(1, 2));
}

#[test]
fn kummer_rejects_bad_parameters() {
    assert!(kummer_1f1_neg_int(2, 1.5, -1.0).is_err());
    assert!(kummer_1f1_neg_int(-2, 0.0, -1.0).is_err());
}

#[test]
fn factorials_against_products() {
    let mut ln = 0.0f64;
    for n in 1..=200u64 {
        ln += (n as f64).ln();
        assert!((ln_factorial(n) - ln).abs() < 1e-12 * ln.max(1.0), "n={n}");
    }
    assert!((log_binomial(10, 3).unwrap() - 120f64.ln()).abs() < 1e-13);
    assert!(log_binomial(3, 10).is_err());
}

#[test]
fn incomplete_gamma_integer_closed_form() {
    // Q(n, x) = e^{-x} sum_{j<n} x^j / j!
    for n in 1..=40u32 {
        for &x in &[0.1f64, 1.0, 7.5, 30.0, 80.0] {
            let mut term = (-x).exp();
            let mut sum = term;
            for j in 1..n {
                term *= x / j as f64;
                sum += term;
            }
            let q = regularized_gamma_q(n as f64, x).unwrap();
            assert!((q - sum).abs() < 1e-13 + 1e-11 * sum, "n={n} x={x}: {q} vs {sum}");
        }
    }
}

#[test]
fn upper_gamma_half_integer() {
    // Γ(1/2, x) = sqrt(pi) erfc(sqrt(x)); erfc(1) = 0.157299207050285
    let got = upper_incomplete_gamma(0.5, 1.0).unwrap();
    assert!((got - std::f64::consts::PI.sqrt() * 0.157_299_207_050_285_13).abs() < 1e-13);
}

proptest! {
    #[test]
    fn p_plus_q_is_one(a in 0.05f64..200.0, x in 0.0f64..400.0) {
        let p = regularized_gamma_p(a, x).unwrap();
        let q = regularized_gamma_q(a, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
        prop_assert!((p + q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_recurrence(a in 0.5f64..60.0, x in 0.01f64..100.0) {
        // Q(a+1, x) = Q(a, x) + x^a e^{-x} / Γ(a+1)
        let lhs = regularized_gamma_q(a + 1.0, x).unwrap();
        let rhs = regularized_gamma_q(a, x).unwrap()
            + (a * x.ln() - x - log_gamma(a + 1.0).unwrap()).exp();
        prop_assert!((lhs - rhs).abs() < 1e-11);
    }

    #[test]
    fn gamma_and_digamma_recurrences(x in 0.01f64..150.0) {
        let lg = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
        prop_assert!((lg - x.ln()).abs() < 1e-11 * x.ln().abs().max(1.0));
        let dg = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
        prop_assert!((dg - 1.0 / x).abs() < 1e-10 * (1.0 / x).max(1.0));
    }
}
