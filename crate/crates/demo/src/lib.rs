//! WebAssembly bindings behind `www/index.html`.

use mmtc_core::config::db_to_linear;
use mmtc_core::{relay, rrs, searchspace, InterferenceField, PowerSplit, QuadratureSpec, Scheme, SystemConfig};
use wasm_bindgen::prelude::*;

fn js(e: mmtc_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn scenario(mean_load: f64, channels: usize, mu: f64, phi1_db: f64, tau: f64) -> SystemConfig {
    SystemConfig { mean_load, channels, mu, phi1: db_to_linear(phi1_db), tau, ..SystemConfig::default() }
}

/// Expected served devices against `a1` (with `a1 + a2 = 1`) on `points`
/// evenly spaced splits, for random scheduling (hybrid) followed by the
/// one-device-per-channel baseline as the last entry.
#[wasm_bindgen]
pub fn served_vs_a1(
    mean_load: f64,
    channels: usize,
    mu: f64,
    phi1_db: f64,
    tau: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let base = scenario(mean_load, channels, mu, phi1_db, tau);
    let quad = QuadratureSpec::default();
    let points = points.clamp(2, 400);
    let mut out = Vec::with_capacity(points + 1);
    for j in 1..=points {
        let a1 = j as f64 / (points + 1) as f64;
        let cfg = SystemConfig { split: PowerSplit::new(a1, 1.0).map_err(js)?, ..base.clone() };
        out.push(relay::avg_successful(&cfg, Scheme::Rrs, &quad).map_err(js)?.overall);
    }
    let oma = SystemConfig { max_per_channel: 1, ..base };
    out.push(relay::avg_successful(&oma, Scheme::Rrs, &quad).map_err(js)?.overall);
    Ok(out)
}

/// `[p11, p12, p22]` at the given split.
#[wasm_bindgen]
pub fn success_probs(mu: f64, phi1_db: f64, a1: f64) -> Result<Vec<f64>, JsError> {
    let cfg = SystemConfig {
        mu,
        phi1: db_to_linear(phi1_db),
        split: PowerSplit::new(a1, 1.0).map_err(js)?,
        ..SystemConfig::default()
    };
    let p = rrs::success_probs(&cfg).map_err(js)?;
    Ok(vec![p.p11, p.p12, p.p22])
}

/// CDF of the outside interference at each of `xs`.
#[wasm_bindgen]
pub fn interference_cdf(phi_db: f64, alpha: f64, xs: Vec<f64>) -> Result<Vec<f64>, JsError> {
    let field = InterferenceField::new(db_to_linear(phi_db), alpha).map_err(js)?;
    let quad = QuadratureSpec::default();
    xs.iter().map(|&x| field.cdf(x, &quad).map_err(js)).collect()
}

/// `log10` of the average number of scheduling choices for `1..=max_channels` channels.
#[wasm_bindgen]
pub fn log10_search_space(mean_load: f64, max_channels: usize) -> Result<Vec<f64>, JsError> {
    (1..=max_channels.clamp(1, 200))
        .map(|n| searchspace::ln_avg_dim(mean_load, n).map(|l| l / std::f64::consts::LN_10).map_err(js))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bindings_agree_with_the_library() {
        let v = served_vs_a1(60.0, 30, 0.1, -10.0, 0.2, 3).unwrap();
        assert_eq!(v.len(), 4);
        let cfg = SystemConfig::default();
        let want = relay::avg_successful(&cfg, Scheme::Rrs, &QuadratureSpec::default()).unwrap().overall;
        assert!((v[1] - want).abs() < 1e-12);
        let p = success_probs(0.1, -10.0, 0.5).unwrap();
        assert!((p[0] - rrs::p11(&cfg).unwrap()).abs() < 1e-15);
        let c = interference_cdf(-10.0, 3.6, vec![0.01, 1.0, 100.0]).unwrap();
        assert!(c.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(log10_search_space(60.0, 30).unwrap().len(), 30);
    }
}
