//! Figure sweeps. Each recipe is a grid of independent points evaluated in
//! parallel and written in grid order.

use anyhow::{bail, Context, Result};
use mmtc_core::config::db_to_linear;
use mmtc_core::optimizer::{self, Objective, SearchSettings};
use mmtc_core::sim::{self, SimReport, SimScheme, SimSpec};
use mmtc_core::validation::{self, ValidationSettings};
use mmtc_core::{relay, rrs, searchspace, PowerSplit, QuadratureSpec, Scheme, SystemConfig};
use rayon::prelude::*;

use crate::table::{f, i, Table};

/// Scheduling option of the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CliScheme {
    Rrs,
    Crs,
    /// One device per channel, random scheduling.
    Oma,
    /// Exhaustive search at desk scale; simulation only.
    OptTiny,
}

impl CliScheme {
    pub fn name(&self) -> &'static str {
        match self {
            CliScheme::Rrs => "rrs",
            CliScheme::Crs => "crs",
            CliScheme::Oma => "oma",
            CliScheme::OptTiny => "opt-tiny",
        }
    }

    /// Scenario and closed-form scheme this option stands for.
    pub fn analytic(&self, cfg: &SystemConfig) -> Result<(SystemConfig, Scheme)> {
        match self {
            CliScheme::Rrs => Ok((cfg.clone(), Scheme::Rrs)),
            CliScheme::Crs => Ok((cfg.clone(), Scheme::Crs)),
            CliScheme::Oma => Ok((SystemConfig { max_per_channel: 1, ..cfg.clone() }, Scheme::Rrs)),
            CliScheme::OptTiny => bail!("the exhaustive scheduler has no closed form; use simulate"),
        }
    }

    pub fn simulated(&self, cfg: &SystemConfig) -> (SystemConfig, SimScheme) {
        match self {
            CliScheme::Rrs => (cfg.clone(), SimScheme::Rrs),
            CliScheme::Crs => (cfg.clone(), SimScheme::Crs),
            CliScheme::Oma => (SystemConfig { max_per_channel: 1, ..cfg.clone() }, SimScheme::Rrs),
            CliScheme::OptTiny => (cfg.clone(), SimScheme::OptTiny),
        }
    }
}

pub const RECIPES: [&str; 7] = [
    "fig-searchspace",
    "fig-served-vs-N",
    "fig-served-vs-phi2",
    "fig-a1-vs-phi1",
    "fig-served-vs-delta",
    "fig-served-vs-mu",
    "validate-all",
];

/// Inputs shared by every recipe.
#[derive(Debug, Clone)]
pub struct RecipeContext {
    pub base: SystemConfig,
    pub seed: u64,
    /// Epochs per simulated point; `None` disables simulation.
    pub replications: Option<u64>,
    pub quad: QuadratureSpec,
}

pub const MIN_SIM_REPLICATIONS: u64 = 1_000;

/// Result of a recipe: its table and, for validation, whether every
/// criterion passed.
pub struct RecipeOutput {
    pub table: Table,
    pub all_passed: bool,
}

pub fn run_recipe(name: &str, ctx: &RecipeContext) -> Result<RecipeOutput> {
    if let Some(r) = ctx.replications {
        if r < MIN_SIM_REPLICATIONS {
            bail!(mmtc_core::Error::InvalidConfig(format!(
                "simulated sweeps need at least {MIN_SIM_REPLICATIONS} replications, got {r}"
            )));
        }
    }
    let table = match name {
        "fig-searchspace" => fig_searchspace()?,
        "fig-served-vs-N" => fig_served_vs_n(ctx)?,
        "fig-served-vs-phi2" => fig_served_vs_phi2(ctx)?,
        "fig-a1-vs-phi1" => fig_a1_vs_phi1(ctx)?,
        "fig-served-vs-delta" => fig_served_vs_delta(ctx)?,
        "fig-served-vs-mu" => fig_served_vs_mu(ctx)?,
        "validate-all" => return validate_all(ctx),
        other => bail!(mmtc_core::Error::InvalidConfig(format!(
            "unknown recipe {other}; expected one of {}",
            RECIPES.join(", ")
        ))),
    };
    Ok(RecipeOutput { table, all_passed: true })
}

/// Seed of sweep point `j`: a SplitMix64 step away from the base seed.
pub fn point_seed(base: u64, j: usize) -> u64 {
    let mut z = base.wrapping_add((j as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Evaluates `row` on every point in parallel, keeping grid order and
/// naming the failing point.
fn sweep<P, F>(points: &[P], label: impl Fn(&P) -> String + Sync, row: F) -> Result<Vec<Vec<String>>>
where
    P: Sync,
    F: Fn(usize, &P) -> Result<Vec<String>> + Sync,
{
    points.par_iter().enumerate().map(|(j, p)| row(j, p).with_context(|| format!("sweep point {}", label(p)))).collect()
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|j| start + step * j as f64).collect()
}

fn served_analytic(cfg: &SystemConfig, scheme: CliScheme, quad: &QuadratureSpec) -> Result<f64> {
    let (c, s) = scheme.analytic(cfg)?;
    Ok(relay::avg_successful(&c, s, quad)?.overall)
}

fn simulate(
    cfg: &SystemConfig,
    scheme: CliScheme,
    replications: u64,
    seed: u64,
    quad: &QuadratureSpec,
) -> Result<SimReport> {
    let (c, s) = scheme.simulated(cfg);
    Ok(sim::run(&SimSpec::new(c, s, replications, seed), quad)?)
}

const SERVED_SCHEMES: [CliScheme; 3] = [CliScheme::Rrs, CliScheme::Crs, CliScheme::Oma];

const SERVED_COLUMNS: [&str; 9] = [
    "kbar_rrs_analytic",
    "kbar_crs_analytic",
    "kbar_oma_analytic",
    "kbar_rrs_sim",
    "kbar_rrs_sim_stderr",
    "kbar_crs_sim",
    "kbar_crs_sim_stderr",
    "kbar_oma_sim",
    "kbar_oma_sim_stderr",
];

/// Expected end-to-end served count per scheme, analytic then simulated.
fn served_cells(cfg: &SystemConfig, ctx: &RecipeContext, seed: u64) -> Result<Vec<String>> {
    let mut cells = Vec::with_capacity(SERVED_COLUMNS.len());
    for s in SERVED_SCHEMES {
        cells.push(f(served_analytic(cfg, s, &ctx.quad)?));
    }
    for (k, s) in SERVED_SCHEMES.into_iter().enumerate() {
        match ctx.replications {
            Some(r) => {
                let rep = simulate(cfg, s, r, point_seed(seed, k), &ctx.quad)?;
                cells.push(f(rep.served.mean()));
                cells.push(f(rep.served.stderr()));
            }
            None => cells.extend([String::new(), String::new()]),
        }
    }
    Ok(cells)
}

fn header<'a>(lead: &[&'a str], rest: &[&'a str]) -> Vec<&'a str> {
    lead.iter().chain(rest).copied().collect()
}

pub fn fig_searchspace() -> Result<Table> {
    let loads = [10.0, 20.0, 60.0, 120.0];
    let mut t = Table::new(
        "fig-searchspace",
        &[
            "N",
            "avg_dim_m10",
            "avg_dim_m20",
            "avg_dim_m60",
            "avg_dim_m120",
            "log10_avg_dim_m10",
            "log10_avg_dim_m20",
            "log10_avg_dim_m60",
            "log10_avg_dim_m120",
        ],
    );
    for n in 5..=50usize {
        let ln: Vec<f64> = loads.iter().map(|&m| searchspace::ln_avg_dim(m, n)).collect::<mmtc_core::Result<_>>()?;
        let mut row = vec![i(n)];
        row.extend(ln.iter().map(|l| f(l.exp())));
        row.extend(ln.iter().map(|l| f(l / std::f64::consts::LN_10)));
        t.push(row);
    }
    Ok(t)
}

pub fn fig_served_vs_n(ctx: &RecipeContext) -> Result<Table> {
    let points: Vec<(f64, usize)> =
        [0.1, 0.3].iter().flat_map(|&tau| (5..=60).step_by(5).map(move |n| (tau, n))).collect();
    let mut t = Table::new("fig-served-vs-N", &header(&["tau", "N"], &SERVED_COLUMNS));
    let rows = sweep(
        &points,
        |(tau, n)| format!("tau={tau}, N={n}"),
        |j, &(tau, n)| {
            let cfg = SystemConfig { tau, channels: n, ..ctx.base.clone() };
            let mut row = vec![f(tau), i(n)];
            row.extend(served_cells(&cfg, ctx, point_seed(ctx.seed, j))?);
            Ok(row)
        },
    )?;
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn fig_served_vs_phi2(ctx: &RecipeContext) -> Result<Table> {
    let points: Vec<(f64, f64)> =
        [-15.0, -5.0].iter().flat_map(|&p1| grid(-40.0, -10.0, 2.0).into_iter().map(move |p2| (p1, p2))).collect();
    let mut t = Table::new("fig-served-vs-phi2", &header(&["phi1_db", "phi2_db", "phi2"], &SERVED_COLUMNS));
    let rows = sweep(
        &points,
        |(a, b)| format!("phi1_db={a}, phi2_db={b}"),
        |j, &(p1, p2)| {
            let cfg = SystemConfig { channels: 30, phi1: db_to_linear(p1), phi2: db_to_linear(p2), ..ctx.base.clone() };
            let mut row = vec![f(p1), f(p2), f(cfg.phi2)];
            row.extend(served_cells(&cfg, ctx, point_seed(ctx.seed, j))?);
            Ok(row)
        },
    )?;
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn fig_a1_vs_phi1(ctx: &RecipeContext) -> Result<Table> {
    let points: Vec<(f64, f64)> =
        [0.0, 0.1].iter().flat_map(|&mu| grid(-30.0, 0.0, 1.0).into_iter().map(move |p| (mu, p))).collect();
    let mut t = Table::new(
        "fig-a1-vs-phi1",
        &[
            "mu",
            "phi1_db",
            "a1_equal_reliability",
            "equal_reliability_degenerate",
            "p12_at_equal",
            "p22_at_equal",
            "kbar_at_equal",
            "a1_max_kbar",
            "kbar_max",
            "max_kbar_flat",
        ],
    );
    let settings = SearchSettings::default();
    let rows = sweep(
        &points,
        |(mu, p)| format!("mu={mu}, phi1_db={p}"),
        |_, &(mu, p1)| {
            let cfg = SystemConfig { channels: 30, mu, phi1: db_to_linear(p1), ..ctx.base.clone() };
            let eq = optimizer::equal_reliability_a1(&cfg)?;
            let at_eq = cfg.with_a1(eq.a1)?;
            let best = optimizer::max_served_a1(&cfg, Scheme::Rrs, Objective::Aggregation, &settings, &ctx.quad)?;
            Ok(vec![
                f(mu),
                f(p1),
                f(eq.a1),
                i(eq.degenerate),
                f(rrs::p12(&at_eq)?),
                f(rrs::p22(&at_eq)?),
                f(relay::avg_active(&at_eq, Scheme::Rrs, &ctx.quad)?),
                f(best.a1),
                f(best.value),
                i(best.flat),
            ])
        },
    )?;
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn fig_served_vs_delta(ctx: &RecipeContext) -> Result<Table> {
    let points: Vec<(f64, f64)> =
        [0.1, 0.3].iter().flat_map(|&tau| grid(0.25, 2.0, 0.25).into_iter().map(move |d| (tau, d))).collect();
    let mut t = Table::new(
        "fig-served-vs-delta",
        &[
            "tau",
            "delta",
            "a1_opt",
            "kbar_rrs_opt_analytic",
            "kbar_rrs_even_analytic",
            "kbar_oma_analytic",
            "kbar_rrs_opt_sim",
            "kbar_rrs_opt_sim_stderr",
        ],
    );
    let settings = SearchSettings::default();
    let rows = sweep(
        &points,
        |(tau, d)| format!("tau={tau}, delta={d}"),
        |j, &(tau, delta)| {
            let cfg = SystemConfig { channels: 30, tau, split: PowerSplit::even(delta)?, ..ctx.base.clone() };
            let best = optimizer::max_served_a1(&cfg, Scheme::Rrs, Objective::EndToEnd, &settings, &ctx.quad)?;
            let mut row = vec![
                f(tau),
                f(delta),
                f(best.a1),
                f(best.value),
                f(served_analytic(&cfg, CliScheme::Rrs, &ctx.quad)?),
                f(served_analytic(&cfg, CliScheme::Oma, &ctx.quad)?),
            ];
            match ctx.replications {
                Some(r) => {
                    let rep = simulate(&cfg.with_a1(best.a1)?, CliScheme::Rrs, r, point_seed(ctx.seed, j), &ctx.quad)?;
                    row.extend([f(rep.served.mean()), f(rep.served.stderr())]);
                }
                None => row.extend([String::new(), String::new()]),
            }
            Ok(row)
        },
    )?;
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn fig_served_vs_mu(ctx: &RecipeContext) -> Result<Table> {
    let points = grid(0.0, 1.0, 0.05);
    let mut t = Table::new("fig-served-vs-mu", &header(&["mu"], &SERVED_COLUMNS));
    let rows = sweep(
        &points,
        |mu| format!("mu={mu}"),
        |j, &mu| {
            let cfg = SystemConfig { channels: 30, mu, ..ctx.base.clone() };
            let mut row = vec![f(mu)];
            row.extend(served_cells(&cfg, ctx, point_seed(ctx.seed, j))?);
            Ok(row)
        },
    )?;
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn validate_all(ctx: &RecipeContext) -> Result<RecipeOutput> {
    let settings = ValidationSettings {
        replications: ctx.replications.unwrap_or(ValidationSettings::default().replications),
        seed: ctx.seed,
        quad: ctx.quad,
        ..ValidationSettings::default()
    };
    let reports = validation::run_all(&settings)?;
    let mut t = Table::new("validate-all", &["criterion", "check", "measured", "limit", "status", "detail"]);
    for r in &reports {
        t.push(vec![
            i(r.id),
            "overall".into(),
            String::new(),
            String::new(),
            r.status().as_str().into(),
            r.title.into(),
        ]);
        for c in &r.checks {
            t.push(vec![
                i(r.id),
                c.name.clone(),
                f(c.measured),
                f(c.limit),
                c.status.as_str().into(),
                c.detail.clone(),
            ]);
        }
    }
    Ok(RecipeOutput { table: t, all_passed: reports.iter().all(|r| r.passed()) })
}
