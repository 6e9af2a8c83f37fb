//! Subcommand implementations.

use anyhow::{bail, Result};
use mmtc_core::optimizer::{self, Objective, SearchSettings};
use mmtc_core::sim::{self, SimSpec};
use mmtc_core::{relay, rrs, searchspace, QuadratureSpec, Scheme, SystemConfig};

use crate::recipes::{self, CliScheme, RecipeContext};
use crate::table::{f, i, Table};
use crate::{config, exit, Cli, Command};

pub const DEFAULT_SEED: u64 = 42;

/// Tables produced by a command and the exit code to report after writing them.
pub struct Outcome {
    pub tables: Vec<Table>,
    pub code: u8,
}

impl Outcome {
    fn ok(tables: Vec<Table>) -> Self {
        Self { tables, code: exit::OK }
    }
}

/// Resolved inputs of a command.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub cfg: SystemConfig,
    pub seed: u64,
    pub replications: u64,
    pub scheme: CliScheme,
    pub simulate: bool,
    pub quad: QuadratureSpec,
}

impl Inputs {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let scenario = match &cli.config {
            Some(path) => config::load_config(path)?,
            None => config::Scenario { cfg: SystemConfig::default(), seed: None },
        };
        Ok(Self {
            cfg: scenario.cfg,
            seed: cli.seed.or(scenario.seed).unwrap_or(DEFAULT_SEED),
            replications: cli.replications,
            scheme: cli.scheme,
            simulate: !cli.no_sim,
            quad: QuadratureSpec::default(),
        })
    }

    fn recipe_context(&self) -> RecipeContext {
        RecipeContext {
            base: self.cfg.clone(),
            seed: self.seed,
            replications: self.simulate.then_some(self.replications),
            quad: self.quad,
        }
    }
}

pub fn run(command: &Command, inputs: &Inputs) -> Result<Outcome> {
    match command {
        Command::Analyze => analyze(inputs).map(Outcome::ok),
        Command::Simulate => simulate(inputs).map(Outcome::ok),
        Command::Optimize => optimize(inputs).map(Outcome::ok),
        Command::Searchspace => search_space(inputs).map(Outcome::ok),
        Command::Sweep { recipe } => sweep(recipe, inputs),
        Command::Validate => sweep("validate-all", inputs),
    }
}

fn sweep(recipe: &str, inputs: &Inputs) -> Result<Outcome> {
    let out = recipes::run_recipe(recipe, &inputs.recipe_context())?;
    let code = if out.all_passed { exit::OK } else { exit::VALIDATION };
    Ok(Outcome { tables: vec![out.table], code })
}

fn metric(t: &mut Table, name: &str, value: String) {
    t.push(vec![name.into(), value]);
}

pub fn analyze(inputs: &Inputs) -> Result<Vec<Table>> {
    let (cfg, scheme) = inputs.scheme.analytic(&inputs.cfg)?;
    let pmf = relay::scheme_pmf(&cfg, scheme, &inputs.quad)?;
    let served = relay::served_from_pmf(&cfg, &pmf)?;
    let mut summary = Table::new("analyze_summary", &["metric", "value"]);
    metric(&mut summary, "scheme", inputs.scheme.name().into());
    if scheme == Scheme::Rrs {
        let p = rrs::success_probs(&cfg)?;
        metric(&mut summary, "p11", f(p.p11));
        metric(&mut summary, "p12", f(p.p12));
        metric(&mut summary, "p22", f(p.p22));
    }
    metric(&mut summary, "avg_decoded", f(pmf.mean()));
    metric(&mut summary, "avg_served", f(served.overall));
    metric(&mut summary, "truncation_mass", f(pmf.truncation_mass()));
    let mut dist = Table::new("analyze_pmf", &["k1", "probability", "relay_success"]);
    for (k1, (p, r)) in pmf.probs().iter().zip(&served.per_k1).enumerate() {
        dist.push(vec![i(k1), f(*p), f(*r)]);
    }
    Ok(vec![summary, dist])
}

pub fn simulate(inputs: &Inputs) -> Result<Vec<Table>> {
    let (cfg, scheme) = inputs.scheme.simulated(&inputs.cfg);
    let report = sim::run(&SimSpec::new(cfg, scheme, inputs.replications, inputs.seed), &inputs.quad)?;
    let mut summary = Table::new("simulate_summary", &["metric", "value", "stderr"]);
    let mut row = |name: &str, value: f64, se: Option<f64>| {
        summary.push(vec![name.into(), f(value), se.map(f).unwrap_or_default()]);
    };
    row("replications", report.replications as f64, None);
    row("seed", inputs.seed as f64, None);
    for (name, t) in [("p_solo", &report.solo), ("p_first", &report.first), ("p_second", &report.second)] {
        row(name, t.estimate(), Some(t.stderr()));
    }
    row("avg_decoded", report.active.mean(), Some(report.active.stderr()));
    row("avg_served", report.served.mean(), Some(report.served.stderr()));
    if let Some(o) = &report.opt {
        row("opt_epochs", o.epochs as f64, None);
        row("opt_mean_decoded", o.mean_opt(), None);
        row("opt_mean_crs", o.mean_crs(), None);
        row("opt_mean_rrs", o.mean_rrs(), None);
        row("opt_strong_weak_frequency", o.strong_weak_frequency(), None);
        row("opt_below_crs_epochs", o.opt_below_crs as f64, None);
    }
    let pmf = report.pmf();
    let mut dist = Table::new("simulate_pmf", &["k1", "probability", "count", "relay_success", "relay_trials"]);
    for (k1, p) in pmf.probs().iter().enumerate() {
        let relay = &report.relay[k1];
        dist.push(vec![i(k1), f(*p), i(report.k1_counts[k1]), f(relay.estimate()), i(relay.trials)]);
    }
    Ok(vec![summary, dist])
}

pub fn optimize(inputs: &Inputs) -> Result<Vec<Table>> {
    let (cfg, scheme) = inputs.scheme.analytic(&inputs.cfg)?;
    if cfg.is_oma() {
        bail!(mmtc_core::Error::InvalidConfig("one device per channel leaves no power split to optimize".into()));
    }
    let mut t = Table::new("optimize", &["metric", "value"]);
    metric(&mut t, "scheme", inputs.scheme.name().into());
    metric(&mut t, "delta", f(cfg.delta()));
    match optimizer::equal_reliability_a1(&cfg) {
        Ok(eq) => {
            metric(&mut t, "a1_equal_reliability", f(eq.a1));
            metric(&mut t, "equal_reliability_gap", f(eq.gap));
            metric(&mut t, "equal_reliability_degenerate", i(eq.degenerate));
            metric(&mut t, "equal_reliability_in_region", i(eq.in_region));
        }
        Err(mmtc_core::Error::Infeasible(why)) => metric(&mut t, "equal_reliability_infeasible", why),
        Err(e) => return Err(e.into()),
    }
    let settings = SearchSettings::default();
    for (label, objective) in [("decoded", Objective::Aggregation), ("served", Objective::EndToEnd)] {
        let best = optimizer::max_served_a1(&cfg, scheme, objective, &settings, &inputs.quad)?;
        metric(&mut t, &format!("a1_max_{label}"), f(best.a1));
        metric(&mut t, &format!("max_{label}"), f(best.value));
        metric(&mut t, &format!("max_{label}_flat"), i(best.flat));
    }
    Ok(vec![t])
}

pub fn search_space(inputs: &Inputs) -> Result<Vec<Table>> {
    let (m, n) = (inputs.cfg.mean_load, inputs.cfg.channels);
    let ln = searchspace::ln_avg_dim(m, n)?;
    let mut summary = Table::new("searchspace_summary", &["metric", "value"]);
    metric(&mut summary, "mean_load", f(m));
    metric(&mut summary, "channels", i(n));
    metric(&mut summary, "avg_dim", f(ln.exp()));
    metric(&mut summary, "log10_avg_dim", f(ln / std::f64::consts::LN_10));
    let k_max = ((m + 6.0 * m.sqrt()).ceil() as usize).max(2 * n + 2);
    let mut counts = Table::new("searchspace_counts", &["k", "dim", "log10_dim"]);
    for k in 0..=k_max {
        let d = searchspace::dim(k, n);
        counts.push(vec![i(k), d.to_string(), f(searchspace::dim_f64(k, n).log10())]);
    }
    Ok(vec![summary, counts])
}
