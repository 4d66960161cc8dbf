//! Simulate, predict, bound and diagnose for every scenario of a config.

use serde::{Deserialize, Serialize};

use super::config::{
    Evaluate, EvaluateMode, ExperimentConfig, PredictionScenario, PredictorConfig, RecursionScenario,
    Scenario, SideInformationScenario,
};
use crate::bounds::{
    equality_diagnostics, lp_standard_error, prediction_bound_via, recursion_bound, BoundReport,
    BoundSource, EntropyRoute, EqualityDiagnostics,
};
use crate::error::{Error, Result};
use crate::estimators::{empirical_lp_norm, EnsembleMatrix, SampleSet};
use crate::maxent::{MaxEntDensity, PExponent};
use crate::predictors::{apply_predictor, fit_linear_predictor, AutocovSource};
use crate::processes::{simulate_process, simulate_recursion, ArInit, ProcessSpec};
use crate::rng;
use rand::distr::Distribution;

pub const TOOL_NAME: &str = "entrobound";

/// One bound evaluation: a scenario at one exponent and one step (or pooled
/// over steady-state steps when `k` is `None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub k: Option<usize>,
    pub report: BoundReport,
    /// Standard error of `report.empirical_lp`.
    pub standard_error: f64,
    pub samples: usize,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRun {
    pub name: String,
    pub seed: u64,
    pub realizations: usize,
    pub steps: usize,
    /// First step counted as steady state.
    pub steady_start: usize,
    /// The predictor actually applied, for prediction scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictor: Option<crate::predictors::PredictorSpec>,
}

/// Everything a run produced. Contains no timestamps or thread counts, so a
/// given config and seed always serialize to the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub scenarios: Vec<ScenarioRun>,
    pub rows: Vec<ReportRow>,
    pub violations: usize,
}

impl RunReport {
    pub fn rows_for<'a>(&'a self, scenario: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.scenario == scenario)
    }

    pub fn has_violations(&self) -> bool {
        self.violations > 0
    }
}

/// Seed of scenario `index`: the config seed offset by the index.
pub fn scenario_seed(config_seed: u64, index: usize) -> u64 {
    config_seed.wrapping_add(index as u64)
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    exponents: &'a [PExponent],
    seed: u64,
}

impl Context<'_> {
    fn row(&self, scenario: &str, k: Option<usize>, report: BoundReport, values: &SampleSet) -> ReportRow {
        let se = lp_standard_error(values, report.p, self.config.standard_error, self.seed);
        let violated = report.is_violated(se, self.config.violation_sigmas);
        ReportRow { scenario: scenario.to_string(), k, report, standard_error: se, samples: values.len(), violated }
    }
}

/// Runs every scenario in order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let mut scenarios = Vec::new();
    let mut rows = Vec::new();
    for (i, scenario) in config.scenarios.iter().enumerate() {
        let ctx = Context { config, exponents: scenario.exponents(&config.p), seed: scenario_seed(config.seed, i) };
        let n = scenario.realizations(config.realizations);
        let k = scenario.steps(config.steps);
        let (meta, mut new_rows) = match scenario {
            Scenario::Prediction(s) => run_prediction(&ctx, s, n, k)?,
            Scenario::Recursion(s) => run_recursion(&ctx, s, n, k)?,
            Scenario::SideInformation(s) => run_side_information(&ctx, s, n)?,
        };
        scenarios.push(meta);
        rows.append(&mut new_rows);
    }
    let violations = rows.iter().filter(|r| r.violated).count();
    Ok(RunReport {
        tool: TOOL_NAME.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        scenarios,
        rows,
        violations,
    })
}

/// Steps to report, or `None` for a single pooled row.
fn selected_steps(e: &Evaluate, first: usize, last: usize) -> Vec<Option<usize>> {
    match e {
        Evaluate::Mode(EvaluateMode::Pooled) => vec![None],
        Evaluate::Mode(EvaluateMode::All) => (first..=last).map(Some).collect(),
        Evaluate::Steps(ks) => ks.iter().copied().map(Some).collect(),
    }
}

/// Columns `k - history .. k` of `states` that actually vary; a
/// deterministic start carries no information and breaks neighbour counts.
fn conditioning(states: &EnsembleMatrix, k: usize, history: usize) -> Result<Option<EnsembleMatrix>> {
    let cols: Vec<usize> = (k.saturating_sub(history)..k)
        .filter(|&j| {
            let first = states.get(0, j);
            (1..states.rows()).any(|i| states.get(i, j) != first)
        })
        .collect();
    if cols.is_empty() {
        Ok(None)
    } else {
        states.select(&cols).map(Some)
    }
}

fn pooled(m: &EnsembleMatrix, start: usize) -> Result<SampleSet> {
    SampleSet::new((0..m.rows()).flat_map(|i| m.row(i)[start..].to_vec()).collect())
}

/// Diagnostics per exponent, sharing the information estimate.
fn diagnostics_for(
    errors: &EnsembleMatrix,
    target: usize,
    cond: Option<&EnsembleMatrix>,
    steady_start: usize,
    exponents: &[PExponent],
    ctx: &Context<'_>,
) -> Result<Vec<EqualityDiagnostics>> {
    let first = equality_diagnostics(errors, target, cond, exponents[0], None, steady_start, &ctx.config.thresholds)?;
    let mut out = vec![first.clone()];
    for &p in &exponents[1..] {
        out.push(first.with_exponent(errors, steady_start, p, None)?);
    }
    Ok(out)
}

fn run_prediction(
    ctx: &Context<'_>,
    s: &PredictionScenario,
    n: usize,
    steps: usize,
) -> Result<(ScenarioRun, Vec<ReportRow>)> {
    let ens = simulate_process(&s.process, n, steps, ctx.seed)?;
    let predictor = match &s.predictor {
        PredictorConfig::Fitted { order } => {
            fit_linear_predictor(AutocovSource::Ensemble(&ens), *order)?.predictor
        }
        fixed => fixed.fixed(&s.process).expect("non-fitted predictors are fixed"),
    };
    let innovations = apply_predictor(&predictor, &ens)?;
    let deterministic_start = matches!(s.process, ProcessSpec::GaussianAr { init: ArInit::Deterministic(_), .. });
    let steady_start = innovations.warmup().max(usize::from(deterministic_start));
    if steady_start > steps {
        return Err(Error::Config {
            path: format!("scenario.{}", s.name),
            message: format!("no steady-state steps: warm-up {steady_start} exceeds {steps} steps"),
        });
    }
    let states = ens.states_matrix();
    let errors = innovations.errors();
    let source = match s.route {
        Some(EntropyRoute::KnnEstimated) => BoundSource::Estimated {
            states: &states,
            max_history: s.history,
            k_neighbors: ctx.config.thresholds.k_neighbors,
        },
        _ => BoundSource::Process(s.process.clone()),
    };

    let mut rows = Vec::new();
    for k in selected_steps(&s.evaluate, steady_start, steps) {
        // pooled rows use the bound at the longest history, the smallest one
        let at = k.unwrap_or(steps);
        let values = match k {
            Some(k) => SampleSet::new(errors.column(k))?,
            None => pooled(errors, steady_start)?,
        };
        let diags = if s.diagnostics {
            let cond = conditioning(&states, at, s.history)?;
            Some(diagnostics_for(errors, at, cond.as_ref(), steady_start, ctx.exponents, ctx)?)
        } else {
            None
        };
        for (j, &p) in ctx.exponents.iter().enumerate() {
            let mut report = prediction_bound_via(&source, p, at, s.route)?
                .with_empirical(empirical_lp_norm(&values, p));
            if let Some(d) = &diags {
                report = report.with_diagnostics(d[j].clone());
            }
            rows.push(ctx.row(&s.name, k, report, &values));
        }
    }
    let meta = ScenarioRun {
        name: s.name.clone(),
        seed: ctx.seed,
        realizations: n,
        steps,
        steady_start,
        predictor: Some(innovations.predictor().clone()),
    };
    Ok((meta, rows))
}

fn run_recursion(
    ctx: &Context<'_>,
    s: &RecursionScenario,
    n: usize,
    steps: usize,
) -> Result<(ScenarioRun, Vec<ReportRow>)> {
    let ens = simulate_recursion(&s.recursion, n, steps, ctx.seed)?;
    let residuals = ens.residuals_matrix().ok_or_else(|| Error::Degenerate("recursion stored no residuals".into()))?;
    let states = ens.states_matrix();
    let mut rows = Vec::new();
    // residual column k is r_{k+1}, which may depend on x_0..x_k
    for k in selected_steps(&s.evaluate, 0, steps - 1) {
        let at = k.unwrap_or(steps - 1);
        let values = match k {
            Some(k) => SampleSet::new(residuals.column(k))?,
            None => pooled(&residuals, 0)?,
        };
        let diags = if s.diagnostics {
            let cond = conditioning(&states, at + 1, s.history)?;
            Some(diagnostics_for(&residuals, at, cond.as_ref(), 0, ctx.exponents, ctx)?)
        } else {
            None
        };
        for (j, &p) in ctx.exponents.iter().enumerate() {
            let mut report = recursion_bound(&s.recursion, p, at)?.with_empirical(empirical_lp_norm(&values, p));
            if let Some(d) = &diags {
                report = report.with_diagnostics(d[j].clone());
            }
            rows.push(ctx.row(&s.name, k, report, &values));
        }
    }
    let meta = ScenarioRun {
        name: s.name.clone(),
        seed: ctx.seed,
        realizations: n,
        steps,
        steady_start: 0,
        predictor: None,
    };
    Ok((meta, rows))
}

/// `h(x | y)` in bits for jointly Gaussian `x` and `y = x + v`.
pub fn gaussian_side_information_entropy(signal_sigma: f64, noise_sigma: f64) -> f64 {
    let (s2, n2) = (signal_sigma * signal_sigma, noise_sigma * noise_sigma);
    0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * s2 * n2 / (s2 + n2)).log2()
}

fn run_side_information(
    ctx: &Context<'_>,
    s: &SideInformationScenario,
    n: usize,
) -> Result<(ScenarioRun, Vec<ReportRow>)> {
    let x = MaxEntDensity::gaussian(s.signal_sigma)?.sample(n, ctx.seed)?.into_values();
    let noise = MaxEntDensity::gaussian(s.noise_sigma)?.sampler();
    let mut stream = rng::stream(ctx.seed, 1);
    let y: Vec<f64> = x.iter().map(|xi| xi + noise.sample(&mut stream)).collect();
    let gain = s.signal_sigma.powi(2) / (s.signal_sigma.powi(2) + s.noise_sigma.powi(2));
    let e: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| xi - gain * yi).collect();

    let errors = EnsembleMatrix::from_columns(&[&e])?;
    let values = SampleSet::new(e)?;
    let diags = if s.diagnostics {
        let cond = EnsembleMatrix::from_columns(&[&y])?;
        Some(diagnostics_for(&errors, 0, Some(&cond), 0, ctx.exponents, ctx)?)
    } else {
        None
    };
    let source = BoundSource::ConditionalEntropy {
        bits: gaussian_side_information_entropy(s.signal_sigma, s.noise_sigma),
    };
    let mut rows = Vec::new();
    for (j, &p) in ctx.exponents.iter().enumerate() {
        let mut report = prediction_bound_via(&source, p, 0, None)?.with_empirical(empirical_lp_norm(&values, p));
        if let Some(d) = &diags {
            report = report.with_diagnostics(d[j].clone());
        }
        rows.push(ctx.row(&s.name, None, report, &values));
    }
    let meta = ScenarioRun {
        name: s.name.clone(),
        seed: ctx.seed,
        realizations: n,
        steps: 0,
        steady_start: 0,
        predictor: None,
    };
    Ok((meta, rows))
}
