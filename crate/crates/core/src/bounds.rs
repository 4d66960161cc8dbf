//! Entropic lower bounds on L_p norms of prediction errors and recursion
//! residuals, plus diagnostics for the conditions under which they are met
//! with equality.
//!
//! Every bound has the form `||e||_p >= 2^h / C_p` with
//! `C_p = 2 Γ((p+1)/p) (p e)^{1/p}` (and `C_∞ = 2`), where `h` is the
//! conditional entropy of the error given everything the predictor may use.
//! The bound is the scale of the maximum-entropy density with entropy `h`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    self, conditional_entropy, lag_correlations, maxent_gof, mutual_information, EnsembleMatrix,
    EstimatorMethod, GofStatistic, InfoEstimate, SampleSet, DEFAULT_K_NEIGHBORS,
};
use crate::levinson;
use crate::maxent::{log2_norm_constant, MaxEntDensity, PExponent};
use crate::processes::{ArInit, ProcessSpec, RecursionSpec};
use crate::spectral::{
    ar_spectrum, negentropy_rate_iid, szego_entropy_rate, Marginal, NegentropyRate,
    SpectralDensity, DEFAULT_GRID_SIZE,
};

/// Lower bound on `||e||_p` for an error with (conditional) entropy `h` bits.
pub fn lp_bound(h: f64, p: PExponent) -> f64 {
    (h - log2_norm_constant(p)).exp2()
}

/// How the entropy behind a bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyRoute {
    ClosedForm,
    KnnEstimated,
    SzegoSpectral,
    SzegoMinusNegentropy,
}

impl std::fmt::Display for EntropyRoute {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EntropyRoute::ClosedForm => "closed-form",
            EntropyRoute::KnnEstimated => "knn-estimated",
            EntropyRoute::SzegoSpectral => "szego-spectral",
            EntropyRoute::SzegoMinusNegentropy => "szego-minus-negentropy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: PExponent,
    pub bound_value: f64,
    /// Bits.
    pub entropy_used: f64,
    pub entropy_source: EntropyRoute,
    pub empirical_lp: Option<f64>,
    /// `empirical_lp - bound_value`.
    pub slack: Option<f64>,
    pub diagnostics: Option<EqualityDiagnostics>,
}

impl BoundReport {
    pub fn new(entropy_bits: f64, p: PExponent, route: EntropyRoute) -> Self {
        BoundReport {
            p,
            bound_value: lp_bound(entropy_bits, p),
            entropy_used: entropy_bits,
            entropy_source: route,
            empirical_lp: None,
            slack: None,
            diagnostics: None,
        }
    }

    pub fn with_empirical(mut self, empirical_lp: f64) -> Self {
        self.empirical_lp = Some(empirical_lp);
        self.slack = Some(empirical_lp - self.bound_value);
        self
    }

    pub fn with_diagnostics(mut self, diagnostics: EqualityDiagnostics) -> Self {
        self.diagnostics = Some(diagnostics);
        self
    }

    /// Slack as a fraction of the bound.
    pub fn relative_slack(&self) -> Option<f64> {
        self.slack.map(|s| s / self.bound_value)
    }

    /// True when the empirical norm sits more than `sigmas` standard errors
    /// below the bound.
    pub fn is_violated(&self, standard_error: f64, sigmas: f64) -> bool {
        self.empirical_lp
            .is_some_and(|e| e < self.bound_value - sigmas * standard_error)
    }
}

/// Where the entropy of the error comes from.
#[derive(Debug, Clone)]
pub enum BoundSource<'a> {
    /// A process with known law.
    Process(ProcessSpec),
    /// A conditional entropy known in closed form, e.g. `h(x | y)` when
    /// estimating `x` from side information `y`.
    ConditionalEntropy { bits: f64 },
    /// Asymptotic spectrum. Non-Gaussian processes need their negentropy rate.
    Spectral {
        spectrum: SpectralDensity,
        negentropy: Option<NegentropyRate>,
        gaussian: bool,
    },
    /// kNN estimate of `h(x_k | x_{k-m}, ..., x_{k-1})` from an ensemble of
    /// states (one column per time step), with `m = min(k, max_history)`.
    Estimated {
        states: &'a EnsembleMatrix,
        max_history: usize,
        k_neighbors: usize,
    },
}

impl BoundSource<'_> {
    pub fn estimated(states: &EnsembleMatrix, max_history: usize) -> BoundSource<'_> {
        BoundSource::Estimated { states, max_history, k_neighbors: DEFAULT_K_NEIGHBORS }
    }

    /// The spectral description of a process: its AR spectrum, or a flat
    /// spectrum plus negentropy rate for i.i.d. processes.
    pub fn spectral_for(spec: &ProcessSpec, grid_size: usize) -> Result<BoundSource<'static>> {
        spec.validate()?;
        match spec {
            ProcessSpec::Iid { density } => Ok(BoundSource::Spectral {
                spectrum: SpectralDensity::flat(density.variance(), grid_size)?,
                negentropy: Some(negentropy_rate_iid(&Marginal::MaxEnt { density: *density })?),
                gaussian: density.is_gaussian(),
            }),
            ProcessSpec::GaussianAr { coeffs, sigma, .. } => Ok(BoundSource::Spectral {
                spectrum: ar_spectrum(coeffs, *sigma, grid_size)?,
                negentropy: Some(NegentropyRate::gaussian()),
                gaussian: true,
            }),
        }
    }

    fn default_route(&self) -> EntropyRoute {
        match self {
            BoundSource::Process(_) | BoundSource::ConditionalEntropy { .. } => EntropyRoute::ClosedForm,
            BoundSource::Spectral { gaussian: true, .. } => EntropyRoute::SzegoSpectral,
            BoundSource::Spectral { .. } => EntropyRoute::SzegoMinusNegentropy,
            BoundSource::Estimated { .. } => EntropyRoute::KnnEstimated,
        }
    }
}

fn gaussian_entropy(variance: f64) -> f64 {
    0.5 * (2.0 * PI * E * variance).log2()
}

fn unresolvable(route: EntropyRoute) -> Error {
    Error::Unsupported(format!("entropy route `{route}` is not available for this source"))
}

fn spectral_entropy(
    spectrum: &SpectralDensity,
    negentropy: Option<NegentropyRate>,
    gaussian: bool,
    route: EntropyRoute,
) -> Result<f64> {
    let rate = szego_entropy_rate(spectrum)?;
    match (route, gaussian, negentropy) {
        (EntropyRoute::SzegoSpectral, true, _) => Ok(rate),
        (EntropyRoute::SzegoSpectral, false, _) => Err(Error::Unsupported(
            "the plain spectral route needs a Gaussian process; use the negentropy-adjusted route".into(),
        )),
        (EntropyRoute::SzegoMinusNegentropy, _, Some(j)) => Ok(rate - j.value),
        (EntropyRoute::SzegoMinusNegentropy, true, None) => Ok(rate),
        (EntropyRoute::SzegoMinusNegentropy, false, None) => Err(Error::Unsupported(
            "spectral route for a non-Gaussian process needs its negentropy rate".into(),
        )),
        (other, ..) => Err(unresolvable(other)),
    }
}

fn process_closed_form(spec: &ProcessSpec, k: usize) -> Result<f64> {
    spec.validate()?;
    match spec {
        ProcessSpec::Iid { density } => Ok(density.entropy_bits()),
        ProcessSpec::GaussianAr { coeffs, sigma, init } => match init {
            ArInit::Stationary => {
                let m = k.min(coeffs.len());
                let r = levinson::ar_autocovariance(coeffs, *sigma, m)?;
                let sol = levinson::levinson_durbin(&r, m)?;
                Ok(gaussian_entropy(sol.final_error()))
            }
            ArInit::Deterministic(_) if k == 0 => Err(Error::Degenerate(
                "x_0 is deterministic, so its prediction error has no entropy".into(),
            )),
            ArInit::Deterministic(_) => Ok(gaussian_entropy(sigma * sigma)),
        },
    }
}

/// Resolves the entropy (bits) of the step-`k` error and the route used.
/// Without an explicit route the most accurate available one is taken:
/// closed form, then spectral, then estimated.
pub fn resolve_entropy(
    source: &BoundSource<'_>,
    k: usize,
    route: Option<EntropyRoute>,
) -> Result<(f64, EntropyRoute)> {
    let route = route.unwrap_or_else(|| source.default_route());
    let h = match (source, route) {
        (BoundSource::Process(spec), EntropyRoute::ClosedForm) => process_closed_form(spec, k)?,
        (BoundSource::Process(spec), EntropyRoute::SzegoSpectral | EntropyRoute::SzegoMinusNegentropy) => {
            match BoundSource::spectral_for(spec, DEFAULT_GRID_SIZE)? {
                BoundSource::Spectral { spectrum, negentropy, gaussian } => {
                    spectral_entropy(&spectrum, negentropy, gaussian, route)?
                }
                _ => unreachable!("spectral_for returns a spectral source"),
            }
        }
        (BoundSource::ConditionalEntropy { bits }, EntropyRoute::ClosedForm) => {
            if !bits.is_finite() {
                return Err(Error::invalid("conditional entropy must be finite"));
            }
            *bits
        }
        (BoundSource::Spectral { spectrum, negentropy, gaussian }, _) => {
            spectral_entropy(spectrum, *negentropy, *gaussian, route)?
        }
        (BoundSource::Estimated { states, max_history, k_neighbors }, EntropyRoute::KnnEstimated) => {
            if k >= states.cols() {
                return Err(Error::invalid(format!("step {k} outside {} columns", states.cols())));
            }
            let m = k.min(*max_history);
            let past: Vec<usize> = (k - m..k).collect();
            conditional_entropy(states, k, &past, *k_neighbors)?.value
        }
        (_, other) => return Err(unresolvable(other)),
    };
    Ok((h, route))
}

/// Lower bound on the L_p norm of the step-`k` prediction error of any
/// causal predictor. Spectral routes give the asymptotic bound and ignore `k`.
pub fn prediction_bound(source: &BoundSource<'_>, p: PExponent, k: usize) -> Result<BoundReport> {
    prediction_bound_via(source, p, k, None)
}

pub fn prediction_bound_via(
    source: &BoundSource<'_>,
    p: PExponent,
    k: usize,
    route: Option<EntropyRoute>,
) -> Result<BoundReport> {
    let (h, route) = resolve_entropy(source, k, route)?;
    Ok(BoundReport::new(h, p, route))
}

/// Lower bound on the L_p norm of the residual `r_{k+1}` of a noisy
/// recursion. With i.i.d. noise independent of `x_0` the conditional entropy
/// of `n_k` given its past and `x_0` is `h(n_k)`, whatever the map and
/// residual functional.
pub fn recursion_bound(spec: &RecursionSpec, p: PExponent, _k: usize) -> Result<BoundReport> {
    let noise = spec.noise.as_ref().ok_or_else(|| {
        Error::Degenerate("noise-free recursion: residual entropy is unbounded below".into())
    })?;
    Ok(BoundReport::new(noise.entropy_bits(), p, EntropyRoute::ClosedForm))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticThresholds {
    /// Bits.
    pub mi: f64,
    pub ks: f64,
    pub lag_correlation: f64,
    pub max_lag: usize,
    pub k_neighbors: usize,
}

impl Default for DiagnosticThresholds {
    fn default() -> Self {
        DiagnosticThresholds { mi: 0.05, ks: 0.02, lag_correlation: 0.02, max_lag: 5, k_neighbors: DEFAULT_K_NEIGHBORS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityDiagnostics {
    pub mi_innovation_past: InfoEstimate,
    pub gof_to_maxent: GofStatistic,
    /// Scale of the maximum-entropy density the errors were tested against.
    pub mu_used: f64,
    pub lag_correlations: Vec<f64>,
    pub mi_pass: bool,
    pub gof_pass: bool,
    pub white_pass: bool,
    pub verdict: bool,
    pub thresholds: DiagnosticThresholds,
}

/// Tests the equality conditions of the bound on an `N x T` error matrix:
/// the error at column `target` carries no information about `conditioning`
/// (rows aligned), errors from column `steady_start` on follow the
/// maximum-entropy density of order `p`, and they are white.
///
/// The density scale is `mu_hint`, or the empirical L_p norm of the pooled
/// errors.
pub fn equality_diagnostics(
    errors: &EnsembleMatrix,
    target: usize,
    conditioning: Option<&EnsembleMatrix>,
    p: PExponent,
    mu_hint: Option<f64>,
    steady_start: usize,
    thresholds: &DiagnosticThresholds,
) -> Result<EqualityDiagnostics> {
    if target >= errors.cols() || steady_start >= errors.cols() {
        return Err(Error::invalid(format!("error matrix has only {} columns", errors.cols())));
    }
    let mi = match conditioning {
        Some(cond) => mutual_information(&errors.select(&[target])?, cond, thresholds.k_neighbors)?,
        None => InfoEstimate {
            value: 0.0,
            n_used: errors.rows(),
            k_neighbors: thresholds.k_neighbors,
            method: EstimatorMethod::Trivial,
        },
    };
    let lags = lag_correlations(errors, steady_start, thresholds.max_lag);
    let white_pass = lags.iter().all(|c| c.abs() < thresholds.lag_correlation);
    let partial = EqualityDiagnostics {
        mi_pass: mi.value < thresholds.mi,
        mi_innovation_past: mi,
        gof_to_maxent: GofStatistic { ks_distance: f64::NAN, n: 0 },
        mu_used: f64::NAN,
        lag_correlations: lags,
        gof_pass: false,
        white_pass,
        verdict: false,
        thresholds: *thresholds,
    };
    partial.with_exponent(errors, steady_start, p, mu_hint)
}

impl EqualityDiagnostics {
    /// Repeats the goodness-of-fit test against the maximum-entropy density
    /// of order `p`, keeping the information and whiteness results.
    pub fn with_exponent(
        &self,
        errors: &EnsembleMatrix,
        steady_start: usize,
        p: PExponent,
        mu_hint: Option<f64>,
    ) -> Result<EqualityDiagnostics> {
        if steady_start >= errors.cols() {
            return Err(Error::invalid(format!("error matrix has only {} columns", errors.cols())));
        }
        let pooled: Vec<f64> = (0..errors.rows())
            .flat_map(|i| errors.row(i)[steady_start..].to_vec())
            .collect();
        let pooled = SampleSet::new(pooled)?;
        let mu = match mu_hint {
            Some(mu) => mu,
            None => estimators::empirical_lp_norm(&pooled, p),
        };
        let density = MaxEntDensity::new(p, mu)
            .map_err(|_| Error::Degenerate(format!("errors have L_p norm {mu}")))?;
        let gof = maxent_gof(&pooled, &density)?;
        let gof_pass = gof.ks_distance < self.thresholds.ks;
        Ok(EqualityDiagnostics {
            gof_to_maxent: gof,
            mu_used: mu,
            gof_pass,
            verdict: self.mi_pass && gof_pass && self.white_pass,
            lag_correlations: self.lag_correlations.clone(),
            ..*self
        })
    }
}

/// How standard errors of empirical L_p norms are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeMethod {
    Bootstrap { resamples: usize },
    /// Delta method; falls back to the bootstrap for `p = ∞`.
    Delta,
}

impl Default for SeMethod {
    fn default() -> Self {
        SeMethod::Bootstrap { resamples: 200 }
    }
}

pub fn lp_standard_error(s: &SampleSet, p: PExponent, method: SeMethod, seed: u64) -> f64 {
    match method {
        SeMethod::Bootstrap { resamples } => estimators::bootstrap_lp_se(s, p, resamples, seed),
        SeMethod::Delta => estimators::delta_lp_se(s, p)
            .unwrap_or_else(|| estimators::bootstrap_lp_se(s, p, 200, seed)),
    }
}
