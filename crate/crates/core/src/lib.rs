//! Entropic L_p lower bounds for sequential prediction and noisy recursions.
//!
//! Every bound in this crate has the same shape: the L_p norm of an error
//! (a one-step prediction error, or the residual of a recursive algorithm)
//! is at least `2^h / (2 Γ((p+1)/p) (p e)^{1/p})`, where `h` is a conditional
//! differential entropy in bits. Equality holds exactly when the error has
//! the L_p maximum-entropy (generalized Gaussian) density and carries no
//! information about the past.
//!
//! The crate computes those bounds from closed forms, from power spectra, or
//! from nonparametric entropy estimates, and checks them against simulated
//! processes, predictors and recursions whose entropies are known.
//!
//! Module map:
//!
//! - [`maxent`]: the maximum-entropy family (density, CDF, entropy, sampling).
//! - [`estimators`]: empirical L_p norms, kNN entropy / KSG mutual information,
//!   Kolmogorov-Smirnov goodness of fit, whiteness checks.
//! - [`spectral`]: AR spectra, the Szegő entropy-rate integral, negentropy of
//!   i.i.d. marginals.
//! - [`processes`]: seeded generators for i.i.d./AR processes and recursions.
//! - [`predictors`]: causal one-step predictors and their innovations.
//! - [`bounds`]: the lower bounds and equality diagnostics.
//! - [`harness`]: config-driven experiment runner and report rendering.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod levinson;
pub mod maxent;
pub mod predictors;
pub mod processes;
pub mod rng;
pub mod spectral;

mod numeric;

pub use bounds::{
    equality_diagnostics, lp_bound, prediction_bound, prediction_bound_via, recursion_bound, BoundReport, BoundSource,
    DiagnosticThresholds, EntropyRoute, EqualityDiagnostics,
};
pub use error::{Error, Result};
pub use estimators::{
    conditional_entropy, empirical_lp_norm, knn_entropy, maxent_gof, mutual_information,
    EnsembleMatrix, GofStatistic, InfoEstimate, SampleSet,
};
pub use maxent::{entropy_closed_form, mu_from_entropy, MaxEntDensity, PExponent};
pub use predictors::{apply_predictor, fit_linear_predictor, oracle_predictor, AutocovSource, InnovationEnsemble, PredictorSpec};
pub use processes::{simulate_process, simulate_recursion, ProcessSpec, RecursionSpec, TrajectoryEnsemble};
pub use spectral::{ar_spectrum, negentropy_rate_iid, szego_entropy_rate, SpectralDensity};
pub use harness::{run_experiment, ExperimentConfig, RunReport};
