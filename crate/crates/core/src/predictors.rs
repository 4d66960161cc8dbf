//! Causal one-step predictors `x̂_k = g_k(x_0, ..., x_{k-1})` and the
//! innovations `e_k = x_k - x̂_k` they leave behind.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EnsembleMatrix;
use crate::levinson;
use crate::maxent::PExponent;
use crate::processes::{ArInit, ProcessSpec, TrajectoryEnsemble};
use crate::spectral::AutocovarianceSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PredictorSpec {
    Zero,
    Constant {
        value: f64,
    },
    /// `x̂_k = Σ coeffs[i-1] x_{k-i}`. While fewer than `coeffs.len()` past
    /// values exist, step `k` uses `warmup[k]` when present and the
    /// truncated coefficients otherwise.
    Linear {
        coeffs: Vec<f64>,
        #[serde(default)]
        warmup: Vec<Vec<f64>>,
    },
    /// Resolved through [`oracle_predictor`] when applied.
    Oracle {
        process: ProcessSpec,
        p: PExponent,
    },
}

impl PredictorSpec {
    pub fn linear(coeffs: Vec<f64>) -> Self {
        PredictorSpec::Linear { coeffs, warmup: Vec::new() }
    }

    /// Number of initial steps that see less history than the predictor uses.
    pub fn order(&self) -> usize {
        match self {
            PredictorSpec::Linear { coeffs, .. } => coeffs.len(),
            _ => 0,
        }
    }
}

/// Where [`fit_linear_predictor`] takes its autocovariances from.
#[derive(Debug, Clone, Copy)]
pub enum AutocovSource<'a> {
    Autocovariance(&'a AutocovarianceSequence),
    /// Pooled sample autocovariance of a zero-mean ensemble.
    Ensemble(&'a TrajectoryEnsemble),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub predictor: PredictorSpec,
    /// Innovation variance implied by the Levinson recursion.
    pub innovation_variance: f64,
    pub reflection: Vec<f64>,
}

/// Pooled autocovariance `R(l)` of all rows, assuming zero mean. Each lag is
/// averaged over the pairs available to it, so short rows do not shrink the
/// estimate towards zero.
pub fn ensemble_autocovariance(ens: &TrajectoryEnsemble, max_lag: usize) -> Result<Vec<f64>> {
    let width = ens.steps() + 1;
    if max_lag >= width {
        return Err(Error::invalid(format!(
            "lag {max_lag} needs more than {width} time steps"
        )));
    }
    let mut r = vec![0.0; max_lag + 1];
    let mut counts = vec![0usize; max_lag + 1];
    for i in 0..ens.realizations() {
        let row = ens.state_row(i);
        for (lag, (acc, count)) in r.iter_mut().zip(counts.iter_mut()).enumerate() {
            *acc += row[lag..].iter().zip(row).map(|(a, b)| a * b).sum::<f64>();
            *count += width - lag;
        }
    }
    Ok(r.into_iter().zip(counts).map(|(v, c)| v / c as f64).collect())
}

/// Minimum-MSE linear one-step predictor of the given order, by
/// Levinson-Durbin on the Yule-Walker equations. Order 0 gives the zero
/// predictor.
pub fn fit_linear_predictor(source: AutocovSource<'_>, order: usize) -> Result<LinearFit> {
    let r = match source {
        AutocovSource::Autocovariance(acov) => {
            if acov.max_lag() < order {
                return Err(Error::invalid(format!(
                    "order {order} needs {} autocovariance lags",
                    order + 1
                )));
            }
            acov.lags()[..=order].to_vec()
        }
        AutocovSource::Ensemble(ens) => ensemble_autocovariance(ens, order)?,
    };
    let sol = levinson::levinson_durbin(&r, order)?;
    let predictor = if order == 0 {
        PredictorSpec::Zero
    } else {
        PredictorSpec::Linear {
            coeffs: sol.final_coeffs().to_vec(),
            warmup: sol.coeffs[..order].to_vec(),
        }
    };
    Ok(LinearFit { predictor, innovation_variance: sol.final_error(), reflection: sol.reflection })
}

/// The predictor that meets the equality conditions of the L_p bound for a
/// supported process. Every supported family has symmetric unimodal
/// conditionals, so the conditional mean, median and midrange coincide and
/// the same predictor is returned for every `p`.
pub fn oracle_predictor(spec: &ProcessSpec, _p: PExponent) -> Result<PredictorSpec> {
    spec.validate()?;
    match spec {
        // zero-mean symmetric i.i.d.: nothing to predict
        ProcessSpec::Iid { .. } => Ok(PredictorSpec::Constant { value: 0.0 }),
        ProcessSpec::GaussianAr { coeffs, sigma, init } => {
            let order = coeffs.len();
            if order == 0 {
                return Ok(PredictorSpec::Constant { value: 0.0 });
            }
            let warmup = match init {
                ArInit::Stationary => {
                    let r = levinson::ar_autocovariance(coeffs, *sigma, order)?;
                    levinson::levinson_durbin(&r, order)?.coeffs[..order].to_vec()
                }
                // pre-sample values are zero, so the truncated recursion is exact
                ArInit::Deterministic(_) => Vec::new(),
            };
            Ok(PredictorSpec::Linear { coeffs: coeffs.clone(), warmup })
        }
    }
}

/// Prediction errors `e_k = x_k - x̂_k` for every realization and every
/// `k = 0..=K`. The first `warmup` columns come from predictors that saw a
/// shortened history and are excluded from steady-state statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationEnsemble {
    errors: EnsembleMatrix,
    warmup: usize,
    predictor: PredictorSpec,
}

impl InnovationEnsemble {
    pub fn errors(&self) -> &EnsembleMatrix {
        &self.errors
    }

    pub fn warmup(&self) -> usize {
        self.warmup
    }

    pub fn predictor(&self) -> &PredictorSpec {
        &self.predictor
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.errors.column(k)
    }

    /// All errors at steps `k >= warmup`, row by row.
    pub fn steady_state_values(&self) -> Vec<f64> {
        (0..self.errors.rows())
            .flat_map(|i| self.errors.row(i)[self.warmup..].to_vec())
            .collect()
    }
}

pub fn apply_predictor(pred: &PredictorSpec, ens: &TrajectoryEnsemble) -> Result<InnovationEnsemble> {
    if ens.realizations() == 0 {
        return Err(Error::EmptyInput);
    }
    let resolved = match pred {
        PredictorSpec::Oracle { process, p } => oracle_predictor(process, *p)?,
        other => other.clone(),
    };
    let width = ens.steps() + 1;
    let mut data = Vec::with_capacity(ens.realizations() * width);
    for i in 0..ens.realizations() {
        let x = ens.state_row(i);
        match &resolved {
            PredictorSpec::Zero => data.extend_from_slice(x),
            PredictorSpec::Constant { value } => data.extend(x.iter().map(|v| v - value)),
            PredictorSpec::Linear { coeffs, warmup } => {
                for k in 0..width {
                    let a: &[f64] = if k >= coeffs.len() {
                        coeffs
                    } else {
                        warmup.get(k).map_or(&coeffs[..k], |w| w.as_slice())
                    };
                    let prediction: f64 = a.iter().enumerate().map(|(j, c)| c * x[k - 1 - j]).sum();
                    data.push(x[k] - prediction);
                }
            }
            PredictorSpec::Oracle { .. } => unreachable!("oracle resolved above"),
        }
    }
    Ok(InnovationEnsemble {
        errors: EnsembleMatrix::new(ens.realizations(), width, data)?,
        warmup: resolved.order().min(width),
        predictor: resolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::lag_correlations;
    use crate::maxent::MaxEntDensity;
    use crate::processes::simulate_process;
    use approx::assert_relative_eq;

    #[test]
    fn levinson_fit_on_analytic_ar1() {
        let acov = AutocovarianceSequence::for_ar(&[0.9], 1.0, 4).unwrap();
        let fit = fit_linear_predictor(AutocovSource::Autocovariance(&acov), 1).unwrap();
        match &fit.predictor {
            PredictorSpec::Linear { coeffs, .. } => assert_relative_eq!(coeffs[0], 0.9, epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert_relative_eq!(fit.innovation_variance, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn white_noise_fit_is_flat() {
        let spec = ProcessSpec::iid(MaxEntDensity::gaussian(1.0).unwrap());
        let ens = simulate_process(&spec, 2000, 20, 3).unwrap();
        let fit = fit_linear_predictor(AutocovSource::Ensemble(&ens), 3).unwrap();
        match &fit.predictor {
            PredictorSpec::Linear { coeffs, .. } => {
                assert!(coeffs.iter().all(|c| c.abs() < 0.02), "{coeffs:?}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn order_zero_is_zero_predictor() {
        let acov = AutocovarianceSequence::for_ar(&[0.5], 1.0, 2).unwrap();
        let fit = fit_linear_predictor(AutocovSource::Autocovariance(&acov), 0).unwrap();
        assert_eq!(fit.predictor, PredictorSpec::Zero);
        assert_relative_eq!(fit.innovation_variance, 1.0 / 0.75, epsilon = 1e-12);
    }

    #[test]
    fn singular_toeplitz() {
        let acov = AutocovarianceSequence::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            fit_linear_predictor(AutocovSource::Autocovariance(&acov), 2),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn zero_and_constant_zero_agree() {
        let ens = simulate_process(&ProcessSpec::gaussian_ar(vec![0.9], 1.0), 30, 8, 1).unwrap();
        let z = apply_predictor(&PredictorSpec::Zero, &ens).unwrap();
        let c = apply_predictor(&PredictorSpec::Constant { value: 0.0 }, &ens).unwrap();
        assert_eq!(z.errors(), c.errors());
        assert_eq!(z.errors().data(), ens.states());
    }

    #[test]
    fn oracle_examples() {
        let iid = ProcessSpec::iid(MaxEntDensity::laplace(1.0).unwrap());
        assert_eq!(
            oracle_predictor(&iid, PExponent::Finite(1.0)).unwrap(),
            PredictorSpec::Constant { value: 0.0 }
        );
        let uni = ProcessSpec::iid(MaxEntDensity::uniform(1.0).unwrap());
        assert_eq!(
            oracle_predictor(&uni, PExponent::Infinity).unwrap(),
            PredictorSpec::Constant { value: 0.0 }
        );
        let ar = ProcessSpec::gaussian_ar(vec![0.9], 1.0);
        match oracle_predictor(&ar, PExponent::Finite(2.0)).unwrap() {
            PredictorSpec::Linear { coeffs, .. } => assert_eq!(coeffs, vec![0.9]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(oracle_predictor(&ProcessSpec::gaussian_ar(vec![1.5], 1.0), PExponent::Finite(2.0)).is_err());
    }

    #[test]
    fn oracle_innovations_on_ar1() {
        let spec = ProcessSpec::gaussian_ar(vec![0.9], 1.0);
        let ens = simulate_process(&spec, 10_000, 10, 2).unwrap();
        let inn = apply_predictor(&PredictorSpec::Oracle { process: spec, p: PExponent::Finite(2.0) }, &ens).unwrap();
        assert_eq!(inn.warmup(), 1);
        let v = inn.steady_state_values();
        let rmse = (v.iter().map(|e| e * e).sum::<f64>() / v.len() as f64).sqrt();
        assert!((rmse - 1.0).abs() < 0.02, "{rmse}");
        let lags = lag_correlations(inn.errors(), inn.warmup(), 5);
        assert!(lags.iter().all(|c| c.abs() < 0.02), "{lags:?}");
        // innovations coincide with the driving noise
        let w = ens.noise_column(4).unwrap();
        assert_relative_eq!(inn.column(5)[17], w[17], epsilon = 1e-12);
    }

    #[test]
    fn zero_predictor_fails_whiteness() {
        let ens = simulate_process(&ProcessSpec::gaussian_ar(vec![0.9], 1.0), 10_000, 10, 3).unwrap();
        let inn = apply_predictor(&PredictorSpec::Zero, &ens).unwrap();
        let lag1 = lag_correlations(inn.errors(), 0, 1)[0];
        assert!((lag1 - 0.9).abs() < 0.02, "{lag1}");
    }

    #[test]
    fn stationary_ar2_warmup_is_optimal() {
        // With Levinson prefixes every step's error variance matches the
        // order-m prediction error of the exact autocovariance.
        let coeffs = vec![0.6, -0.3];
        let spec = ProcessSpec::gaussian_ar(coeffs.clone(), 1.0);
        let ens = simulate_process(&spec, 40_000, 4, 6).unwrap();
        let inn = apply_predictor(&oracle_predictor(&spec, PExponent::Finite(2.0)).unwrap(), &ens).unwrap();
        let r = levinson::ar_autocovariance(&coeffs, 1.0, 2).unwrap();
        let sol = levinson::levinson_durbin(&r, 2).unwrap();
        for k in 0..=2 {
            let col = inn.column(k);
            let var = col.iter().map(|e| e * e).sum::<f64>() / col.len() as f64;
            assert!((var / sol.errors[k] - 1.0).abs() < 0.03, "k={k}: {var} vs {}", sol.errors[k]);
        }
    }

    #[test]
    fn fitted_predictor_recovers_ar1() {
        let ens = simulate_process(&ProcessSpec::gaussian_ar(vec![0.9], 1.0), 5_000, 40, 4).unwrap();
        let fit = fit_linear_predictor(AutocovSource::Ensemble(&ens), 1).unwrap();
        match fit.predictor {
            PredictorSpec::Linear { coeffs, .. } => assert!((coeffs[0] - 0.9).abs() < 0.01),
            other => panic!("unexpected {other:?}"),
        }
        assert!((fit.innovation_variance - 1.0).abs() < 0.05);
    }
}
