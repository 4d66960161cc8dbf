//! Levinson-Durbin recursion for symmetric Toeplitz systems, and its
//! inverse (step-down) for stability checks.
//!
//! Sign convention: an order-`m` predictor is `x̂_k = Σ_{i=1}^m a_i x_{k-i}`,
//! matching the AR recursion `x_k = Σ a_i x_{k-i} + w_k`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LevinsonSolution {
    /// `coeffs[m]` holds the order-`m` predictor (`coeffs[0]` is empty).
    pub coeffs: Vec<Vec<f64>>,
    /// `errors[m]` is the order-`m` one-step prediction error variance.
    pub errors: Vec<f64>,
    /// Reflection (partial correlation) coefficients `k_1..k_order`.
    pub reflection: Vec<f64>,
}

impl LevinsonSolution {
    pub fn order(&self) -> usize {
        self.reflection.len()
    }

    pub fn final_coeffs(&self) -> &[f64] {
        &self.coeffs[self.order()]
    }

    pub fn final_error(&self) -> f64 {
        self.errors[self.order()]
    }
}

/// Solves the Yule-Walker equations for orders `0..=order` given
/// autocovariances `r[0..=order]`.
pub fn levinson_durbin(r: &[f64], order: usize) -> Result<LevinsonSolution> {
    if r.len() <= order {
        return Err(Error::invalid(format!(
            "need {} autocovariance lags for order {order}, got {}",
            order + 1,
            r.len()
        )));
    }
    if !(r[0] > 0.0 && r[0].is_finite()) {
        return Err(Error::Singular { order: 0 });
    }
    let mut coeffs = vec![Vec::new()];
    let mut errors = vec![r[0]];
    let mut reflection = Vec::with_capacity(order);
    let mut a: Vec<f64> = Vec::with_capacity(order);
    for m in 1..=order {
        let e_prev = errors[m - 1];
        if e_prev <= r[0] * 1e-12 {
            return Err(Error::Singular { order: m });
        }
        let acc: f64 = r[m] - a.iter().enumerate().map(|(i, ai)| ai * r[m - 1 - i]).sum::<f64>();
        let k = acc / e_prev;
        if k.is_nan() || k.abs() >= 1.0 {
            return Err(Error::Singular { order: m });
        }
        let prev = a.clone();
        for i in 0..m - 1 {
            a[i] = prev[i] - k * prev[m - 2 - i];
        }
        a.push(k);
        reflection.push(k);
        errors.push(e_prev * (1.0 - k * k));
        coeffs.push(a.clone());
    }
    Ok(LevinsonSolution { coeffs, errors, reflection })
}

/// Reflection coefficients of an AR polynomial, highest order first undone.
/// Fails with [`Error::Unstable`] when some `|k_m| >= 1`, i.e. when a root of
/// `1 - Σ a_i z^{-i}` lies on or outside the unit circle.
pub fn step_down(ar_coeffs: &[f64]) -> Result<Vec<f64>> {
    let mut a = ar_coeffs.to_vec();
    let mut reflection = vec![0.0; a.len()];
    for m in (1..=a.len()).rev() {
        let k = a[m - 1];
        if k.is_nan() || k.abs() >= 1.0 {
            return Err(Error::Unstable(format!(
                "reflection coefficient {m} has magnitude {:.6} >= 1",
                k.abs()
            )));
        }
        reflection[m - 1] = k;
        let denom = 1.0 - k * k;
        let prev = a.clone();
        for i in 0..m - 1 {
            a[i] = (prev[i] + k * prev[m - 2 - i]) / denom;
        }
        a.truncate(m - 1);
    }
    Ok(reflection)
}

/// Exact autocovariance `R(0..=max_lag)` of the stationary AR process
/// `x_k = Σ a_i x_{k-i} + w_k`, `w_k ~ (0, sigma²)` white.
pub fn ar_autocovariance(ar_coeffs: &[f64], sigma: f64, max_lag: usize) -> Result<Vec<f64>> {
    let reflection = step_down(ar_coeffs)?;
    let order = ar_coeffs.len();
    // step-up: rebuild lower-order predictors and their error variances
    let mut preds: Vec<Vec<f64>> = vec![Vec::new()];
    for m in 1..=order {
        let k = reflection[m - 1];
        let prev = &preds[m - 1];
        let mut a: Vec<f64> = (0..m - 1).map(|i| prev[i] - k * prev[m - 2 - i]).collect();
        a.push(k);
        preds.push(a);
    }
    let mut e = sigma * sigma;
    for &k in reflection.iter().rev() {
        e /= 1.0 - k * k;
    }
    let mut r = vec![e];
    for m in 1..=max_lag {
        // order-m Yule-Walker equation at lag m; past the model order the
        // full AR recursion applies
        let a = &preds[m.min(order)];
        let v = a.iter().enumerate().map(|(i, ai)| ai * r[m - 1 - i]).sum();
        r.push(v);
    }
    Ok(r)
}
