//! Empirical norms and nonparametric information estimators.
//!
//! Entropies use the Kozachenko-Leonenko nearest-neighbour estimator and
//! mutual information uses the KSG estimator (algorithm 1), both under the
//! max-coordinate (Chebyshev) metric with `k = 4` neighbours by default. All
//! reported values are in bits.

mod gof;
mod info;
mod kdtree;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxent::PExponent;
use crate::numeric::{mean, pairwise_sum};
use crate::rng;

pub use gof::{lag_correlations, maxent_gof, GofStatistic};
pub use info::{
    conditional_entropy, knn_entropy, knn_entropy_with, mutual_information, KnnOptions,
    DEFAULT_K_NEIGHBORS,
};

/// A non-empty set of finite scalar samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(SampleSet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Rows are independent realizations, columns are coordinates (time indices
/// or variables). Stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl EnsembleMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput);
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix data has {} values, expected {rows} x {cols}",
                data.len()
            )));
        }
        Ok(EnsembleMatrix { rows, cols, data })
    }

    /// Builds a matrix from equally long columns.
    pub fn from_columns(columns: &[&[f64]]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::invalid("columns differ in length"));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            data.extend(columns.iter().map(|c| c[i]));
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Sub-matrix made of the given columns, in the given order.
    pub fn select(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::invalid(format!("column {bad} out of range (cols = {})", self.cols)));
        }
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&c| row[c]));
        }
        Self::new(self.rows, cols.len(), data)
    }

    /// Columns of `self` followed by the columns of `other`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::invalid(format!(
                "row counts differ: {} vs {}",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Self::new(self.rows, cols, data)
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        EnsembleMatrix { data: self.data.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    /// Adds `c` to every entry.
    pub fn shifted(&self, c: f64) -> Self {
        EnsembleMatrix { data: self.data.iter().map(|v| v + c).collect(), ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorMethod {
    KozachenkoLeonenko,
    KlDifference,
    Ksg,
    /// Mutual information with an empty block, which is zero by definition.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoEstimate {
    /// Bits.
    pub value: f64,
    pub n_used: usize,
    pub k_neighbors: usize,
    pub method: EstimatorMethod,
}

/// Empirical L_p norm. For `p = ∞` this is the sample maximum of `|x|`,
/// which underestimates the essential supremum.
pub fn empirical_lp_norm(s: &SampleSet, p: PExponent) -> f64 {
    empirical_lp_norm_with(s, p, 1.0)
}

/// Like [`empirical_lp_norm`], with the `p = ∞` case taken as the
/// `esssup_quantile` quantile of `|x|` (1.0 = maximum).
pub fn empirical_lp_norm_with(s: &SampleSet, p: PExponent, esssup_quantile: f64) -> f64 {
    lp_norm_of(s.values(), p, esssup_quantile)
}

pub(crate) fn lp_norm_of(values: &[f64], p: PExponent, esssup_quantile: f64) -> f64 {
    match p {
        PExponent::Finite(1.0) => {
            mean(&values.iter().map(|x| x.abs()).collect::<Vec<_>>())
        }
        PExponent::Finite(2.0) => {
            mean(&values.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt()
        }
        PExponent::Finite(p) => {
            mean(&values.iter().map(|x| x.abs().powf(p)).collect::<Vec<_>>()).powf(1.0 / p)
        }
        PExponent::Infinity => {
            if esssup_quantile >= 1.0 {
                values.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
            } else {
                let mut abs: Vec<f64> = values.iter().map(|x| x.abs()).collect();
                abs.sort_by(f64::total_cmp);
                let q = esssup_quantile.max(0.0);
                let idx = ((q * abs.len() as f64).ceil() as usize).clamp(1, abs.len()) - 1;
                abs[idx]
            }
        }
    }
}

/// Bootstrap standard error of the empirical L_p norm. Resample `b` draws
/// from stream `(seed, b)`, so the result does not depend on thread count.
pub fn bootstrap_lp_se(s: &SampleSet, p: PExponent, resamples: usize, seed: u64) -> f64 {
    let values = s.values();
    let n = values.len();
    if resamples < 2 || n < 2 {
        return 0.0;
    }
    let stats: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng::stream(seed, b as u64);
            let draw: Vec<f64> = (0..n).map(|_| values[rng.random_range(0..n)]).collect();
            lp_norm_of(&draw, p, 1.0)
        })
        .collect();
    let m = mean(&stats);
    let ss = pairwise_sum(&stats.iter().map(|v| (v - m) * (v - m)).collect::<Vec<_>>());
    (ss / (resamples - 1) as f64).sqrt()
}

/// Delta-method standard error of the empirical L_p norm (finite `p` only):
/// `se(m^{1/p}) = m^{1/p - 1} se(m) / p` with `m` the mean of `|x|^p`.
pub fn delta_lp_se(s: &SampleSet, p: PExponent) -> Option<f64> {
    let p = p.value()?;
    let n = s.len();
    if n < 2 {
        return Some(0.0);
    }
    let powers: Vec<f64> = s.values().iter().map(|x| x.abs().powf(p)).collect();
    let m = mean(&powers);
    let var = pairwise_sum(&powers.iter().map(|v| (v - m) * (v - m)).collect::<Vec<_>>())
        / (n - 1) as f64;
    let se_m = (var / n as f64).sqrt();
    Some(m.powf(1.0 / p - 1.0) * se_m / p)
}
