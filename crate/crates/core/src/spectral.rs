//! Power spectra of stationary models and the Szegő entropy-rate integral.
//!
//! For a stationary Gaussian process with spectrum `S(ω)` the entropy rate is
//! `(1/2π) ∫ log2 sqrt(2πe S(ω)) dω`; a non-Gaussian process with the same
//! spectrum has a lower entropy rate, short by its negentropy rate `J ≥ 0`.
//! `J` is implemented here for i.i.d. processes only, where it is the
//! negentropy of the marginal.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levinson;
use crate::maxent::MaxEntDensity;
use crate::numeric::pairwise_sum;

pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Spectral values below this are treated as zeros of the spectrum.
pub const SPECTRAL_FLOOR: f64 = 1e-12;

/// A power spectrum sampled on `M` uniformly spaced frequencies
/// `ω_m = 2π (m - M/2) / M`, covering `[-π, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    values: Vec<f64>,
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 2 || !grid_size.is_multiple_of(2) {
        return Err(Error::invalid(format!("grid size must be even and >= 2, got {grid_size}")));
    }
    Ok(())
}

impl SpectralDensity {
    pub fn frequency(grid_size: usize, m: usize) -> f64 {
        2.0 * PI * (m as f64 - (grid_size / 2) as f64) / grid_size as f64
    }

    /// Samples `f` on the grid.
    pub fn from_fn(grid_size: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(grid_size)?;
        Self::from_values((0..grid_size).map(|m| f(Self::frequency(grid_size, m))).collect())
    }

    /// Checks non-negativity and even symmetry `S(ω) = S(-ω)`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        check_grid(m)?;
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(format!("spectral value {i} is negative or not finite")));
        }
        for i in 1..m / 2 {
            let (a, b) = (values[i], values[m - i]);
            if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::invalid(format!("spectrum is not even at grid index {i}")));
            }
        }
        Ok(SpectralDensity { values })
    }

    /// White noise of the given variance.
    pub fn flat(variance: f64, grid_size: usize) -> Result<Self> {
        Self::from_fn(grid_size, |_| variance)
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `ω = 0`.
    pub fn at_zero(&self) -> f64 {
        self.values[self.values.len() / 2]
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_values(self.values.iter().map(|v| v * c).collect())
    }

    /// `R(k) = (1/2π) ∫ S(ω) cos(ωk) dω` for `k = 0..=max_lag`.
    pub fn autocovariance(&self, max_lag: usize) -> AutocovarianceSequence {
        let m = self.grid_size();
        let lags = (0..=max_lag)
            .map(|k| {
                let terms: Vec<f64> = self
                    .values
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s * (Self::frequency(m, i) * k as f64).cos())
                    .collect();
                pairwise_sum(&terms) / m as f64
            })
            .collect();
        AutocovarianceSequence { lags }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocovarianceSequence {
    lags: Vec<f64>,
}

impl AutocovarianceSequence {
    /// Requires `R(0) > 0` and `R(0) >= |R(k)|`.
    pub fn new(lags: Vec<f64>) -> Result<Self> {
        let r0 = *lags.first().ok_or(Error::EmptyInput)?;
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::invalid("R(0) must be positive"));
        }
        if let Some(k) = lags.iter().position(|r| !r.is_finite() || r.abs() > r0 * (1.0 + 1e-12)) {
            return Err(Error::invalid(format!("|R({k})| exceeds R(0)")));
        }
        Ok(AutocovarianceSequence { lags })
    }

    /// Exact autocovariance of a stationary Gaussian AR model.
    pub fn for_ar(coeffs: &[f64], sigma: f64, max_lag: usize) -> Result<Self> {
        Self::new(levinson::ar_autocovariance(coeffs, sigma, max_lag)?)
    }

    pub fn lags(&self) -> &[f64] {
        &self.lags
    }

    pub fn max_lag(&self) -> usize {
        self.lags.len() - 1
    }
}

/// Spectrum `σ² / |1 - Σ a_i e^{-jωi}|²` of the AR model
/// `x_k = Σ a_i x_{k-i} + w_k`. Its autocovariance is available through
/// [`SpectralDensity::autocovariance`] (inverse transform on the grid) or
/// exactly through [`AutocovarianceSequence::for_ar`].
pub fn ar_spectrum(ar_coeffs: &[f64], noise_sigma: f64, grid_size: usize) -> Result<SpectralDensity> {
    if !(noise_sigma > 0.0 && noise_sigma.is_finite()) {
        return Err(Error::invalid(format!("noise sigma must be positive, got {noise_sigma}")));
    }
    levinson::step_down(ar_coeffs)?;
    let var = noise_sigma * noise_sigma;
    SpectralDensity::from_fn(grid_size, |w| {
        let (mut re, mut im) = (1.0, 0.0);
        for (i, a) in ar_coeffs.iter().enumerate() {
            let phase = w * (i + 1) as f64;
            re -= a * phase.cos();
            im += a * phase.sin();
        }
        var / (re * re + im * im)
    })
}

/// `(1/2π) ∫ log2 sqrt(2πe S(ω)) dω` by the trapezoid rule on the periodic
/// grid, in bits.
pub fn szego_entropy_rate(s: &SpectralDensity) -> Result<f64> {
    if let Some(index) = s.values().iter().position(|&v| v < SPECTRAL_FLOOR) {
        return Err(Error::SpectralSingularity { index, floor: SPECTRAL_FLOOR });
    }
    let logs: Vec<f64> = s.values().iter().map(|v| v.log2()).collect();
    let mean_log = pairwise_sum(&logs) / logs.len() as f64;
    Ok(0.5 * (2.0 * PI * E).log2() + 0.5 * mean_log)
}

/// Marginal law of an i.i.d. process, as needed for its negentropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Marginal {
    Gaussian { variance: f64 },
    MaxEnt { density: MaxEntDensity },
    /// A family with no closed-form entropy here.
    Other { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegentropyFamily {
    Gaussian,
    IidFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegentropyRate {
    /// Bits, never negative.
    pub value: f64,
    pub family: NegentropyFamily,
}

impl NegentropyRate {
    pub fn gaussian() -> Self {
        NegentropyRate { value: 0.0, family: NegentropyFamily::Gaussian }
    }
}

/// Negentropy rate of an i.i.d. process: `½ log2(2πe var) - h(marginal)`.
pub fn negentropy_rate_iid(marginal: &Marginal) -> Result<NegentropyRate> {
    match marginal {
        Marginal::Gaussian { variance } => {
            if !(*variance > 0.0 && variance.is_finite()) {
                return Err(Error::invalid("marginal variance must be positive"));
            }
            Ok(NegentropyRate::gaussian())
        }
        Marginal::MaxEnt { density } if density.is_gaussian() => Ok(NegentropyRate::gaussian()),
        Marginal::MaxEnt { density } => {
            let gaussian_h = 0.5 * (2.0 * PI * E * density.variance()).log2();
            Ok(NegentropyRate {
                value: (gaussian_h - density.entropy_bits()).max(0.0),
                family: NegentropyFamily::IidFamily,
            })
        }
        Marginal::Other { name } => {
            Err(Error::Unsupported(format!("no closed-form entropy for marginal family `{name}`")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent check of `(1/2π) ∫ f` by composite Simpson on `[-π, π]`.
    fn simpson_mean(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        let h = 2.0 * PI / n as f64;
        let mut acc = f(-PI) + f(PI);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(-PI + i as f64 * h);
        }
        acc * h / 3.0 / (2.0 * PI)
    }

    #[test]
    fn white_noise_spectrum() {
        let s = ar_spectrum(&[], 1.0, 64).unwrap();
        assert!(s.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn ar1_peak_at_zero() {
        let s = ar_spectrum(&[0.9], 1.0, DEFAULT_GRID_SIZE).unwrap();
        assert_relative_eq!(s.at_zero(), 100.0, max_relative = 1e-12);
    }

    #[test]
    fn spectra_are_even() {
        let s = ar_spectrum(&[0.5, -0.3, 0.1], 2.0, 512).unwrap();
        let m = s.grid_size();
        for i in 1..m / 2 {
            assert_eq!(s.values()[i], s.values()[m - i]);
        }
    }

    #[test]
    fn unstable_rejected() {
        assert!(matches!(ar_spectrum(&[1.1], 1.0, 64), Err(Error::Unstable(_))));
        assert!(ar_spectrum(&[0.5], 0.0, 64).is_err());
        assert!(ar_spectrum(&[0.5], 1.0, 63).is_err());
    }

    #[test]
    fn szego_examples() {
        let half_log_2pie = 0.5 * (2.0 * PI * E).log2();
        let flat = SpectralDensity::flat(1.0, DEFAULT_GRID_SIZE).unwrap();
        let oracle = simpson_mean(|_| 0.5 * (2.0 * PI * E).log2(), 1000);
        assert_relative_eq!(szego_entropy_rate(&flat).unwrap(), oracle, epsilon = 1e-12);
        assert!((szego_entropy_rate(&flat).unwrap() - 2.0471).abs() < 1e-4);

        // ∫ log|1 - a e^{-jω}|² dω = 0 for |a| < 1, checked by fine Simpson quadrature.
        let a = 0.9;
        let integral = simpson_mean(|w| (1.0 - 2.0 * a * w.cos() + a * a).ln(), 200_000);
        assert!(integral.abs() < 1e-9, "oracle integral {integral}");
        let ar = ar_spectrum(&[a], 1.0, DEFAULT_GRID_SIZE).unwrap();
        let h = szego_entropy_rate(&ar).unwrap();
        assert!((h - half_log_2pie).abs() < 1e-3);

        let scaled = szego_entropy_rate(&ar.scaled(4.0).unwrap()).unwrap();
        assert_relative_eq!(scaled - h, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn szego_grid_convergence() {
        for &a in &[0.5, 0.9, -0.8] {
            let coarse = szego_entropy_rate(&ar_spectrum(&[a], 1.0, 1 << 12).unwrap()).unwrap();
            let fine = szego_entropy_rate(&ar_spectrum(&[a], 1.0, 1 << 13).unwrap()).unwrap();
            assert!((coarse - fine).abs() < 1e-4);
        }
    }

    #[test]
    fn szego_vs_white_equivalent() {
        // An AR(1) and white noise of equal variance differ by -½log2(1-a²).
        let a: f64 = 0.9;
        let ar = szego_entropy_rate(&ar_spectrum(&[a], 1.0, DEFAULT_GRID_SIZE).unwrap()).unwrap();
        let var = 1.0 / (1.0 - a * a);
        let white = szego_entropy_rate(&SpectralDensity::flat(var, DEFAULT_GRID_SIZE).unwrap()).unwrap();
        assert_relative_eq!(white - ar, -0.5 * (1.0 - a * a).log2(), epsilon = 1e-9);
    }

    #[test]
    fn singular_spectrum() {
        let mut v = vec![1.0; 16];
        v[8] = 0.0;
        let s = SpectralDensity::from_values(v).unwrap();
        assert!(matches!(szego_entropy_rate(&s), Err(Error::SpectralSingularity { index: 8, .. })));
    }

    #[test]
    fn autocovariance_from_spectrum() {
        let s = ar_spectrum(&[0.9], 1.0, DEFAULT_GRID_SIZE).unwrap();
        let r = s.autocovariance(5);
        let exact = AutocovarianceSequence::for_ar(&[0.9], 1.0, 5).unwrap();
        for (a, b) in r.lags().iter().zip(exact.lags()) {
            assert_relative_eq!(*a, *b, max_relative = 1e-9);
        }
        assert_relative_eq!(exact.lags()[0], 1.0 / 0.19, max_relative = 1e-12);
        assert!(AutocovarianceSequence::new(vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn negentropy_examples() {
        let g = negentropy_rate_iid(&Marginal::Gaussian { variance: 3.0 }).unwrap();
        assert_eq!(g.value, 0.0);
        assert_eq!(g.family, NegentropyFamily::Gaussian);

        let laplace = MaxEntDensity::laplace(1.0).unwrap();
        let j = negentropy_rate_iid(&Marginal::MaxEnt { density: laplace }).unwrap();
        let oracle = 0.5 * (4.0 * PI * E).log2() - (2.0 * E).log2();
        assert_relative_eq!(j.value, oracle, epsilon = 1e-12);
        assert!((j.value - 0.104).abs() < 1e-3);

        let uniform = MaxEntDensity::uniform(1.0).unwrap();
        let j = negentropy_rate_iid(&Marginal::MaxEnt { density: uniform }).unwrap();
        assert_relative_eq!(j.value, 0.5 * (2.0 * PI * E / 3.0).log2() - 1.0, epsilon = 1e-12);
        assert!((j.value - 0.255).abs() < 1e-3);

        let other = Marginal::Other { name: "cauchy".into() };
        assert!(matches!(negentropy_rate_iid(&other), Err(Error::Unsupported(_))));
    }

    #[test]
    fn negentropy_nonnegative_across_family() {
        for &p in &[1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 32.0] {
            let d = MaxEntDensity::new(crate::maxent::PExponent::Finite(p), 2.5).unwrap();
            let j = negentropy_rate_iid(&Marginal::MaxEnt { density: d }).unwrap();
            assert!(j.value >= 0.0);
        }
    }
}
