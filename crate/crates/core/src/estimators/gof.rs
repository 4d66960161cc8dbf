use serde::{Deserialize, Serialize};

use super::{EnsembleMatrix, SampleSet};
use crate::error::{Error, Result};
use crate::maxent::MaxEntDensity;
use crate::numeric::pairwise_sum;

pub const MIN_GOF_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofStatistic {
    pub ks_distance: f64,
    pub n: usize,
}

/// Two-sided Kolmogorov-Smirnov distance between the sample's empirical CDF
/// and the CDF of `d`.
pub fn maxent_gof(s: &SampleSet, d: &MaxEntDensity) -> Result<GofStatistic> {
    let n = s.len();
    if n < MIN_GOF_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_GOF_SAMPLES, got: n });
    }
    let mut xs = s.values().to_vec();
    xs.sort_by(f64::total_cmp);
    let nf = n as f64;
    let ks = xs.iter().enumerate().fold(0.0_f64, |m, (i, &x)| {
        let f = d.cdf(x);
        m.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f)
    });
    Ok(GofStatistic { ks_distance: ks, n })
}

/// Pooled lag correlations of an `N x T` error matrix for lags `1..=max_lag`,
/// using columns `start..T`. Lags with no available pairs are omitted.
pub fn lag_correlations(m: &EnsembleMatrix, start: usize, max_lag: usize) -> Vec<f64> {
    let t = m.cols();
    if start >= t {
        return Vec::new();
    }
    let used: Vec<f64> = (0..m.rows()).flat_map(|i| m.row(i)[start..].to_vec()).collect();
    let mean = pairwise_sum(&used) / used.len() as f64;
    let var = pairwise_sum(&used.iter().map(|v| (v - mean) * (v - mean)).collect::<Vec<_>>())
        / used.len() as f64;
    (1..=max_lag)
        .take_while(|&lag| start + lag < t)
        .map(|lag| {
            let products: Vec<f64> = (0..m.rows())
                .flat_map(|i| {
                    let row = m.row(i);
                    (start..t - lag).map(move |j| (row[j] - mean) * (row[j + lag] - mean))
                })
                .collect();
            pairwise_sum(&products) / products.len() as f64 / var
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxent::PExponent;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn ks_separates_families() {
        let gauss = MaxEntDensity::gaussian(1.0).unwrap();
        let laplace = MaxEntDensity::laplace(1.0).unwrap();
        let s = gauss.sample(10_000, 4).unwrap();
        assert!(maxent_gof(&s, &gauss).unwrap().ks_distance < 0.02);
        // Population sup-distance between N(0,1) and Laplace(scale 1), from
        // statrs' normal CDF and the closed-form Laplace CDF on a fine grid.
        let normal = Normal::new(0.0, 1.0).unwrap();
        let laplace_cdf = |x: f64| if x < 0.0 { 0.5 * x.exp() } else { 1.0 - 0.5 * (-x).exp() };
        let population = (0..=200_000)
            .map(|i| -10.0 + i as f64 * 1e-4)
            .fold(0.0_f64, |m, x| m.max((normal.cdf(x) - laplace_cdf(x)).abs()));
        assert!((population - 0.0468).abs() < 1e-3, "{population}");
        let ks = maxent_gof(&s, &laplace).unwrap().ks_distance;
        assert!((ks - population).abs() < 0.015, "{ks}");
        assert!(ks > 0.03);
    }

    #[test]
    fn ks_null_behaviour_by_simulation() {
        // Under the null, sqrt(n) D stays below ~1.63 in 99% of draws.
        let d = MaxEntDensity::new(PExponent::Finite(4.0), 2.0).unwrap();
        let mut exceed = 0;
        for seed in 0..40 {
            let s = d.sample(2000, seed).unwrap();
            let stat = maxent_gof(&s, &d).unwrap();
            if stat.ks_distance * (2000f64).sqrt() > 1.63 {
                exceed += 1;
            }
        }
        assert!(exceed <= 2, "{exceed} exceedances");
    }

    #[test]
    fn ks_uniform_family() {
        let u = MaxEntDensity::uniform(1.0).unwrap();
        let s = u.sample(10_000, 8).unwrap();
        assert!(maxent_gof(&s, &u).unwrap().ks_distance < 0.02);
    }

    #[test]
    fn ks_requires_samples() {
        let d = MaxEntDensity::gaussian(1.0).unwrap();
        assert!(SampleSet::new(vec![]).is_err());
        let small = SampleSet::new(vec![0.1; 10]).unwrap();
        assert!(matches!(maxent_gof(&small, &d), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn lag_correlation_of_ramp_rows() {
        // each row alternates sign: lag-1 correlation is -1, lag-2 is +1
        let rows = 10;
        let t = 8;
        let data: Vec<f64> = (0..rows * t).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let m = EnsembleMatrix::new(rows, t, data).unwrap();
        let c = lag_correlations(&m, 0, 5);
        assert_eq!(c.len(), 5);
        assert!((c[0] + 1.0).abs() < 1e-12);
        assert!((c[1] - 1.0).abs() < 1e-12);
        assert_eq!(lag_correlations(&m, 6, 5).len(), 1);
        assert!(lag_correlations(&m, 8, 5).is_empty());
    }
}
