//! Entropy rate of a Gaussian AR process from its spectrum, compared with
//! the innovation variance and with a fitted one-step predictor.
//!
//!     cargo run --release --example spectral_bound

use entrobound::bounds::{prediction_bound, BoundSource};
use entrobound::predictors::{apply_predictor, fit_linear_predictor, AutocovSource};
use entrobound::spectral::DEFAULT_GRID_SIZE;
use entrobound::{ar_spectrum, lp_bound, simulate_process, szego_entropy_rate, PExponent, ProcessSpec};

fn main() -> entrobound::Result<()> {
    let p2 = PExponent::Finite(2.0);
    for coeffs in [vec![0.9], vec![0.6, -0.3], vec![1.2, -0.5]] {
        let spec = ProcessSpec::gaussian_ar(coeffs.clone(), 1.0);
        let rate = szego_entropy_rate(&ar_spectrum(&coeffs, 1.0, DEFAULT_GRID_SIZE)?)?;
        let spectral = prediction_bound(&BoundSource::spectral_for(&spec, DEFAULT_GRID_SIZE)?, p2, 0)?;

        let ens = simulate_process(&spec, 5000, 20, 3)?;
        let fit = fit_linear_predictor(AutocovSource::Ensemble(&ens), coeffs.len())?;
        let errs = apply_predictor(&fit.predictor, &ens)?.steady_state_values();
        let rmse = (errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt();
        println!(
            "AR{coeffs:?}: rate {rate:.4} bits, bound {:.4} ({:.4}), fitted RMSE {rmse:.4}, innovation var {:.4}",
            spectral.bound_value,
            lp_bound(rate, p2),
            fit.innovation_variance
        );
    }
    Ok(())
}
