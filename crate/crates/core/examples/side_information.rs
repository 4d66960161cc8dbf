//! Estimating a Gaussian signal from a noisy observation: the conditional
//! entropy bounds every estimator, and the conditional mean attains it.
//!
//!     cargo run --release --example side_information

use entrobound::bounds::{prediction_bound, BoundSource};
use entrobound::harness::run::gaussian_side_information_entropy;
use entrobound::{MaxEntDensity, PExponent};

fn main() -> entrobound::Result<()> {
    let n = 100_000;
    let x = MaxEntDensity::gaussian(1.0)?.sample(n, 1)?.into_values();
    let v = MaxEntDensity::gaussian(1.0)?.sample(n, 2)?.into_values();
    let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + b).collect();

    let h = gaussian_side_information_entropy(1.0, 1.0);
    let bound = prediction_bound(&BoundSource::ConditionalEntropy { bits: h }, PExponent::Finite(2.0), 0)?;
    println!("h(X|Y) = {h:.4} bits, RMSE bound {:.4}", bound.bound_value);

    for (name, gain) in [("ignore y", 0.0), ("y itself", 1.0), ("conditional mean", 0.5), ("over-shrunk", 0.3)] {
        let mse = x.iter().zip(&y).map(|(a, b)| (a - gain * b).powi(2)).sum::<f64>() / n as f64;
        println!("{name:>17}: RMSE {:.4}", mse.sqrt());
    }
    Ok(())
}
