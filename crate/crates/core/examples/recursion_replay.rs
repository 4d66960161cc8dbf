//! Noisy gradient descent: every step is bounded below by the noise entropy,
//! and the trajectory can be rebuilt from x0 and the recorded noise.
//!
//!     cargo run --release --example recursion_replay

use entrobound::processes::{replay_recursion, GMap, Residual, X0Mode};
use entrobound::{recursion_bound, simulate_recursion, MaxEntDensity, PExponent, RecursionSpec};

fn main() -> entrobound::Result<()> {
    let spec = RecursionSpec {
        g: GMap::QuadraticGradient { eta: 0.1 },
        noise: Some(MaxEntDensity::gaussian(0.1)?),
        x0: X0Mode::Deterministic(1.0),
        residual: Residual::FirstDifference,
    };
    let ens = simulate_recursion(&spec, 1000, 200, 9)?;
    let bound = recursion_bound(&spec, PExponent::Finite(2.0), 0)?.bound_value;
    println!("step RMSE bound {bound:.4}");
    for k in [0, 1, 5, 20, 100, 199] {
        let r = ens.residual_column(k).expect("recursion ensemble");
        let rmse = (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt();
        println!("k = {k:>3}: RMSE {rmse:.4}");
    }

    let replayed = replay_recursion(&spec, &spec.g, &ens)?;
    let exact = replayed.iter().zip(ens.states()).all(|(a, b)| a.to_bits() == b.to_bits());
    println!("replay from x0 and noise is bit-exact: {exact}");
    Ok(())
}
