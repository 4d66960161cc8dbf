//! kNN entropy and KSG mutual information against Gaussian closed forms.
//!
//!     cargo run --release --example entropy_estimators

use std::f64::consts::{E, PI};

use entrobound::estimators::{conditional_entropy, knn_entropy, mutual_information, EnsembleMatrix};
use entrobound::MaxEntDensity;

fn main() -> entrobound::Result<()> {
    let n = 20_000;
    let normal = MaxEntDensity::gaussian(1.0)?;
    let x = normal.sample(n, 10)?.into_values();
    let z = normal.sample(n, 11)?.into_values();
    let xm = EnsembleMatrix::from_columns(&[&x])?;

    let h = knn_entropy(&xm, 4)?;
    println!("h(X)       kNN {:.4}  exact {:.4}", h.value, 0.5 * (2.0 * PI * E).log2());

    for rho in [0.0, 0.5, 0.9] {
        let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| rho * a + (1.0f64 - rho * rho).sqrt() * b).collect();
        let ym = EnsembleMatrix::from_columns(&[&y])?;
        let mi = mutual_information(&xm, &ym, 4)?;
        let exact = -0.5 * (1.0f64 - rho * rho).log2();
        println!("I(X;Y) rho={rho:.1}  KSG {:.4}  exact {exact:.4}", mi.value);
        let hc = conditional_entropy(&xm.hstack(&ym)?, 0, &[1], 4)?;
        println!("h(X|Y) rho={rho:.1}  est {:.4}  exact {:.4}", hc.value, 0.5 * (2.0 * PI * E * (1.0 - rho * rho)).log2());
    }
    Ok(())
}
