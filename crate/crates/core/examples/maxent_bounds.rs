//! The maximum-entropy densities, their entropies and the L_p bounds they
//! meet with equality.
//!
//!     cargo run --example maxent_bounds

use entrobound::{entropy_closed_form, lp_bound, MaxEntDensity, PExponent};
use entrobound::estimators::empirical_lp_norm;

fn main() -> entrobound::Result<()> {
    println!("{:>5} {:>12} {:>10} {:>12}", "p", "h (bits)", "bound", "sample norm");
    for p in ["1", "1.5", "2", "4", "8", "inf"] {
        let p: PExponent = p.parse()?;
        let d = MaxEntDensity::new(p, 1.0)?;
        let h = entropy_closed_form(&d);
        let s = d.sample(200_000, 1)?;
        println!("{:>5} {h:>12.6} {:>10.6} {:>12.6}", p.to_string(), lp_bound(h, p), empirical_lp_norm(&s, p));
    }

    // any other density with the same entropy has a larger norm
    let h = entropy_closed_form(&MaxEntDensity::laplace(1.0)?);
    let gaussian = MaxEntDensity::new(PExponent::Finite(2.0), 1.0)?;
    let sigma = (h - gaussian.entropy_bits()).exp2();
    let g = MaxEntDensity::gaussian(sigma)?.sample(200_000, 2)?;
    println!(
        "\nGaussian with the Laplace entropy: L1 = {:.4}, bound = {:.4}",
        empirical_lp_norm(&g, PExponent::Finite(1.0)),
        lp_bound(h, PExponent::Finite(1.0))
    );
    Ok(())
}
