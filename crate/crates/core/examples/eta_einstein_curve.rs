//! η-Einstein coefficients of the Example 4 extension along `t`, in both
//! bases `{g, g̃, η⊗η}` and `{g, g(·,φ·), η⊗η}`.

use parasasaki::constructions::{example4, hyperbolic_extension};
use parasasaki::curvature::eta_einstein_fit;

fn main() -> parasasaki::Result<()> {
    let s = hyperbolic_extension(&example4(2, 2.0, 1.0)?)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>10}", "t", "alpha", "beta", "gamma", "gamma_h", "resid");
    for i in -4..=4 {
        let t = 0.25 * i as f64;
        let f = eta_einstein_fit(&s, &[t, 0.1, 0.2, -0.3, 0.4])?;
        let (_, _, gh) = f.horizontal_form();
        println!("{t:>6} {:>12.8} {:>12.8} {:>12.8} {gh:>12.8} {:>10.2e}", f.alpha, f.beta, f.gamma, f.residual);
    }
    Ok(())
}
