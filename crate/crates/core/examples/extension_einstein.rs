//! Hyperbolic extension of the Einstein base of Example 3: the Ricci tensor
//! equals `−2n g` on the slice `t = 0` only.

use parasasaki::constructions::{example3, hyperbolic_extension};
use parasasaki::curvature::{decomposition_values, einstein_fit};

fn main() -> parasasaki::Result<()> {
    let n = 2;
    let s = hyperbolic_extension(&example3(n)?)?;
    println!("{:>6} {:>14} {:>12} {:>14} {:>14}", "t", "λ", "fit resid", "Scal", "Scal^h");
    for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let p = [t, 0.2, -0.1, 0.3, 0.05];
        let (lambda, res) = einstein_fit(&s, &p)?;
        let dv = decomposition_values(&s, &p)?;
        println!("{t:>6} {lambda:>14.10} {res:>12.3e} {:>14.10} {:>14.10}", dv.scal, dv.scal_h);
    }
    Ok(())
}
