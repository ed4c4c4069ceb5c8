//! Levi-Civita connection of the metric cone and the derivative of the cone
//! endomorphism `P̌`, one table entry at a time.

use parasasaki::apcpc::{build_cone, check_cone_components, cone_nabla_p, DEFAULT_TOL};
use parasasaki::constructions::{example1, parallel_fixture};
use parasasaki::report::Sampler;

fn main() -> parasasaki::Result<()> {
    let s = example1(2)?.chart;
    let r = check_cone_components(&s, &Sampler::new(2, 8), DEFAULT_TOL)?;
    for sub in &r.detail {
        println!("{:<14} {:.3e} {}", sub.name, sub.max_residual, if sub.pass { "ok" } else { "FAIL" });
    }

    let flat = parallel_fixture(2)?;
    let cone = build_cone(&flat)?;
    let (p, x) = ([0.0; 5], [0.0, 1.0, 0.0, 0.0, 0.0]);
    let xi = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    for r in [0.7, 1.0, 1.5] {
        let v = cone_nabla_p(&cone, &p, r, &x, &x, &xi)?;
        println!("parallel base, r = {r}: ǧ((∇̌_X P̌)X, ξ) = {v:.6}, r²g(X,X) = {:.6}", r * r);
    }
    Ok(())
}
