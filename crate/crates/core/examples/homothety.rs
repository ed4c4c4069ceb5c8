//! Homothetic transformations: curvature laws for constant `(u, v, w)`,
//! rescaling an extension to Einstein, and the `(p, q)` η-Einstein family.

use parasasaki::apcpc::DEFAULT_TOL;
use parasasaki::constructions::{example1, example3, hyperbolic_extension};
use parasasaki::report::Sampler;
use parasasaki::transform::{
    check_eta_einstein_form, check_homothetic_laws, homothety_to_einstein, ConformalData, TRANSFORM_TOL,
};

fn main() -> parasasaki::Result<()> {
    let sampler = Sampler::new(9, 8);
    let s = example1(2)?.lie;
    let r = check_homothetic_laws(&s, &ConformalData::homothetic(0.3, 0.2, 0.0), &sampler, DEFAULT_TOL)?;
    for sub in &r.detail {
        println!("{:<20} {:.3e} {}", sub.name, sub.max_residual, if sub.pass { "ok" } else { "FAIL" });
    }

    let scaled = hyperbolic_extension(&example3(2)?.scaled(2.0)?)?;
    let (d, t) = homothety_to_einstein(&scaled, &sampler, DEFAULT_TOL)?;
    println!("\nrescale to Einstein: {d}, new base {}", t.base().map(|b| b.name()).unwrap_or("-"));

    let ext = hyperbolic_extension(&example3(2)?)?;
    let r = check_eta_einstein_form(&ext, 2.0, 1.0, &sampler, TRANSFORM_TOL)?;
    println!("\n(p, q) = (2, 1): {:?}", r.verdict());
    for sub in &r.detail {
        let extra: Vec<String> = sub.extra.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("  {:<12} {:.3e} {}", sub.name, sub.max_residual, extra.join(" "));
    }
    Ok(())
}
