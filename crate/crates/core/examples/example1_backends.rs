//! The five-dimensional Example 1 on both backends: structure constants and
//! the explicit chart give the same curvature.

use parasasaki::apcpc::{check_para_sasaki_like, validate_structure, DEFAULT_TOL};
use parasasaki::constructions::example1;
use parasasaki::report::Sampler;

fn main() -> parasasaki::Result<()> {
    let e = example1(2)?;
    let sampler = Sampler::new(7, 16);
    for s in [&e.lie, &e.chart] {
        let v = validate_structure(s, &sampler, DEFAULT_TOL)?;
        let p = check_para_sasaki_like(s, &sampler, DEFAULT_TOL)?;
        println!("{:<24} valid: {:<5} para-Sasaki-like: {:<5} (max residual {:.2e})", s.name(), v.pass, p.pass, p.max_residual);
    }
    let (a, b) = (e.lie.at(&[0.0; 5])?, e.chart.at(&[0.0; 5])?);
    let xi = a.xi().to_vec();
    println!("Ric(ξ,ξ): lie {:.12}, chart {:.12}", a.geo.ricci(&xi, &xi), b.geo.ricci(b.xi(), b.xi()));
    println!("Scal:     lie {:.12}, chart {:.12}", a.geo.scalar(), b.geo.scalar());
    Ok(())
}
