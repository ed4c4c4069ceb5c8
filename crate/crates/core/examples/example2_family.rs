//! The two-parameter family of Example 2: para-Sasaki-like for every
//! `(λ, μ)`, with `Ric(ξ,ξ) = −2n` throughout.

use parasasaki::apcpc::{check_para_sasaki_like, DEFAULT_TOL};
use parasasaki::constructions::example2;
use parasasaki::report::Sampler;

fn main() -> parasasaki::Result<()> {
    let sampler = Sampler::new(11, 8);
    println!("{:>6} {:>6} {:>6} {:>16} {:>16}", "λ", "μ", "psl", "Ric(ξ,ξ)", "Scal");
    for (lambda, mu) in [(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (-1.0, 2.0), (2.0, -0.3)] {
        let s = example2(lambda, mu)?.lie;
        let ok = check_para_sasaki_like(&s, &sampler, DEFAULT_TOL)?.pass;
        let sp = s.at(&[0.0; 5])?;
        println!(
            "{lambda:>6} {mu:>6} {ok:>6} {:>16.10} {:>16.10}",
            sp.geo.ricci(sp.xi(), sp.xi()),
            sp.geo.scalar()
        );
    }
    Ok(())
}
