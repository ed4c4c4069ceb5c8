//! A non-constant conformal transformation of Example 1: the law for `F̄`,
//! and which triples keep the structure para-Sasaki-like.

use parasasaki::apcpc::DEFAULT_TOL;
use parasasaki::constructions::example1;
use parasasaki::report::Sampler;
use parasasaki::transform::{check_sssl, verify_lemma_ff, ConformalData, TRANSFORM_TOL};

fn main() -> parasasaki::Result<()> {
    let s = example1(2)?.chart;
    let sampler = Sampler::new(5, 16);
    let triples = [
        ("0.1*x1", "0.2*x2", "0.3*t"),
        ("0.1*sin(x1 + x3) + 0.05*(x2 - x4)", "0.1*sin(x1 + x3) - 0.05*(x2 - x4)", "0"),
        ("0", "(exp(0.4) - 1)*t", "0.4"),
        ("0.3", "0.2", "0"),
        ("0.3", "0.2", "0.1"),
    ];
    for (u, v, w) in triples {
        let d = ConformalData::parse(u, v, w)?;
        let ff = verify_lemma_ff(&s, &d, &sampler, TRANSFORM_TOL)?;
        let (keeps, _) = check_sssl(&s, &d, &sampler, DEFAULT_TOL)?;
        println!("{d}\n    F-law residual {:.2e}, stays para-Sasaki-like: {keeps}", ff.max_residual);
    }
    Ok(())
}
