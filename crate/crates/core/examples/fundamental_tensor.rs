//! `F`, `∇φ` and both Nijenhuis tensors on a structure with no special
//! properties, and the identities tying them together.

use parasasaki::apcpc::{validate_structure, verify_nabf, DEFAULT_TOL};
use parasasaki::constructions::generic_fixture;
use parasasaki::report::Sampler;

fn main() -> parasasaki::Result<()> {
    let s = generic_fixture(1, 0.15, 3)?;
    let sampler = Sampler::new(3, 16);
    for r in [validate_structure(&s, &sampler, DEFAULT_TOL)?, verify_nabf(&s, &sampler, DEFAULT_TOL)?] {
        println!("{} ({:?})", r.check, r.verdict());
        for sub in &r.detail {
            println!("  {:<28} {:.3e}", sub.name, sub.max_residual);
        }
    }
    let sp = s.at(&[0.1, -0.2, 0.3])?;
    let n = sp.nijenhuis_tensor();
    println!("|N| max = {:.6}, |N - N(F)| = {:.3e}", n.max_abs(), n.max_abs_diff(&sp.nijenhuis_tensor_from_f())?);
    Ok(())
}
