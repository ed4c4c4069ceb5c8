//! Index gymnastics on a point of the Example 1 Lie group: lowering and
//! raising, traces, and the Kulkarni–Nomizu product `g ⊙ g`.

use parasasaki::constructions::example1_lie;
use parasasaki::tensor::{curvature_symmetry_residuals, inverse_metric, kulkarni_nomizu};

fn main() -> parasasaki::Result<()> {
    let s = example1_lie(2)?;
    let geo = s.at(&[0.0; 5])?.geo;
    let g = geo.metric_tensor();
    let g_inv = inverse_metric(&g)?;

    let ric = geo.ricci_tensor();
    let ric_up = ric.raise_index(0, &g_inv)?;
    println!("Scal via trace of Ric^a_b: {:.12}", ric_up.contract(0, 1)?.components()[0]);
    let back = ric_up.lower_index(0, &g)?;
    println!("raise then lower: max |Δ| = {:.3e}", back.max_abs_diff(&ric)?);

    let riem = geo.riemann_tensor();
    println!("Riemann symmetry residuals: {:?}", curvature_symmetry_residuals(&riem));
    let gg = kulkarni_nomizu(&g, &g)?;
    println!("g⊙g symmetry residuals:     {:?}", curvature_symmetry_residuals(&gg));
    Ok(())
}
