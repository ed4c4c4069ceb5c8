//! Curvature of the upper half-plane `(dx² + dy²)/y²` from a jet-valued chart.

use std::sync::Arc;

use parasasaki::geometry::{ChartModel, ManifoldModel, PointGeometry};
use parasasaki::jet::{Jet, JetMap};

fn main() -> parasasaki::Result<()> {
    let metric: JetMap = Arc::new(|x: &[Jet]| {
        let w = (&x[1] * &x[1]).recip();
        vec![w.clone(), x[0].cst(0.0), x[0].cst(0.0), w]
    });
    let model: ManifoldModel = ChartModel::new("H2", 2, metric, vec![(-1.0, 1.0), (0.5, 2.0)])?.into();
    for p in [[0.0, 1.0], [0.3, 0.5], [-0.7, 2.0]] {
        let geo = PointGeometry::at(&model, &p)?;
        let (e1, e2) = ([1.0, 0.0], [0.0, 1.0]);
        let k = geo.riemann4(&e1, &e2, &e2, &e1) / (geo.g(&e1, &e1) * geo.g(&e2, &e2));
        println!("p = {p:?}  Γ^x_xy = {:+.6}  K = {:+.12}  Scal = {:+.12}", geo.gamma(0, 0, 1), k, geo.scalar());
    }
    Ok(())
}
