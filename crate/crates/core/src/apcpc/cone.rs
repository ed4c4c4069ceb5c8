use std::sync::Arc;

use rand::Rng;

use super::{ApcpcStructure, StructurePoint};
use crate::error::{GeometryError, Result};
use crate::geometry::{ChartModel, ManifoldModel, PointGeometry, TensorField};
use crate::jet::{Jet, JetMap};
use crate::report::{random_vector, CheckReport, Sampler, SubCheck};
use crate::tensor::Slot;

/// Sampling range of the radial coordinate. The structure has a `1/r`, so
/// the apex is kept well away.
pub const CONE_RADII: (f64, f64) = (0.5, 2.0);
pub const MIN_RADIUS: f64 = 0.3;

/// The cone `M × ℝ⁺` with coordinates `(x, r)`, its metric
/// `r²g + (1−r²)η⊗η + dr²` and almost paracomplex structure `P̌`.
#[derive(Clone, Debug)]
pub struct Cone {
    model: ManifoldModel,
    p_check: TensorField,
    base: ApcpcStructure,
}

impl Cone {
    pub fn model(&self) -> &ManifoldModel {
        &self.model
    }

    pub fn chart(&self) -> &ChartModel {
        self.model.as_chart().expect("cone is a chart")
    }

    /// `P̌` as a (1,1) field, row-major `P̌^k_j`.
    pub fn p_check(&self) -> &TensorField {
        &self.p_check
    }

    pub fn base(&self) -> &ApcpcStructure {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// `P̌` components at a cone point.
    pub fn p_check_at(&self, q: &[f64]) -> Vec<f64> {
        match &self.p_check.source {
            crate::geometry::FieldSource::Jets(m) => m(&Jet::seed(q)).into_iter().map(|j| j.value).collect(),
            crate::geometry::FieldSource::Constant(c) => c.clone(),
        }
    }

    /// `(∇̌_{e_a} P̌)^k_j` at `q`, index `(a*D + k)*D + j`.
    pub fn nabla_p_check(&self, q: &[f64]) -> Result<(PointGeometry, Vec<f64>)> {
        let pg = PointGeometry::at(&self.model, q)?;
        let t = pg.covariant_derivative(&self.model, &self.p_check)?;
        Ok((pg, t.components().to_vec()))
    }
}

pub fn build_cone(s: &ApcpcStructure) -> Result<Cone> {
    let chart = s.model().as_chart().ok_or_else(|| {
        GeometryError::Backend(format!(
            "{} is a Lie-frame model; the cone needs a chart form of the base",
            s.name()
        ))
    })?;
    let d = chart.dim();
    let big = d + 1;
    let metric = chart.metric_field().clone();
    let eta = chart.eta_field().expect("structure").clone();
    let xi = chart.xi_field().expect("structure").clone();
    let phi = chart.phi_field().expect("structure").clone();

    let eta_m = eta.clone();
    let cone_metric: JetMap = Arc::new(move |x: &[Jet]| {
        let r = &x[d];
        let g = metric(&x[..d]);
        let e = eta_m(&x[..d]);
        let r2 = r.square();
        let one_minus = r.cst(1.0) - &r2;
        let mut out = vec![r.cst(0.0); big * big];
        for i in 0..d {
            for j in 0..d {
                out[i * big + j] = &r2 * &g[i * d + j] + &one_minus * &(&e[i] * &e[j]);
            }
        }
        out[big * big - 1] = r.cst(1.0);
        out
    });
    let p_map: JetMap = Arc::new(move |x: &[Jet]| {
        let r = &x[d];
        let f = phi(&x[..d]);
        let e = eta(&x[..d]);
        let v = xi(&x[..d]);
        let inv_r = r.recip();
        let mut out = vec![r.cst(0.0); big * big];
        for k in 0..d {
            for j in 0..d {
                out[k * big + j] = f[k * d + j].clone();
            }
            // P̌ ∂_r = ξ / r
            out[k * big + d] = &v[k] * &inv_r;
        }
        // P̌ ∂_j picks up η_j · r ∂_r from the ξ-part of ∂_j
        for j in 0..d {
            out[d * big + j] = &e[j] * r;
        }
        out
    });
    let mut domain = chart.domain().to_vec();
    domain.push(CONE_RADII);
    let model = ChartModel::new(format!("cone({})", chart.name()), big, cone_metric, domain)?;
    Ok(Cone {
        model: model.into(),
        p_check: TensorField::jets(vec![Slot::Upper, Slot::Lower], p_map),
        base: s.clone(),
    })
}

fn embed(v: &[f64], radial: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    out.push(radial);
    out
}

fn cone_g(pg: &PointGeometry, t: &[f64], big: usize, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
    // ǧ((∇̌_u P̌) v, w)
    let mut vec = vec![0.0; big];
    for a in 0..big {
        if u[a] == 0.0 {
            continue;
        }
        for j in 0..big {
            let uv = u[a] * v[j];
            if uv == 0.0 {
                continue;
            }
            for (k, o) in vec.iter_mut().enumerate() {
                *o += uv * t[(a * big + k) * big + j];
            }
        }
    }
    pg.g(&vec, w)
}

/// Labels of the cone's adapted basis: horizontal, ξ, ∂_r.
fn label(i: usize, dim_h: usize) -> &'static str {
    if i == 0 {
        "xi"
    } else if i <= dim_h {
        "X"
    } else {
        "d/dr"
    }
}

/// Size of `∇̌P̌` on a ǧ-orthonormal adapted basis at each sample point and
/// each of the given radii. The worst component is named in the report.
pub fn check_cone_parallel(s: &ApcpcStructure, sampler: &Sampler, radii: &[f64], tol: f64) -> Result<CheckReport> {
    if radii.iter().any(|&r| r < MIN_RADIUS) {
        return Err(GeometryError::Parameter(format!("cone radii must be at least {MIN_RADIUS}")));
    }
    let cone = build_cone(s)?;
    let base_chart = s.model();
    let big = cone.dim();
    let dim_h = big - 2;
    let rows: Vec<(f64, String)> = {
        use rayon::prelude::*;
        (0..sampler.count)
            .into_par_iter()
            .map(|i| {
                let mut rng = sampler.rng(i);
                let p = base_chart.sample_point(&mut rng);
                let sp = s.at(&p)?;
                let mut worst = (0.0f64, String::new());
                for &r in radii {
                    let q = embed(&p, r);
                    let (pg, t) = cone.nabla_p_check(&q)?;
                    let mut basis = vec![embed(sp.xi(), 0.0)];
                    basis.extend(sp.horizontal_basis().iter().map(|h| embed(&h.iter().map(|c| c / r).collect::<Vec<_>>(), 0.0)));
                    basis.push(embed(&vec![0.0; big - 1], 1.0));
                    for (a, u) in basis.iter().enumerate() {
                        for (b, v) in basis.iter().enumerate() {
                            for (c, w) in basis.iter().enumerate() {
                                let val = cone_g(&pg, &t, big, u, v, w).abs();
                                if val > worst.0 {
                                    worst = (
                                        val,
                                        format!("g((nabla_{} P)({}), {}) at r={r}", label(a, dim_h), label(b, dim_h), label(c, dim_h)),
                                    );
                                }
                            }
                        }
                    }
                }
                Ok(worst)
            })
            .collect::<Result<_>>()?
    };
    let (idx, (res, comp)) = rows
        .into_iter()
        .enumerate()
        .fold((0, (0.0, String::new())), |acc, (i, row)| if row.0 > acc.1 .0 { (i, row) } else { acc });
    let sub = SubCheck::new("nabla_p_check", res, tol)
        .at(idx)
        .with("component", comp)
        .with("radii", radii.to_vec());
    Ok(CheckReport::from_subchecks("cone_parallel", sampler.count, tol, sampler.seed, vec![sub]))
}

/// Evaluates `ǧ((∇̌_X P̌)Y, W)` at a cone point for base vectors
/// `X, Y` (no radial part) and an arbitrary cone vector `W`.
pub fn cone_nabla_p(cone: &Cone, p: &[f64], r: f64, x: &[f64], y: &[f64], w: &[f64]) -> Result<f64> {
    let (pg, t) = cone.nabla_p_check(&embed(p, r))?;
    Ok(cone_g(&pg, &t, cone.dim(), &embed(x, 0.0), &embed(y, 0.0), w))
}

/// Entries of the connection table and of the `∇̌P̌` table of the cone,
/// in the order they are checked by [`check_cone_components`]. `X, Y, Z`
/// are horizontal; the Levi-Civita entries extend `Y` as the horizontal
/// projection of a constant field and `ξ` as itself.
pub const CONE_TABLE_ENTRIES: [&str; 20] = [
    "lc_x_y_z",
    "lc_x_y_dr",
    "lc_x_y_xi",
    "lc_x_xi_z",
    "lc_xi_y_z",
    "lc_xi_y_xi",
    "lc_xi_xi_z",
    "lc_x_dr_z",
    "lc_dr_y_z",
    "np_x_y_z",
    "np_x_y_xi",
    "np_x_y_dr",
    "np_x_xi_z",
    "np_x_dr_z",
    "np_xi_y_z",
    "np_xi_y_xi",
    "np_xi_xi_z",
    "np_xi_y_dr",
    "np_xi_dr_z",
    "np_dr",
];

/// Compares every tabulated entry of the cone's connection and of `∇̌P̌`
/// with its expression through base quantities, on random horizontal
/// vectors. `np_dr` is the largest `∂_r`-direction component of `∇̌P̌`,
/// which the table lists as zero.
pub fn check_cone_components(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
    let cone = build_cone(s)?;
    let big = cone.dim();
    sampler.report("cone_components", &CONE_TABLE_ENTRIES, tol, |_, rng| {
        let p = s.model().sample_point(rng);
        let r = rng.gen_range(CONE_RADII.0..=CONE_RADII.1);
        let sp: StructurePoint = s.at(&p)?;
        let d = sp.dim();
        let x = sp.horizontal(&random_vector(rng, d));
        let y = sp.horizontal(&random_vector(rng, d));
        let z = sp.horizontal(&random_vector(rng, d));
        let (pg, t) = cone.nabla_p_check(&embed(&p, r))?;
        let st = sp.geo.structure()?;
        let xi = sp.xi().to_vec();

        // frame derivatives on the cone of the horizontal field through y and of ξ
        let dy: Vec<Vec<f64>> = (0..big)
            .map(|a| {
                let mut v = vec![0.0; big];
                if a < d {
                    let de: f64 = (0..d).map(|j| st.deta[a * d + j] * y[j]).sum();
                    for k in 0..d {
                        v[k] = -de * xi[k];
                    }
                }
                v
            })
            .collect();
        let dxi: Vec<Vec<f64>> = (0..big)
            .map(|a| if a < d { embed(&st.dxi[a * d..(a + 1) * d], 0.0) } else { vec![0.0; big] })
            .collect();

        let (ex, ey, ez, exi) = (embed(&x, 0.0), embed(&y, 0.0), embed(&z, 0.0), embed(&xi, 0.0));
        let dr = embed(&vec![0.0; d], 1.0);
        let lc_y = |u: &[f64], w: &[f64]| pg.g(&pg.nabla(u, &ey, Some(&dy)), w);
        let lc_xi = |u: &[f64], w: &[f64]| pg.g(&pg.nabla(u, &exi, Some(&dxi)), w);
        let lc_dr = |u: &[f64], w: &[f64]| pg.g(&pg.nabla(u, &dr, None), w);
        let lc_dr_y = pg.g(&pg.nabla(&dr, &ey, Some(&dy)), &ez);
        let np = |u: &[f64], v: &[f64], w: &[f64]| cone_g(&pg, &t, big, u, v, w);

        let base_y = |u: &[f64], w: &[f64]| {
            let ydy: Vec<Vec<f64>> = dy.iter().map(|v| v[..d].to_vec()).collect();
            sp.g(&sp.geo.nabla(u, &y, Some(&ydy)), w)
        };
        let nxi = |u: &[f64]| sp.nabla_xi(u);
        let nxixi = nxi(&xi);
        let k = 0.5 * (r * r - 1.0);
        let de = |a: &[f64], b: &[f64]| sp.d_eta(a, b);
        let phi = |a: &[f64]| sp.phi(a);

        let expected_pairs = [
            (lc_y(&ex, &ez), r * r * base_y(&x, &z)),
            (lc_y(&ex, &dr), -r * sp.g(&x, &y)),
            (lc_y(&ex, &exi), r * r * base_y(&x, &xi) + k * de(&x, &y)),
            (lc_xi(&ex, &ez), r * r * sp.g(&nxi(&x), &z) - k * de(&x, &z)),
            (lc_y(&exi, &ez), r * r * base_y(&xi, &z) - k * de(&y, &z)),
            (lc_y(&exi, &exi), -sp.g(&nxixi, &y)),
            (lc_xi(&exi, &ez), sp.g(&nxixi, &z)),
            (lc_dr(&ex, &ez), r * sp.g(&x, &z)),
            (lc_dr_y, r * sp.g(&y, &z)),
            (np(&ex, &ey, &ez), r * r * sp.f(&x, &y, &z)),
            (np(&ex, &ey, &exi), r * r * (sp.f(&x, &y, &xi) + sp.g(&x, &y)) + k * de(&x, &phi(&y))),
            (np(&ex, &ey, &dr), r * (sp.g(&nxi(&x), &y) - sp.g_phi(&x, &y)) - k / r * de(&x, &y)),
            (
                np(&ex, &exi, &ez),
                -r * r * (sp.g(&nxi(&x), &phi(&z)) - sp.g(&x, &z)) + k * de(&x, &phi(&z)),
            ),
            (np(&ex, &dr, &ez), r * (sp.g(&nxi(&x), &z) - sp.g_phi(&x, &z)) - k / r * de(&x, &z)),
            (
                np(&exi, &ey, &ez),
                r * r * sp.f(&xi, &y, &z) - k * (de(&phi(&y), &z) - de(&y, &phi(&z))),
            ),
            (np(&exi, &ey, &exi), -sp.g(&nxixi, &phi(&y))),
            (np(&exi, &exi, &ez), -sp.g(&nxixi, &phi(&z))),
            (np(&exi, &ey, &dr), sp.g(&nxixi, &y) / r),
            (np(&exi, &dr, &ez), sp.g(&nxixi, &z) / r),
        ];
        let mut out: Vec<f64> = expected_pairs.iter().map(|(a, b)| (a - b).abs()).collect();
        let basis = [ex.clone(), ey.clone(), exi.clone(), dr.clone()];
        let mut radial = 0.0f64;
        for v in &basis {
            for w in &basis {
                radial = radial.max(np(&dr, v, w).abs());
            }
        }
        out.push(radial);
        Ok(out)
    })
}
