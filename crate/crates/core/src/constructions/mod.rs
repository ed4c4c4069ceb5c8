//! Paraholomorphic paracomplex Riemannian bases, their hyperbolic
//! extensions and the example manifolds.

mod examples;

use std::sync::Arc;

pub use examples::*;

use crate::apcpc::ApcpcStructure;
use crate::error::{GeometryError, Result};
use crate::geometry::{ChartModel, FieldSource, PointGeometry, TensorField};
use crate::jet::{Jet, JetMap};
use crate::report::{CheckReport, Sampler};
use crate::tensor::{bilinear, Slot};

/// Default sampling box for the extension coordinate.
pub const T_RANGE: (f64, f64) = (-1.5, 1.5);

/// An even-dimensional chart `(N, h)` with a paracomplex structure `P`
/// (row-major `P^k_j` as a jet field).
#[derive(Clone, Debug)]
pub struct PhpcrModel {
    chart: ChartModel,
    p: TensorField,
}

impl PhpcrModel {
    pub fn new(chart: ChartModel, p: JetMap) -> Result<Self> {
        if chart.dim() % 2 != 0 {
            return Err(GeometryError::Dimension(format!(
                "paracomplex base must be even-dimensional, got {}",
                chart.dim()
            )));
        }
        Ok(PhpcrModel { chart, p: TensorField::jets(vec![Slot::Upper, Slot::Lower], p) })
    }

    /// Constant paracomplex structure.
    pub fn with_constant_p(chart: ChartModel, p: Vec<f64>) -> Result<Self> {
        let d = chart.dim();
        if p.len() != d * d {
            return Err(GeometryError::Shape("P has wrong number of components".into()));
        }
        PhpcrModel::new(chart, Arc::new(move |x: &[Jet]| p.iter().map(|&v| x[0].cst(v)).collect()))
    }

    pub fn chart(&self) -> &ChartModel {
        &self.chart
    }

    pub fn name(&self) -> &str {
        self.chart.name()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn n(&self) -> usize {
        self.chart.dim() / 2
    }

    pub fn p_map(&self) -> &JetMap {
        match &self.p.source {
            FieldSource::Jets(m) => m,
            FieldSource::Constant(_) => unreachable!("P is stored as a jet field"),
        }
    }

    pub fn p_at(&self, y: &[f64]) -> Vec<f64> {
        (self.p_map())(&Jet::seed(y)).into_iter().map(|j| j.value).collect()
    }

    pub fn h_at(&self, y: &[f64]) -> Vec<f64> {
        self.chart.metric_values(y)
    }

    /// `h̃(X,Y) = h(X, PY)` components.
    pub fn h_tilde_at(&self, y: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let h = self.h_at(y);
        let p = self.p_at(y);
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = (0..d).map(|k| h[i * d + k] * p[k * d + j]).sum();
            }
        }
        out
    }

    pub fn geometry(&self, y: &[f64]) -> Result<PointGeometry> {
        PointGeometry::at(&self.chart.clone().into(), y)
    }

    /// `P² = id`, `tr P = 0`, `h(P·,P·) = h` and `∇P = 0` on sample points.
    pub fn validate(&self, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
        let d = self.dim();
        let model = self.chart.clone().into();
        sampler.report(
            "phpcr_base",
            &["p_squared", "trace_p", "h_p_invariant", "nabla_p"],
            tol,
            |_, rng| {
                let y = model_sample(&model, rng);
                let p = self.p_at(&y);
                let h = self.h_at(&y);
                let mut sq = 0.0f64;
                let mut inv = 0.0f64;
                for i in 0..d {
                    for j in 0..d {
                        let pp: f64 = (0..d).map(|k| p[i * d + k] * p[k * d + j]).sum();
                        sq = sq.max((pp - if i == j { 1.0 } else { 0.0 }).abs());
                        let pi: Vec<f64> = (0..d).map(|k| p[k * d + i]).collect();
                        let pj: Vec<f64> = (0..d).map(|k| p[k * d + j]).collect();
                        inv = inv.max((bilinear(&h, &pi, &pj) - h[i * d + j]).abs());
                    }
                }
                let tr: f64 = (0..d).map(|i| p[i * d + i]).sum();
                let pg = PointGeometry::at(&model, &y)?;
                let np = pg.covariant_derivative(&model, &self.p)?;
                Ok(vec![sq, tr.abs(), inv, np.max_abs()])
            },
        )
    }

    /// Same chart and `P` with metric `c·h`.
    pub fn scaled(&self, c: f64) -> Result<PhpcrModel> {
        if c <= 0.0 {
            return Err(GeometryError::Parameter("metric scale must be positive".into()));
        }
        let h = self.chart.metric_field().clone();
        let metric: JetMap = Arc::new(move |y: &[Jet]| h(y).into_iter().map(|v| v * c).collect());
        let chart = ChartModel::new(format!("{}*{c}", self.name()), self.dim(), metric, self.chart.domain().to_vec())?;
        PhpcrModel::new(chart, self.p_map().clone())
    }

    /// The horizontal slice `t = const` of the hyperbolic extension, with
    /// metric `cosh(2t) h + sinh(2t) h̃` and the same `P`.
    pub fn slice_at(&self, t: f64) -> Result<PhpcrModel> {
        let h = self.chart.metric_field().clone();
        let p = self.p_map().clone();
        let d = self.dim();
        let (ch, sh) = ((2.0 * t).cosh(), (2.0 * t).sinh());
        let metric: JetMap = Arc::new(move |y: &[Jet]| {
            let hv = h(y);
            let pv = p(y);
            let mut out = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    let mut ht = y[0].cst(0.0);
                    for k in 0..d {
                        ht += &(&hv[i * d + k] * &pv[k * d + j]);
                    }
                    out.push(&hv[i * d + j] * ch + ht * sh);
                }
            }
            out
        });
        let chart = ChartModel::new(format!("{}@t={t}", self.name()), d, metric, self.chart.domain().to_vec())?;
        PhpcrModel::new(chart, self.p_map().clone())
    }
}

fn model_sample<R: rand::Rng>(m: &crate::geometry::ManifoldModel, rng: &mut R) -> Vec<f64> {
    m.sample_point(rng)
}

/// `ℝ × N` with `η = dt`, `ξ = ∂_t`, `φ = 0 ⊕ P` and
/// `g = dt² + cosh(2t) h + sinh(2t) h̃`. Coordinates are `(t, y)`.
pub fn hyperbolic_extension(base: &PhpcrModel) -> Result<ApcpcStructure> {
    let check = base.validate(&Sampler::new(crate::report::DEFAULT_SEED, 8), 1e-8)?;
    if !check.pass {
        let f = check.first_failure().expect("failing report names a sub-check");
        return Err(GeometryError::PhpcrValidation(format!(
            "{}: {} residual {:.3e}",
            base.name(),
            f.name,
            f.max_residual
        )));
    }
    Ok(hyperbolic_extension_unchecked(base))
}

/// [`hyperbolic_extension`] without validating the base.
pub fn hyperbolic_extension_unchecked(base: &PhpcrModel) -> ApcpcStructure {
    let d = base.dim();
    let big = d + 1;
    let h = base.chart().metric_field().clone();
    let p = base.p_map().clone();
    let p2 = p.clone();
    let metric: JetMap = Arc::new(move |x: &[Jet]| {
        let t2 = &x[0] * 2.0;
        let (ch, sh) = (t2.cosh(), t2.sinh());
        let y = &x[1..];
        let hv = h(y);
        let pv = p(y);
        let mut out = vec![x[0].cst(0.0); big * big];
        out[0] = x[0].cst(1.0);
        for i in 0..d {
            for j in 0..d {
                let mut ht = x[0].cst(0.0);
                for k in 0..d {
                    ht += &(&hv[i * d + k] * &pv[k * d + j]);
                }
                out[(i + 1) * big + j + 1] = &ch * &hv[i * d + j] + &sh * &ht;
            }
        }
        out
    });
    let phi: JetMap = Arc::new(move |x: &[Jet]| {
        let pv = p2(&x[1..]);
        let mut out = vec![x[0].cst(0.0); big * big];
        for k in 0..d {
            for j in 0..d {
                out[(k + 1) * big + j + 1] = pv[k * d + j].clone();
            }
        }
        out
    });
    let unit0: JetMap = Arc::new(move |x: &[Jet]| {
        let mut out = vec![x[0].cst(0.0); big];
        out[0] = x[0].cst(1.0);
        out
    });
    let mut domain = vec![T_RANGE];
    domain.extend_from_slice(base.chart().domain());
    let chart = ChartModel::new(format!("ext({})", base.name()), big, metric, domain)
        .expect("extension chart")
        .with_structure(phi, unit0.clone(), unit0);
    ApcpcStructure::new(chart).expect("odd dimension with structure").with_base(base.clone())
}
