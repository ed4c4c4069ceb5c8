//! Paracontact conformal transformations
//!
//! ```text
//! η̄ = e^w η,   ξ̄ = e^{-w} ξ,   φ̄ = φ,
//! ḡ = e^{2u}cosh(2v) g + e^{2u}sinh(2v) g(·,φ·) + (e^{2w} − e^{2u}cosh(2v)) η⊗η
//! ```
//!
//! and the laws relating the connection, curvature and `F` of the two
//! structures. Homothetic transformations are the case of constant `u, v, w`.

mod expr;
mod homothety;
mod lemma;

use std::fmt;
use std::sync::Arc;

pub use expr::{Expr, Func};
pub use homothety::{check_eta_einstein_form, check_homothetic_laws, homothety_to_einstein, pq_coefficients};
pub use lemma::{check_sssl, verify_lemma_ff, LemmaTerms, PRESERVATION_CHECKS};

use crate::apcpc::ApcpcStructure;
use crate::error::{GeometryError, Result};
use crate::geometry::{is_positive_definite, ManifoldModel};
use crate::jet::{Jet, JetMap};
use crate::report::{Sampler, DEFAULT_POINTS, DEFAULT_SEED};

/// Looser default for transformation checks: `F̄` mixes the `e^{2u}` and
/// `e^{2w}` scales, so residuals are reported relative to the largest term.
pub const TRANSFORM_TOL: f64 = 1e-7;

/// A function on the chart, either constant or an expression in `t, x1, …`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    Constant(f64),
    Expr(Expr),
}

impl ScalarField {
    /// Parses an expression; a variable-free one folds to a constant.
    pub fn parse(src: &str) -> Result<ScalarField> {
        let e = Expr::parse(src)?;
        Ok(match e.max_var() {
            None => ScalarField::Constant(e.eval(&[])),
            Some(_) => ScalarField::Expr(e),
        })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ScalarField::Constant(_))
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            ScalarField::Constant(c) => Some(*c),
            ScalarField::Expr(_) => None,
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            ScalarField::Constant(_) => None,
            ScalarField::Expr(e) => e.max_var(),
        }
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Expr(e) => e.eval(p),
        }
    }

    pub fn jet(&self, x: &[Jet]) -> Jet {
        match self {
            ScalarField::Constant(c) => x[0].cst(*c),
            ScalarField::Expr(e) => e.eval_jet(x),
        }
    }

    /// Coordinate gradient at `p`.
    pub fn differential(&self, p: &[f64]) -> Vec<f64> {
        match self {
            ScalarField::Constant(_) => vec![0.0; p.len()],
            ScalarField::Expr(e) => e.eval_jet(&Jet::seed(p)).grad,
        }
    }

    fn plus(&self, other: &ScalarField) -> ScalarField {
        match (self, other) {
            (ScalarField::Constant(a), ScalarField::Constant(b)) => ScalarField::Constant(a + b),
            _ => ScalarField::Expr(Expr::Add(Box::new(self.as_expr()), Box::new(other.as_expr()))),
        }
    }

    fn as_expr(&self) -> Expr {
        match self {
            ScalarField::Constant(c) => Expr::Num(*c),
            ScalarField::Expr(e) => e.clone(),
        }
    }
}

impl From<f64> for ScalarField {
    fn from(c: f64) -> Self {
        ScalarField::Constant(c)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(c) => write!(f, "{c}"),
            ScalarField::Expr(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Conformal,
    Homothetic,
}

/// The triple `(u, v, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalData {
    pub u: ScalarField,
    pub v: ScalarField,
    pub w: ScalarField,
    pub kind: TransformKind,
}

impl ConformalData {
    pub fn new(u: ScalarField, v: ScalarField, w: ScalarField, kind: TransformKind) -> Result<Self> {
        let d = ConformalData { u, v, w, kind };
        if kind == TransformKind::Homothetic && !d.is_constant() {
            return Err(GeometryError::Parameter("a homothetic transformation needs constant u, v, w".into()));
        }
        Ok(d)
    }

    pub fn conformal(u: impl Into<ScalarField>, v: impl Into<ScalarField>, w: impl Into<ScalarField>) -> Self {
        ConformalData { u: u.into(), v: v.into(), w: w.into(), kind: TransformKind::Conformal }
    }

    pub fn homothetic(u: f64, v: f64, w: f64) -> Self {
        ConformalData { u: u.into(), v: v.into(), w: w.into(), kind: TransformKind::Homothetic }
    }

    pub fn identity() -> Self {
        ConformalData::homothetic(0.0, 0.0, 0.0)
    }

    /// Parses three expressions; the kind is homothetic when all fold to constants.
    pub fn parse(u: &str, v: &str, w: &str) -> Result<Self> {
        let d = ConformalData::conformal(ScalarField::parse(u)?, ScalarField::parse(v)?, ScalarField::parse(w)?);
        Ok(if d.is_constant() { ConformalData { kind: TransformKind::Homothetic, ..d } } else { d })
    }

    pub fn is_constant(&self) -> bool {
        self.u.is_constant() && self.v.is_constant() && self.w.is_constant()
    }

    pub fn constants(&self) -> Option<(f64, f64, f64)> {
        Some((self.u.constant()?, self.v.constant()?, self.w.constant()?))
    }

    /// The transformation equal to applying `self`, then `other`.
    pub fn then(&self, other: &ConformalData) -> ConformalData {
        let kind = if self.kind == TransformKind::Homothetic && other.kind == TransformKind::Homothetic {
            TransformKind::Homothetic
        } else {
            TransformKind::Conformal
        };
        ConformalData { u: self.u.plus(&other.u), v: self.v.plus(&other.v), w: self.w.plus(&other.w), kind }
    }

    fn fields(&self) -> [&ScalarField; 3] {
        [&self.u, &self.v, &self.w]
    }
}

impl fmt::Display for ConformalData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u={}, v={}, w={}", self.u, self.v, self.w)
    }
}

/// `(A, B, C)` with `ḡ = A g + B g(·,φ·) + C η⊗η`.
fn metric_coefficients(u: f64, v: f64, w: f64) -> (f64, f64, f64) {
    let e2u = (2.0 * u).exp();
    let a = e2u * (2.0 * v).cosh();
    (a, e2u * (2.0 * v).sinh(), (2.0 * w).exp() - a)
}

fn transformed_metric(g: &[f64], phi: &[f64], eta: &[f64], d: usize, (a, b, c): (f64, f64, f64)) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let gphi: f64 = (0..d).map(|k| g[i * d + k] * phi[k * d + j]).sum();
            out[i * d + j] = a * g[i * d + j] + b * gphi + c * eta[i] * eta[j];
        }
    }
    out
}

/// `e^{2u}(cosh 2v ± sinh 2v) = e^{2u ± 2v}`, so ḡ is positive definite for
/// every finite triple; in floating point a large `|v|` overflows instead.
fn usable_metric(g: &[f64], d: usize) -> bool {
    g.iter().all(|x| x.is_finite()) && is_positive_definite(g, d)
}

/// Applies the transformation. The result keeps `φ`; when `s` is a
/// hyperbolic extension and `v = w = 0` are constant, the result is the
/// extension of the base scaled by `e^{2u}` and remembers that base.
pub fn apply_conformal(s: &ApcpcStructure, d: &ConformalData) -> Result<ApcpcStructure> {
    let dim = s.dim();
    for f in d.fields() {
        if let Some(k) = f.max_var() {
            if k >= dim {
                return Err(GeometryError::Parameter(format!("x{k} is not a coordinate of {} (dimension {dim})", s.name())));
            }
        }
    }
    let name = format!("{}~[{d}]", s.name());
    let model: ManifoldModel = match s.model() {
        ManifoldModel::Lie(m) => {
            let (u, v, w) = d.constants().ok_or_else(|| {
                GeometryError::Backend(format!("{} is a Lie model; nonconstant u, v, w need a chart", s.name()))
            })?;
            let (phi, xi, eta) = (m.phi().unwrap(), m.xi().unwrap(), m.eta().unwrap());
            let g = transformed_metric(m.metric(), phi, eta, dim, metric_coefficients(u, v, w));
            if !usable_metric(&g, dim) {
                return Err(GeometryError::MetricSignature(format!("{name} on the frame")));
            }
            let xi: Vec<f64> = xi.iter().map(|x| x * (-w).exp()).collect();
            let eta: Vec<f64> = eta.iter().map(|x| x * w.exp()).collect();
            m.with_metric(name.clone(), g)?.with_structure(phi.to_vec(), xi, eta)?.into()
        }
        ManifoldModel::Chart(c) => {
            let metric = c.metric_field().clone();
            let phi = c.phi_field().unwrap().clone();
            let xi = c.xi_field().unwrap().clone();
            let eta = c.eta_field().unwrap().clone();
            let (u, v, w) = (d.u.clone(), d.v.clone(), d.w.clone());
            let eta_m = eta.clone();
            let new_metric: JetMap = Arc::new(move |x: &[Jet]| {
                let (g, ph, et) = (metric(x), phi(x), eta_m(x));
                let e2u = (u.jet(x) * 2.0).exp();
                let v2 = v.jet(x) * 2.0;
                let a = &e2u * &v2.cosh();
                let b = &e2u * &v2.sinh();
                let c = (w.jet(x) * 2.0).exp() - &a;
                let mut out = Vec::with_capacity(dim * dim);
                for i in 0..dim {
                    for j in 0..dim {
                        let mut gphi = x[0].cst(0.0);
                        for k in 0..dim {
                            gphi += &(&g[i * dim + k] * &ph[k * dim + j]);
                        }
                        out.push(&a * &g[i * dim + j] + &b * &gphi + &c * &(&et[i] * &et[j]));
                    }
                }
                out
            });
            let w1 = d.w.clone();
            let new_xi: JetMap = Arc::new(move |x: &[Jet]| {
                let s = (-w1.jet(x)).exp();
                xi(x).iter().map(|c| c * &s).collect()
            });
            let w2 = d.w.clone();
            let new_eta: JetMap = Arc::new(move |x: &[Jet]| {
                let s = w2.jet(x).exp();
                eta(x).iter().map(|c| c * &s).collect()
            });
            let phi = c.phi_field().unwrap().clone();
            crate::geometry::ChartModel::new(name.clone(), dim, new_metric, c.domain().to_vec())?
                .with_structure(phi, new_xi, new_eta)
                .into()
        }
    };
    if let ManifoldModel::Chart(c) = &model {
        let sampler = Sampler::new(DEFAULT_SEED, DEFAULT_POINTS);
        for i in 0..sampler.count {
            let p = model.sample_point(&mut sampler.rng(i));
            if !usable_metric(&c.metric_values(&p), dim) {
                return Err(GeometryError::MetricSignature(format!("{name} at {p:?}")));
            }
        }
    }
    let out = ApcpcStructure::new(model)?;
    match (s.base(), d.constants()) {
        (Some(base), Some((u, v, w))) if v == 0.0 && w == 0.0 => Ok(out.with_base(base.scaled((2.0 * u).exp())?)),
        _ => Ok(out),
    }
}
