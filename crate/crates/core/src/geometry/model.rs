use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::jet::{Jet, JetMap};
use crate::tensor::Slot;

/// A left-invariant description: structure constants of a frame
/// `[e_i, e_j] = c^k_ij e_k` plus constant frame components of the metric
/// and (optionally) of the structure tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct LieFrameModel {
    name: String,
    dim: usize,
    // c[(k*dim + i)*dim + j] = c^k_ij
    structure_constants: Vec<f64>,
    metric: Vec<f64>,
    phi: Option<Vec<f64>>,
    xi: Option<Vec<f64>>,
    eta: Option<Vec<f64>>,
}

/// JSON form of a [`LieFrameModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LieModelDocument {
    pub dim: usize,
    /// Entries `[i, j, k, value]` meaning `[e_i, e_j] = ... + value e_k`.
    pub c: Vec<(usize, usize, usize, f64)>,
    pub g: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
}

impl LieFrameModel {
    /// Builds a model from brackets `(i, j, k, value)`; the antisymmetric
    /// partner of every entry is filled in.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        brackets: &[(usize, usize, usize, f64)],
        metric: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(GeometryError::Dimension("dimension must be positive".into()));
        }
        if metric.len() != dim * dim {
            return Err(GeometryError::Shape(format!(
                "metric has {} entries, expected {}",
                metric.len(),
                dim * dim
            )));
        }
        let mut c = vec![0.0; dim * dim * dim];
        let mut seen = vec![false; dim * dim * dim];
        for &(i, j, k, v) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(GeometryError::Model(format!("bracket index ({i},{j},{k}) out of range")));
            }
            if i == j && v != 0.0 {
                return Err(GeometryError::Model(format!("[e_{i}, e_{i}] must vanish")));
            }
            let a = (k * dim + i) * dim + j;
            let b = (k * dim + j) * dim + i;
            if (seen[a] && c[a] != v) || (seen[b] && c[b] != -v) {
                return Err(GeometryError::Model(format!(
                    "inconsistent entries for c^{k}_{{{i}{j}}}"
                )));
            }
            c[a] = v;
            c[b] = -v;
            seen[a] = true;
            seen[b] = true;
        }
        let model = LieFrameModel {
            name: name.into(),
            dim,
            structure_constants: c,
            metric,
            phi: None,
            xi: None,
            eta: None,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                if (self.metric[i * d + j] - self.metric[j * d + i]).abs() > 1e-14 {
                    return Err(GeometryError::Model("frame metric not symmetric".into()));
                }
            }
        }
        if !is_positive_definite(&self.metric, d) {
            return Err(GeometryError::Model("frame metric not positive definite".into()));
        }
        let jac = self.jacobi_residual();
        if jac > 1e-12 {
            return Err(GeometryError::Model(format!("Jacobi identity violated ({jac:.3e})")));
        }
        Ok(())
    }

    /// Largest component of `[e_i,[e_j,e_k]] + cyclic`.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        let c = |k: usize, i: usize, j: usize| self.structure_constants[(k * d + i) * d + j];
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for m in 0..d {
                        let mut s = 0.0;
                        for l in 0..d {
                            s += c(l, j, k) * c(m, i, l) + c(l, k, i) * c(m, j, l) + c(l, i, j) * c(m, k, l);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Attaches constant frame components of φ (row-major, `phi[k*dim+j] = φ^k_j`), ξ and η.
    pub fn with_structure(mut self, phi: Vec<f64>, xi: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        let d = self.dim;
        if phi.len() != d * d || xi.len() != d || eta.len() != d {
            return Err(GeometryError::Shape("structure components have wrong length".into()));
        }
        self.phi = Some(phi);
        self.xi = Some(xi);
        self.eta = Some(eta);
        Ok(self)
    }

    pub fn from_document(name: impl Into<String>, doc: &LieModelDocument) -> Result<Self> {
        let d = doc.dim;
        let flat = |rows: &Vec<Vec<f64>>, what: &str| -> Result<Vec<f64>> {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(GeometryError::Model(format!("'{what}' must be a {d}x{d} matrix")));
            }
            Ok(rows.iter().flatten().copied().collect())
        };
        let model = LieFrameModel::new(name, d, &doc.c, flat(&doc.g, "g")?)?;
        match (&doc.phi, &doc.xi, &doc.eta) {
            (Some(phi), Some(xi), Some(eta)) => model.with_structure(flat(phi, "phi")?, xi.clone(), eta.clone()),
            (None, None, None) => Ok(model),
            _ => Err(GeometryError::Model("'phi', 'xi' and 'eta' must be given together".into())),
        }
    }

    pub fn from_json(name: impl Into<String>, text: &str) -> Result<Self> {
        let doc: LieModelDocument =
            serde_json::from_str(text).map_err(|e| GeometryError::Model(e.to_string()))?;
        LieFrameModel::from_document(name, &doc)
    }

    pub fn to_document(&self) -> LieModelDocument {
        let d = self.dim;
        let rows = |m: &[f64]| m.chunks(d).map(|r| r.to_vec()).collect::<Vec<_>>();
        let mut c = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                for k in 0..d {
                    let v = self.structure_constants[(k * d + i) * d + j];
                    if v != 0.0 {
                        c.push((i, j, k, v));
                    }
                }
            }
        }
        LieModelDocument {
            dim: d,
            c,
            g: rows(&self.metric),
            phi: self.phi.as_deref().map(rows),
            xi: self.xi.clone(),
            eta: self.eta.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constants(&self) -> &[f64] {
        &self.structure_constants
    }

    pub fn metric(&self) -> &[f64] {
        &self.metric
    }

    pub fn phi(&self) -> Option<&[f64]> {
        self.phi.as_deref()
    }

    pub fn xi(&self) -> Option<&[f64]> {
        self.xi.as_deref()
    }

    pub fn eta(&self) -> Option<&[f64]> {
        self.eta.as_deref()
    }

    /// Same frame and brackets with replaced metric and structure components.
    pub fn with_metric(&self, name: impl Into<String>, metric: Vec<f64>) -> Result<Self> {
        let mut m = self.clone();
        m.name = name.into();
        m.metric = metric;
        m.validate()?;
        Ok(m)
    }

    /// Components of `[e_i, e_j]`.
    pub fn bracket(&self, i: usize, j: usize) -> Vec<f64> {
        let d = self.dim;
        (0..d).map(|k| self.structure_constants[(k * d + i) * d + j]).collect()
    }
}

/// A coordinate chart: metric and optional structure fields given as
/// jet-evaluable maps of the coordinates, plus a box to sample points from.
#[derive(Clone)]
pub struct ChartModel {
    name: String,
    dim: usize,
    metric: JetMap,
    phi: Option<JetMap>,
    xi: Option<JetMap>,
    eta: Option<JetMap>,
    domain: Vec<(f64, f64)>,
}

impl fmt::Debug for ChartModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("structure", &self.phi.is_some())
            .field("domain", &self.domain)
            .finish()
    }
}

impl ChartModel {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        metric: JetMap,
        domain: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(GeometryError::Dimension("dimension must be positive".into()));
        }
        if domain.len() != dim {
            return Err(GeometryError::Shape(format!(
                "sample domain has {} intervals for dim {}",
                domain.len(),
                dim
            )));
        }
        Ok(ChartModel {
            name: name.into(),
            dim,
            metric,
            phi: None,
            xi: None,
            eta: None,
            domain,
        })
    }

    /// Attaches φ (row-major `φ^k_j`), ξ and η as jet fields.
    pub fn with_structure(mut self, phi: JetMap, xi: JetMap, eta: JetMap) -> Self {
        self.phi = Some(phi);
        self.xi = Some(xi);
        self.eta = Some(eta);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Self {
        assert_eq!(domain.len(), self.dim);
        self.domain = domain;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn metric_field(&self) -> &JetMap {
        &self.metric
    }

    pub fn phi_field(&self) -> Option<&JetMap> {
        self.phi.as_ref()
    }

    pub fn xi_field(&self) -> Option<&JetMap> {
        self.xi.as_ref()
    }

    pub fn eta_field(&self) -> Option<&JetMap> {
        self.eta.as_ref()
    }

    pub fn has_structure(&self) -> bool {
        self.phi.is_some() && self.xi.is_some() && self.eta.is_some()
    }

    /// Metric components at `p` as jets.
    pub fn metric_jets(&self, p: &[f64]) -> Vec<Jet> {
        (self.metric)(&Jet::seed(p))
    }

    /// Metric values only (no derivatives); used by finite-difference oracles.
    pub fn metric_values(&self, p: &[f64]) -> Vec<f64> {
        self.metric_jets(p).into_iter().map(|j| j.value).collect()
    }
}

#[derive(Clone, Debug)]
pub enum ManifoldModel {
    Lie(LieFrameModel),
    Chart(ChartModel),
}

impl From<LieFrameModel> for ManifoldModel {
    fn from(m: LieFrameModel) -> Self {
        ManifoldModel::Lie(m)
    }
}

impl From<ChartModel> for ManifoldModel {
    fn from(m: ChartModel) -> Self {
        ManifoldModel::Chart(m)
    }
}

impl ManifoldModel {
    pub fn dim(&self) -> usize {
        match self {
            ManifoldModel::Lie(m) => m.dim(),
            ManifoldModel::Chart(m) => m.dim(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ManifoldModel::Lie(m) => m.name(),
            ManifoldModel::Chart(m) => m.name(),
        }
    }

    pub fn frame_id(&self) -> String {
        match self {
            ManifoldModel::Lie(m) => format!("lie:{}", m.name()),
            ManifoldModel::Chart(m) => format!("chart:{}", m.name()),
        }
    }

    pub fn has_structure(&self) -> bool {
        match self {
            ManifoldModel::Lie(m) => m.phi.is_some(),
            ManifoldModel::Chart(m) => m.has_structure(),
        }
    }

    pub fn as_chart(&self) -> Option<&ChartModel> {
        match self {
            ManifoldModel::Chart(c) => Some(c),
            ManifoldModel::Lie(_) => None,
        }
    }

    pub fn as_lie(&self) -> Option<&LieFrameModel> {
        match self {
            ManifoldModel::Lie(l) => Some(l),
            ManifoldModel::Chart(_) => None,
        }
    }

    /// A random point of the sample domain. Lie models are homogeneous, so
    /// their points are all the identity.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            ManifoldModel::Lie(m) => vec![0.0; m.dim()],
            ManifoldModel::Chart(m) => m
                .domain()
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                .collect(),
        }
    }
}

/// Source of a tensor field's components.
#[derive(Clone)]
pub enum FieldSource {
    /// Constant components in the model's frame.
    Constant(Vec<f64>),
    /// Chart components as jets of the coordinates.
    Jets(JetMap),
}

/// A tensor field of fixed variance, for covariant differentiation.
#[derive(Clone)]
pub struct TensorField {
    pub variance: Vec<Slot>,
    pub source: FieldSource,
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let source = match &self.source {
            FieldSource::Constant(c) => format!("constant{c:?}"),
            FieldSource::Jets(_) => "jets".to_string(),
        };
        f.debug_struct("TensorField").field("variance", &self.variance).field("source", &source).finish()
    }
}

impl TensorField {
    pub fn constant(variance: Vec<Slot>, components: Vec<f64>) -> Self {
        TensorField { variance, source: FieldSource::Constant(components) }
    }

    pub fn jets(variance: Vec<Slot>, map: JetMap) -> Self {
        TensorField { variance, source: FieldSource::Jets(map) }
    }

    /// Builds a field from a closure over coordinate jets.
    pub fn from_fn(
        variance: Vec<Slot>,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        TensorField::jets(variance, Arc::new(f))
    }
}

/// Cholesky-based positive definiteness test for a small symmetric matrix.
pub fn is_positive_definite(m: &[f64], d: usize) -> bool {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = m[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg() -> LieFrameModel {
        let id = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        LieFrameModel::new("heis", 3, &[(0, 1, 2, 1.0)], id).unwrap()
    }

    #[test]
    fn brackets_are_antisymmetric() {
        let m = heisenberg();
        assert_eq!(m.bracket(0, 1), vec![0.0, 0.0, 1.0]);
        assert_eq!(m.bracket(1, 0), vec![0.0, 0.0, -1.0]);
        assert_eq!(m.jacobi_residual(), 0.0);
    }

    #[test]
    fn jacobi_violation_rejected() {
        // so(3)-like brackets with a broken sign
        let id = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let err = LieFrameModel::new(
            "bad",
            3,
            &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (0, 1, 0, 1.0)],
            id,
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::Model(_)));
    }

    #[test]
    fn indefinite_metric_rejected() {
        let g = vec![1.0, 0.0, 0.0, -1.0];
        assert!(LieFrameModel::new("x", 2, &[], g).is_err());
    }

    #[test]
    fn json_document_round_trip() {
        let text = r#"{"dim":3,"c":[[0,1,2,1.0]],"g":[[1,0,0],[0,1,0],[0,0,1]],
            "phi":[[0,0,0],[0,0,1],[0,1,0]],"xi":[1,0,0],"eta":[1,0,0]}"#;
        let m = LieFrameModel::from_json("heis", text).unwrap();
        assert_eq!(m.bracket(1, 0)[2], -1.0);
        assert_eq!(m.phi().unwrap()[5], 1.0);
        let back = serde_json::to_string(&m.to_document()).unwrap();
        let m2 = LieFrameModel::from_json("heis", &back).unwrap();
        assert_eq!(m, m2);
    }

    #[test]
    fn json_partial_structure_rejected() {
        let text = r#"{"dim":1,"c":[],"g":[[1]],"xi":[1]}"#;
        assert!(LieFrameModel::from_json("x", text).is_err());
    }

    #[test]
    fn json_inconsistent_brackets_rejected() {
        let text = r#"{"dim":2,"c":[[0,1,1,1.0],[1,0,1,1.0]],"g":[[1,0],[0,1]]}"#;
        assert!(LieFrameModel::from_json("x", text).is_err());
    }
}
