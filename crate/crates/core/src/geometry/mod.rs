//! Connection and curvature at a point.
//!
//! Both backends are reduced to the same local data: a frame `e_a` (the
//! coordinate frame of a chart, or the left-invariant frame of a Lie model)
//! together with the metric components, their first and second frame
//! derivatives and the bracket coefficients `[e_i, e_j] = c^k_ij e_k`.
//! Everything downstream (Christoffel symbols, curvature, covariant
//! derivatives of the structure tensors) is computed from this data by the
//! same formulas, so the two backends can be compared directly.

mod model;

pub use model::{
    is_positive_definite, ChartModel, FieldSource, LieFrameModel, LieModelDocument,
    ManifoldModel, TensorField,
};

use crate::error::{GeometryError, Result};
use crate::jet::Jet;
use crate::tensor::{bilinear, gram_schmidt, invert_matrix, mat_vec, Slot, TensorValue};

/// Values and frame derivatives of φ, ξ, η at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureData {
    /// `phi[k*d+j] = φ^k_j`
    pub phi: Vec<f64>,
    /// `dphi[(a*d+k)*d+j] = e_a(φ^k_j)`
    pub dphi: Vec<f64>,
    pub xi: Vec<f64>,
    /// `dxi[a*d+k] = e_a(ξ^k)`
    pub dxi: Vec<f64>,
    pub eta: Vec<f64>,
    /// `deta[a*d+j] = e_a(η_j)`
    pub deta: Vec<f64>,
}

/// Metric jets and brackets of a frame at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFrame {
    pub dim: usize,
    pub frame_id: String,
    pub g: Vec<f64>,
    /// `dg[(a*d+i)*d+j] = e_a(g_ij)`
    pub dg: Vec<f64>,
    /// `ddg[((a*d+b)*d+i)*d+j] = e_a e_b (g_ij)`
    pub ddg: Vec<f64>,
    /// `c[(k*d+i)*d+j] = c^k_ij`
    pub c: Vec<f64>,
    pub structure: Option<StructureData>,
}

fn jets_to_value_grad(jets: &[Jet], d: usize) -> (Vec<f64>, Vec<f64>) {
    let m = jets.len();
    let mut val = Vec::with_capacity(m);
    let mut grad = vec![0.0; d * m];
    for (idx, j) in jets.iter().enumerate() {
        val.push(j.value);
        for a in 0..d {
            grad[a * m + idx] = j.d(a);
        }
    }
    (val, grad)
}

impl LocalFrame {
    pub fn evaluate(model: &ManifoldModel, p: &[f64]) -> Result<LocalFrame> {
        let d = model.dim();
        if p.len() != d {
            return Err(GeometryError::Shape(format!(
                "point has {} coordinates, model dim {}",
                p.len(),
                d
            )));
        }
        match model {
            ManifoldModel::Lie(m) => {
                let structure = match (m.phi(), m.xi(), m.eta()) {
                    (Some(phi), Some(xi), Some(eta)) => Some(StructureData {
                        phi: phi.to_vec(),
                        dphi: vec![0.0; d * d * d],
                        xi: xi.to_vec(),
                        dxi: vec![0.0; d * d],
                        eta: eta.to_vec(),
                        deta: vec![0.0; d * d],
                    }),
                    _ => None,
                };
                Ok(LocalFrame {
                    dim: d,
                    frame_id: model.frame_id(),
                    g: m.metric().to_vec(),
                    dg: vec![0.0; d * d * d],
                    ddg: vec![0.0; d * d * d * d],
                    c: m.structure_constants().to_vec(),
                    structure,
                })
            }
            ManifoldModel::Chart(m) => {
                let seeded = Jet::seed(p);
                let gj = (m.metric_field())(&seeded);
                if gj.len() != d * d {
                    return Err(GeometryError::Shape("metric field returned wrong length".into()));
                }
                let mut g = vec![0.0; d * d];
                let mut dg = vec![0.0; d * d * d];
                let mut ddg = vec![0.0; d * d * d * d];
                for i in 0..d {
                    for j in 0..d {
                        // symmetrize so tiny asymmetries in user closures do not leak
                        let (x, y) = (&gj[i * d + j], &gj[j * d + i]);
                        g[i * d + j] = 0.5 * (x.value + y.value);
                        for a in 0..d {
                            dg[(a * d + i) * d + j] = 0.5 * (x.d(a) + y.d(a));
                            for b in 0..d {
                                ddg[((a * d + b) * d + i) * d + j] = 0.5 * (x.dd(a, b) + y.dd(a, b));
                            }
                        }
                    }
                }
                let structure = match (m.phi_field(), m.xi_field(), m.eta_field()) {
                    (Some(phi), Some(xi), Some(eta)) => {
                        let (phi, dphi) = jets_to_value_grad(&phi(&seeded), d);
                        let (xi, dxi) = jets_to_value_grad(&xi(&seeded), d);
                        let (eta, deta) = jets_to_value_grad(&eta(&seeded), d);
                        if phi.len() != d * d || xi.len() != d || eta.len() != d {
                            return Err(GeometryError::Shape("structure field returned wrong length".into()));
                        }
                        Some(StructureData { phi, dphi, xi, dxi, eta, deta })
                    }
                    _ => None,
                };
                Ok(LocalFrame {
                    dim: d,
                    frame_id: model.frame_id(),
                    g,
                    dg,
                    ddg,
                    c: vec![0.0; d * d * d],
                    structure,
                })
            }
        }
    }
}

/// Connection, curvature and structure derivatives at one point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub point: Vec<f64>,
    frame: LocalFrame,
    g_inv: Vec<f64>,
    gamma: Vec<f64>,
    dgamma: Vec<f64>,
    // R^l_ijk at ((l*d+i)*d+j)*d+k, with R(e_i,e_j)e_k = R^l_ijk e_l
    curv: Vec<f64>,
    // R(e_i,e_j,e_k,e_l)
    riem: Vec<f64>,
    ric: Vec<f64>,
}

impl PointGeometry {
    pub fn at(model: &ManifoldModel, p: &[f64]) -> Result<PointGeometry> {
        let frame = LocalFrame::evaluate(model, p)?;
        PointGeometry::from_frame(frame, p.to_vec())
    }

    pub fn from_frame(frame: LocalFrame, point: Vec<f64>) -> Result<PointGeometry> {
        let d = frame.dim;
        let g_inv = invert_matrix(&frame.g, d)?;
        let (g, dg, ddg, c) = (&frame.g, &frame.dg, &frame.ddg, &frame.c);
        let i3 = |a: usize, b: usize, e: usize| (a * d + b) * d + e;
        let i4 = |a: usize, b: usize, e: usize, f: usize| ((a * d + b) * d + e) * d + f;

        // Koszul formula, first kind: L[k][i][j] = g(∇_{e_i} e_j, e_k)
        let mut cg = vec![0.0; d * d * d]; // cg[i][j][k] = g([e_i,e_j], e_k)
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    cg[i3(i, j, k)] = (0..d).map(|l| c[i3(l, i, j)] * g[l * d + k]).sum();
                }
            }
        }
        let mut big_l = vec![0.0; d * d * d];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    big_l[i3(k, i, j)] = 0.5
                        * (dg[i3(i, j, k)] + dg[i3(j, k, i)] - dg[i3(k, i, j)]
                            + cg[i3(i, j, k)]
                            + cg[i3(k, i, j)]
                            + cg[i3(k, j, i)]);
                }
            }
        }
        // e_a of the same expression
        let mut dl = vec![0.0; d * d * d * d];
        for a in 0..d {
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let mut s = ddg[i4(a, i, j, k)] + ddg[i4(a, j, k, i)] - ddg[i4(a, k, i, j)];
                        for l in 0..d {
                            s += c[i3(l, i, j)] * dg[i3(a, l, k)]
                                + c[i3(l, k, i)] * dg[i3(a, l, j)]
                                + c[i3(l, k, j)] * dg[i3(a, l, i)];
                        }
                        dl[i4(a, k, i, j)] = 0.5 * s;
                    }
                }
            }
        }
        let mut gamma = vec![0.0; d * d * d];
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    gamma[i3(l, i, j)] = (0..d).map(|k| g_inv[l * d + k] * big_l[i3(k, i, j)]).sum();
                }
            }
        }
        // e_a(g^{-1}) = -g^{-1} (e_a g) g^{-1}
        let mut dginv = vec![0.0; d * d * d];
        for a in 0..d {
            let mut tmp = vec![0.0; d * d];
            for p in 0..d {
                for k in 0..d {
                    tmp[p * d + k] = (0..d).map(|q| dg[i3(a, p, q)] * g_inv[q * d + k]).sum();
                }
            }
            for l in 0..d {
                for k in 0..d {
                    dginv[i3(a, l, k)] = -(0..d).map(|p| g_inv[l * d + p] * tmp[p * d + k]).sum::<f64>();
                }
            }
        }
        let mut dgamma = vec![0.0; d * d * d * d];
        for a in 0..d {
            for l in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let mut s = 0.0;
                        for k in 0..d {
                            s += dginv[i3(a, l, k)] * big_l[i3(k, i, j)] + g_inv[l * d + k] * dl[i4(a, k, i, j)];
                        }
                        dgamma[i4(a, l, i, j)] = s;
                    }
                }
            }
        }
        let mut curv = vec![0.0; d * d * d * d];
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let mut s = dgamma[i4(i, l, j, k)] - dgamma[i4(j, l, i, k)];
                        for m in 0..d {
                            s += gamma[i3(m, j, k)] * gamma[i3(l, i, m)]
                                - gamma[i3(m, i, k)] * gamma[i3(l, j, m)]
                                - c[i3(m, i, j)] * gamma[i3(l, m, k)];
                        }
                        curv[i4(l, i, j, k)] = s;
                    }
                }
            }
        }
        let mut riem = vec![0.0; d * d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        riem[i4(i, j, k, l)] = (0..d).map(|p| curv[i4(p, i, j, k)] * g[p * d + l]).sum();
                    }
                }
            }
        }
        let mut ric = vec![0.0; d * d];
        for j in 0..d {
            for k in 0..d {
                ric[j * d + k] = (0..d).map(|i| curv[i4(i, i, j, k)]).sum();
            }
        }
        Ok(PointGeometry { point, frame, g_inv, gamma, dgamma, curv, riem, ric })
    }

    pub fn dim(&self) -> usize {
        self.frame.dim
    }

    pub fn frame(&self) -> &LocalFrame {
        &self.frame
    }

    pub fn frame_id(&self) -> &str {
        &self.frame.frame_id
    }

    pub fn metric(&self) -> &[f64] {
        &self.frame.g
    }

    pub fn metric_inverse(&self) -> &[f64] {
        &self.g_inv
    }

    pub fn g(&self, x: &[f64], y: &[f64]) -> f64 {
        bilinear(&self.frame.g, x, y)
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.g(x, x).max(0.0).sqrt()
    }

    /// `g(x, ·)` as covector components.
    pub fn lower(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.frame.g, x)
    }

    pub fn raise(&self, w: &[f64]) -> Vec<f64> {
        mat_vec(&self.g_inv, w)
    }

    /// Γ^l_ij with `∇_{e_i} e_j = Γ^l_ij e_l`.
    pub fn gamma(&self, l: usize, i: usize, j: usize) -> f64 {
        let d = self.dim();
        self.gamma[(l * d + i) * d + j]
    }

    /// `e_a(Γ^l_ij)`.
    pub fn dgamma(&self, a: usize, l: usize, i: usize, j: usize) -> f64 {
        let d = self.dim();
        self.dgamma[((a * d + l) * d + i) * d + j]
    }

    /// Components of `R(e_i,e_j)e_k` along `e_l`.
    pub fn curvature_component(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        let d = self.dim();
        self.curv[((l * d + i) * d + j) * d + k]
    }

    /// Bracket coefficient `c^k_ij` of the frame.
    pub fn bracket_coeff(&self, k: usize, i: usize, j: usize) -> f64 {
        let d = self.dim();
        self.frame.c[(k * d + i) * d + j]
    }

    /// `[x, y]` for constant-coefficient vectors in the frame.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += xy * self.bracket_coeff(k, i, j);
                }
            }
        }
        out
    }

    /// `∇_x y` for `y` with frame components `y` and frame derivatives
    /// `dy[a][l] = e_a(y^l)`; pass `None` for constant components.
    pub fn nabla(&self, x: &[f64], y: &[f64], dy: Option<&[Vec<f64>]>) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for a in 0..d {
            if x[a] == 0.0 {
                continue;
            }
            for (l, o) in out.iter_mut().enumerate() {
                let mut s = dy.map_or(0.0, |dy| dy[a][l]);
                for i in 0..d {
                    s += self.gamma(l, a, i) * y[i];
                }
                *o += x[a] * s;
            }
        }
        out
    }

    /// `R(x,y)z`.
    pub fn curvature(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..d {
                    let c = xy * z[k];
                    if c == 0.0 {
                        continue;
                    }
                    for (l, o) in out.iter_mut().enumerate() {
                        *o += c * self.curvature_component(l, i, j, k);
                    }
                }
            }
        }
        out
    }

    /// `R(x,y,z,w) = g(R(x,y)z, w)`.
    pub fn riemann4(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        self.g(&self.curvature(x, y, z), w)
    }

    pub fn ricci(&self, x: &[f64], y: &[f64]) -> f64 {
        bilinear(&self.ric, x, y)
    }

    pub fn ricci_matrix(&self) -> &[f64] {
        &self.ric
    }

    pub fn scalar(&self) -> f64 {
        let d = self.dim();
        (0..d * d).map(|k| self.g_inv[k] * self.ric[k]).sum()
    }

    /// `Σ Ric(e_i, φ e_i)` over an orthonormal basis.
    pub fn scalar_star(&self) -> Result<f64> {
        let d = self.dim();
        let s = self.structure()?;
        let mut total = 0.0;
        for i in 0..d {
            for j in 0..d {
                let gij = self.g_inv[i * d + j];
                if gij == 0.0 {
                    continue;
                }
                for k in 0..d {
                    total += gij * self.ric[i * d + k] * s.phi[k * d + j];
                }
            }
        }
        Ok(total)
    }

    pub fn metric_tensor(&self) -> TensorValue {
        let d = self.dim();
        TensorValue::new(d, vec![Slot::Lower; 2], self.frame.g.clone(), self.frame_id().to_string())
            .expect("metric shape")
    }

    pub fn christoffel_tensor(&self) -> TensorValue {
        let d = self.dim();
        TensorValue::new(
            d,
            vec![Slot::Upper, Slot::Lower, Slot::Lower],
            self.gamma.clone(),
            self.frame_id().to_string(),
        )
        .expect("christoffel shape")
    }

    pub fn riemann_tensor(&self) -> TensorValue {
        let d = self.dim();
        TensorValue::new(d, vec![Slot::Lower; 4], self.riem.clone(), self.frame_id().to_string())
            .expect("riemann shape")
    }

    pub fn ricci_tensor(&self) -> TensorValue {
        let d = self.dim();
        TensorValue::new(d, vec![Slot::Lower; 2], self.ric.clone(), self.frame_id().to_string())
            .expect("ricci shape")
    }

    /// g-orthonormal basis obtained from the frame by pivoted Gram–Schmidt.
    pub fn orthonormal_basis(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let cands: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect())
            .collect();
        gram_schmidt(&self.frame.g, &cands, d)
    }

    pub fn structure(&self) -> Result<&StructureData> {
        self.frame
            .structure
            .as_ref()
            .ok_or_else(|| GeometryError::Precondition("model carries no structure (φ, ξ, η)".into()))
    }

    /// Covariant derivative `∇T` of a tensor with components `value`
    /// and frame derivatives `deriv[a] = e_a(T)`. The new slot is first.
    pub fn covariant_derivative_of(&self, value: &TensorValue, deriv: Option<&[Vec<f64>]>) -> TensorValue {
        let d = self.dim();
        let rank = value.rank();
        let mut variance = vec![Slot::Lower];
        variance.extend_from_slice(value.variance());
        let mut out = TensorValue::zeros(d, variance, self.frame_id().to_string());
        let size = value.components().len();
        for a in 0..d {
            for k in 0..size {
                let idx = value.unravel(k);
                let mut s = deriv.map_or(0.0, |dv| dv[a][k]);
                for slot in 0..rank {
                    let mut moved = idx.clone();
                    for l in 0..d {
                        moved[slot] = l;
                        let t = value.get(&moved);
                        if t == 0.0 {
                            continue;
                        }
                        match value.variance()[slot] {
                            Slot::Upper => s += self.gamma(idx[slot], a, l) * t,
                            Slot::Lower => s -= self.gamma(l, a, idx[slot]) * t,
                        }
                    }
                }
                out.components_mut()[a * size + k] = s;
            }
        }
        out
    }

    /// Covariant derivative of a field defined on `model`.
    pub fn covariant_derivative(&self, model: &ManifoldModel, field: &TensorField) -> Result<TensorValue> {
        let d = self.dim();
        let size = d.pow(field.variance.len() as u32);
        match &field.source {
            FieldSource::Constant(comps) => {
                let v = TensorValue::new(d, field.variance.clone(), comps.clone(), self.frame_id().to_string())?;
                Ok(self.covariant_derivative_of(&v, None))
            }
            FieldSource::Jets(map) => {
                if model.as_chart().is_none() {
                    return Err(GeometryError::Backend(
                        "coordinate-dependent fields need a chart model".into(),
                    ));
                }
                let jets = map(&Jet::seed(&self.point));
                if jets.len() != size {
                    return Err(GeometryError::Shape(format!(
                        "field returned {} components, expected {size}",
                        jets.len()
                    )));
                }
                let v = TensorValue::new(
                    d,
                    field.variance.clone(),
                    jets.iter().map(|j| j.value).collect(),
                    self.frame_id().to_string(),
                )?;
                let deriv: Vec<Vec<f64>> = (0..d).map(|a| jets.iter().map(|j| j.d(a)).collect()).collect();
                Ok(self.covariant_derivative_of(&v, Some(&deriv)))
            }
        }
    }
}

/// Connection and curvature of `model` at `p` as tensors.
pub fn christoffel(model: &ManifoldModel, p: &[f64]) -> Result<TensorValue> {
    Ok(PointGeometry::at(model, p)?.christoffel_tensor())
}

pub fn riemann(model: &ManifoldModel, p: &[f64]) -> Result<TensorValue> {
    Ok(PointGeometry::at(model, p)?.riemann_tensor())
}

pub fn ricci(model: &ManifoldModel, p: &[f64]) -> Result<TensorValue> {
    Ok(PointGeometry::at(model, p)?.ricci_tensor())
}

pub fn scalar(model: &ManifoldModel, p: &[f64]) -> Result<f64> {
    Ok(PointGeometry::at(model, p)?.scalar())
}

pub fn covariant_derivative(model: &ManifoldModel, p: &[f64], field: &TensorField) -> Result<TensorValue> {
    PointGeometry::at(model, p)?.covariant_derivative(model, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::kulkarni_nomizu;
    use std::sync::Arc;

    fn sphere2() -> ManifoldModel {
        ChartModel::new(
            "s2",
            2,
            Arc::new(|x: &[Jet]| {
                let s = x[0].sin();
                vec![x[0].cst(1.0), x[0].cst(0.0), x[0].cst(0.0), s.square()]
            }),
            vec![(0.3, 2.8), (-3.0, 3.0)],
        )
        .unwrap()
        .into()
    }

    fn flat(d: usize) -> ManifoldModel {
        ChartModel::new(
            "flat",
            d,
            Arc::new(move |x: &[Jet]| {
                let mut m = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        m.push(x[0].cst(if i == j { 1.0 } else { 0.0 }));
                    }
                }
                m
            }),
            vec![(-1.0, 1.0); d],
        )
        .unwrap()
        .into()
    }

    #[test]
    fn flat_chart_has_no_connection_or_curvature() {
        let pg = PointGeometry::at(&flat(3), &[0.1, 0.2, -0.3]).unwrap();
        assert_eq!(pg.christoffel_tensor().max_abs(), 0.0);
        assert_eq!(pg.riemann_tensor().max_abs(), 0.0);
        assert_eq!(pg.scalar(), 0.0);
    }

    #[test]
    fn sphere_christoffel_against_finite_differences() {
        let m = sphere2();
        let p = [std::f64::consts::PI / 3.0, 0.4];
        let pg = PointGeometry::at(&m, &p).unwrap();
        let th = p[0];
        assert!((pg.gamma(0, 1, 1) + th.sin() * th.cos()).abs() < 1e-14);

        // independent oracle: Γ from central differences of the metric
        let chart = m.as_chart().unwrap();
        let h = 1e-5;
        let dgfd = |a: usize| {
            let mut pp = p;
            let mut pm = p;
            pp[a] += h;
            pm[a] -= h;
            let gp = chart.metric_values(&pp);
            let gm = chart.metric_values(&pm);
            gp.iter().zip(&gm).map(|(x, y)| (x - y) / (2.0 * h)).collect::<Vec<_>>()
        };
        let dg = [dgfd(0), dgfd(1)];
        let g = chart.metric_values(&p);
        let ginv = invert_matrix(&g, 2).unwrap();
        for l in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for k in 0..2 {
                        s += 0.5 * ginv[l * 2 + k] * (dg[i][j * 2 + k] + dg[j][i * 2 + k] - dg[k][i * 2 + j]);
                    }
                    assert!((pg.gamma(l, i, j) - s).abs() < 1e-8, "Γ^{l}_{i}{j}");
                }
            }
        }
    }

    #[test]
    fn sphere_riemann_is_constant_curvature() {
        let pg = PointGeometry::at(&sphere2(), &[1.1, 0.3]).unwrap();
        let g = pg.metric_tensor();
        let expected = kulkarni_nomizu(&g, &g).unwrap().scaled(0.5);
        assert!(pg.riemann_tensor().max_abs_diff(&expected).unwrap() < 1e-12);
        // Ric = g via raise slot 0 and contract with slot 3
        let gi = TensorValue::new(2, vec![Slot::Upper; 2], pg.metric_inverse().to_vec(), pg.frame_id()).unwrap();
        let ric = pg.riemann_tensor().raise_index(0, &gi).unwrap().contract(0, 3).unwrap();
        assert!(ric.max_abs_diff(&g).unwrap() < 1e-12);
        assert!((pg.scalar() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn metric_is_parallel() {
        let m = sphere2();
        let pg = PointGeometry::at(&m, &[0.9, 0.1]).unwrap();
        let gfield = TensorField::from_fn(vec![Slot::Lower; 2], |x: &[Jet]| {
            let s = x[0].sin();
            vec![x[0].cst(1.0), x[0].cst(0.0), x[0].cst(0.0), s.square()]
        });
        let ng = pg.covariant_derivative(&m, &gfield).unwrap();
        assert!(ng.max_abs() < 1e-12);
    }

    #[test]
    fn lie_frame_connection_is_metric_and_has_bracket_torsion() {
        // Heisenberg group with an off-diagonal metric
        let g = vec![2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 1.5];
        let m: ManifoldModel = LieFrameModel::new("heis", 3, &[(0, 1, 2, 1.0)], g.clone()).unwrap().into();
        let pg = PointGeometry::at(&m, &[0.0; 3]).unwrap();
        let ng = pg.covariant_derivative(&m, &TensorField::constant(vec![Slot::Lower; 2], g)).unwrap();
        assert!(ng.max_abs() < 1e-14);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let t = pg.gamma(k, i, j) - pg.gamma(k, j, i) - pg.bracket_coeff(k, i, j);
                    assert!(t.abs() < 1e-14);
                }
            }
        }
        let res = crate::tensor::curvature_symmetry_residuals(&pg.riemann_tensor());
        assert!(res.iter().all(|r| *r < 1e-13), "{res:?}");
        assert!(pg.ricci_tensor().asymmetry(0, 1).unwrap() < 1e-13);
    }

    #[test]
    fn jet_fields_rejected_on_lie_models() {
        let id = vec![1.0, 0.0, 0.0, 1.0];
        let m: ManifoldModel = LieFrameModel::new("ab", 2, &[], id).unwrap().into();
        let pg = PointGeometry::at(&m, &[0.0; 2]).unwrap();
        let f = TensorField::from_fn(vec![Slot::Upper], |x: &[Jet]| x.to_vec());
        assert!(matches!(pg.covariant_derivative(&m, &f), Err(GeometryError::Backend(_))));
    }
}
