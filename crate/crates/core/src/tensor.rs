//! Dense tensors at a point.
//!
//! A [`TensorValue`] stores the components of a multi-index object in a
//! single row-major array of length `dim^rank`, together with the kind of
//! each slot and the identifier of the frame its components refer to. Every
//! object the engine manipulates at a point (metric, structure tensors,
//! curvature, Ricci) is one of these.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// Whether a slot transforms as a vector (upper) or a covector (lower).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Upper,
    Lower,
}

impl Slot {
    pub fn flipped(self) -> Slot {
        match self {
            Slot::Upper => Slot::Lower,
            Slot::Lower => Slot::Upper,
        }
    }
}

/// Relative-plus-absolute comparison: `|a-b| <= atol + rtol*max(|a|,|b|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { atol: 1e-9, rtol: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(atol: f64, rtol: f64) -> Self {
        Tolerance { atol, rtol }
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.atol + self.rtol * a.abs().max(b.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorValue {
    dim: usize,
    variance: Vec<Slot>,
    components: Vec<f64>,
    frame_id: String,
}

impl TensorValue {
    pub fn new(
        dim: usize,
        variance: Vec<Slot>,
        components: Vec<f64>,
        frame_id: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(GeometryError::Shape("dimension must be positive".into()));
        }
        let expected = dim.pow(variance.len() as u32);
        if components.len() != expected {
            return Err(GeometryError::Shape(format!(
                "{} components for dim {} rank {} (expected {})",
                components.len(),
                dim,
                variance.len(),
                expected
            )));
        }
        Ok(TensorValue {
            dim,
            variance,
            components,
            frame_id: frame_id.into(),
        })
    }

    pub fn zeros(dim: usize, variance: Vec<Slot>, frame_id: impl Into<String>) -> Self {
        let len = dim.pow(variance.len() as u32);
        TensorValue {
            dim,
            variance,
            components: vec![0.0; len],
            frame_id: frame_id.into(),
        }
    }

    pub fn scalar(value: f64, dim: usize, frame_id: impl Into<String>) -> Self {
        TensorValue {
            dim,
            variance: Vec::new(),
            components: vec![value],
            frame_id: frame_id.into(),
        }
    }

    /// The (1,1) identity.
    pub fn identity(dim: usize, frame_id: impl Into<String>) -> Self {
        let mut t = TensorValue::zeros(dim, vec![Slot::Upper, Slot::Lower], frame_id);
        for i in 0..dim {
            t.components[i * dim + i] = 1.0;
        }
        t
    }

    /// A (0,2) or (2,0) tensor from a row-major matrix.
    pub fn from_matrix(
        dim: usize,
        slots: [Slot; 2],
        matrix: Vec<f64>,
        frame_id: impl Into<String>,
    ) -> Result<Self> {
        TensorValue::new(dim, slots.to_vec(), matrix, frame_id)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Slot] {
        &self.variance
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [f64] {
        &mut self.components
    }

    pub fn frame_id(&self) -> &str {
        &self.frame_id
    }

    pub fn with_frame_id(mut self, frame_id: impl Into<String>) -> Self {
        self.frame_id = frame_id.into();
        self
    }

    fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.rank());
        index.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.components[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let k = self.offset(index);
        self.components[k] = value;
    }

    /// Multi-index of a flat offset.
    pub fn unravel(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank()];
        for slot in (0..self.rank()).rev() {
            idx[slot] = offset % self.dim;
            offset /= self.dim;
        }
        idx
    }

    fn check_compatible(&self, other: &TensorValue) -> Result<()> {
        if self.dim != other.dim {
            return Err(GeometryError::Shape(format!("dim {} vs {}", self.dim, other.dim)));
        }
        if self.variance != other.variance {
            return Err(GeometryError::Variance(format!(
                "{:?} vs {:?}",
                self.variance, other.variance
            )));
        }
        if self.frame_id != other.frame_id {
            return Err(GeometryError::Shape(format!(
                "frame '{}' vs '{}'",
                self.frame_id, other.frame_id
            )));
        }
        Ok(())
    }

    /// `alpha*self + beta*other`.
    pub fn lincomb(&self, alpha: f64, other: &TensorValue, beta: f64) -> Result<TensorValue> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (o, b) in out.components.iter_mut().zip(&other.components) {
            *o = alpha * *o + beta * b;
        }
        Ok(out)
    }

    pub fn scaled(&self, alpha: f64) -> TensorValue {
        let mut out = self.clone();
        out.components.iter_mut().for_each(|c| *c *= alpha);
        out
    }

    /// Largest absolute component difference; errors if the tensors are not comparable.
    pub fn max_abs_diff(&self, other: &TensorValue) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Componentwise comparison under `tol`.
    pub fn approx_eq(&self, other: &TensorValue, tol: Tolerance) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .all(|(a, b)| tol.close(*a, *b)))
    }

    /// Tensor product `self ⊗ other`, slots of `self` first.
    pub fn outer(&self, other: &TensorValue) -> Result<TensorValue> {
        if self.dim != other.dim || self.frame_id != other.frame_id {
            return Err(GeometryError::Shape("outer product across frames".into()));
        }
        let mut variance = self.variance.clone();
        variance.extend_from_slice(&other.variance);
        let mut components = Vec::with_capacity(self.components.len() * other.components.len());
        for a in &self.components {
            for b in &other.components {
                components.push(a * b);
            }
        }
        TensorValue::new(self.dim, variance, components, self.frame_id.clone())
    }

    /// Sums over a pair of slots of opposite kind.
    pub fn contract(&self, slot_a: usize, slot_b: usize) -> Result<TensorValue> {
        let rank = self.rank();
        for s in [slot_a, slot_b] {
            if s >= rank {
                return Err(GeometryError::Index { slot: s, rank });
            }
        }
        if slot_a == slot_b {
            return Err(GeometryError::Variance("cannot contract a slot with itself".into()));
        }
        if self.variance[slot_a] == self.variance[slot_b] {
            return Err(GeometryError::Variance(format!(
                "slots {slot_a} and {slot_b} are both {:?}",
                self.variance[slot_a]
            )));
        }
        let variance: Vec<Slot> = self
            .variance
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != slot_a && *k != slot_b)
            .map(|(_, s)| *s)
            .collect();
        let mut out = TensorValue::zeros(self.dim, variance, self.frame_id.clone());
        for (k, c) in self.components.iter().enumerate() {
            let idx = self.unravel(k);
            if idx[slot_a] != idx[slot_b] {
                continue;
            }
            let rest: Vec<usize> = idx
                .iter()
                .enumerate()
                .filter(|(s, _)| *s != slot_a && *s != slot_b)
                .map(|(_, i)| *i)
                .collect();
            let o = out.offset(&rest);
            out.components[o] += c;
        }
        Ok(out)
    }

    /// Applies a matrix `m[new][old]` along one slot: `out[.., a, ..] = Σ_b m[a][b] t[.., b, ..]`.
    fn map_slot(&self, slot: usize, m: &[f64], new_kind: Slot) -> TensorValue {
        let d = self.dim;
        let mut variance = self.variance.clone();
        variance[slot] = new_kind;
        let mut out = TensorValue::zeros(d, variance, self.frame_id.clone());
        for (k, c) in self.components.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let mut idx = self.unravel(k);
            let b = idx[slot];
            for a in 0..d {
                idx[slot] = a;
                let o = out.offset(&idx);
                out.components[o] += m[a * d + b] * c;
            }
        }
        out
    }

    /// Lowers an upper slot with the metric `g` (0,2).
    pub fn lower_index(&self, slot: usize, g: &TensorValue) -> Result<TensorValue> {
        self.index_op(slot, g, Slot::Upper, [Slot::Lower, Slot::Lower])
    }

    /// Raises a lower slot with the inverse metric `g_inv` (2,0).
    pub fn raise_index(&self, slot: usize, g_inv: &TensorValue) -> Result<TensorValue> {
        self.index_op(slot, g_inv, Slot::Lower, [Slot::Upper, Slot::Upper])
    }

    fn index_op(
        &self,
        slot: usize,
        metric: &TensorValue,
        from: Slot,
        metric_kind: [Slot; 2],
    ) -> Result<TensorValue> {
        if slot >= self.rank() {
            return Err(GeometryError::Index { slot, rank: self.rank() });
        }
        if self.variance[slot] != from {
            return Err(GeometryError::Variance(format!(
                "slot {slot} is {:?}, expected {:?}",
                self.variance[slot], from
            )));
        }
        if metric.variance() != metric_kind {
            return Err(GeometryError::Variance(format!(
                "metric has variance {:?}, expected {:?}",
                metric.variance(),
                metric_kind
            )));
        }
        if metric.dim != self.dim || metric.frame_id != self.frame_id {
            return Err(GeometryError::Shape("metric refers to a different frame".into()));
        }
        Ok(self.map_slot(slot, &metric.components, from.flipped()))
    }

    /// Evaluates the tensor on one argument per slot: vectors for lower
    /// slots, covectors for upper slots.
    pub fn eval(&self, args: &[&[f64]]) -> f64 {
        debug_assert_eq!(args.len(), self.rank());
        let mut total = 0.0;
        for (k, c) in self.components.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let idx = self.unravel(k);
            let mut prod = *c;
            for (slot, &i) in idx.iter().enumerate() {
                prod *= args[slot][i];
                if prod == 0.0 {
                    break;
                }
            }
            total += prod;
        }
        total
    }

    /// Expresses the tensor in a new frame. `basis[a]` holds the old-frame
    /// components of the new frame vector `a`; `dual[a]` the old-frame
    /// components of the new dual covector `a`.
    pub fn change_frame(
        &self,
        basis: &[Vec<f64>],
        dual: &[Vec<f64>],
        frame_id: impl Into<String>,
    ) -> TensorValue {
        let d = self.dim;
        let mut out = self.clone();
        for slot in 0..self.rank() {
            // new[a] = Σ_b M[a][b] old[b]
            let mut m = vec![0.0; d * d];
            for a in 0..d {
                for b in 0..d {
                    m[a * d + b] = match self.variance[slot] {
                        Slot::Lower => basis[a][b],
                        Slot::Upper => dual[a][b],
                    };
                }
            }
            out = out.map_slot(slot, &m, self.variance[slot]);
        }
        out.frame_id = frame_id.into();
        out
    }

    /// Swaps two slots of the same kind.
    pub fn transpose(&self, slot_a: usize, slot_b: usize) -> Result<TensorValue> {
        let rank = self.rank();
        if slot_a >= rank || slot_b >= rank {
            return Err(GeometryError::Index { slot: slot_a.max(slot_b), rank });
        }
        let mut out = self.clone();
        out.variance.swap(slot_a, slot_b);
        for k in 0..self.components.len() {
            let mut idx = self.unravel(k);
            idx.swap(slot_a, slot_b);
            let o = out.offset(&idx);
            out.components[o] = self.components[k];
        }
        Ok(out)
    }

    /// Largest violation of symmetry under swapping two slots.
    pub fn asymmetry(&self, slot_a: usize, slot_b: usize) -> Result<f64> {
        let t = self.transpose(slot_a, slot_b)?;
        self.max_abs_diff(&t)
    }
}

/// Kulkarni–Nomizu product of two symmetric (0,2) tensors:
/// `(a⊘b)(x,y,z,w) = a(y,z)b(x,w) - a(x,z)b(y,w) + b(y,z)a(x,w) - b(x,z)a(y,w)`.
pub fn kulkarni_nomizu(a: &TensorValue, b: &TensorValue) -> Result<TensorValue> {
    let two_lower = [Slot::Lower, Slot::Lower];
    if a.variance() != two_lower || b.variance() != two_lower {
        return Err(GeometryError::Shape("Kulkarni–Nomizu needs two (0,2) tensors".into()));
    }
    if a.dim() != b.dim() || a.frame_id() != b.frame_id() {
        return Err(GeometryError::Shape("Kulkarni–Nomizu operands in different frames".into()));
    }
    let d = a.dim();
    let at = |i: usize, j: usize| a.components()[i * d + j];
    let bt = |i: usize, j: usize| b.components()[i * d + j];
    let mut out = TensorValue::zeros(d, vec![Slot::Lower; 4], a.frame_id().to_string());
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                for w in 0..d {
                    let v = at(y, z) * bt(x, w) - at(x, z) * bt(y, w) + bt(y, z) * at(x, w)
                        - bt(x, z) * at(y, w);
                    out.set(&[x, y, z, w], v);
                }
            }
        }
    }
    Ok(out)
}

/// Residuals of the algebraic curvature symmetries of a (0,4) tensor:
/// `[R(x,y,z,w)+R(y,x,z,w), R(x,y,z,w)+R(x,y,w,z), R(x,y,z,w)-R(z,w,x,y), first Bianchi]`.
pub fn curvature_symmetry_residuals(r: &TensorValue) -> [f64; 4] {
    let d = r.dim();
    let mut res = [0.0f64; 4];
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                for w in 0..d {
                    let v = r.get(&[x, y, z, w]);
                    res[0] = res[0].max((v + r.get(&[y, x, z, w])).abs());
                    res[1] = res[1].max((v + r.get(&[x, y, w, z])).abs());
                    res[2] = res[2].max((v - r.get(&[z, w, x, y])).abs());
                    let bianchi = v + r.get(&[y, z, x, w]) + r.get(&[z, x, y, w]);
                    res[3] = res[3].max(bianchi.abs());
                }
            }
        }
    }
    res
}

/// Inverts a row-major square matrix by LU decomposition with partial
/// pivoting. A pivot below `1e-12` relative to the largest entry flags the
/// matrix as singular.
pub fn invert_matrix(m: &[f64], dim: usize) -> Result<Vec<f64>> {
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return Err(GeometryError::SingularMetric { pivot: 0.0, scale });
    }
    let mut lu = m.to_vec();
    let mut perm: Vec<usize> = (0..dim).collect();
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&i, &j| lu[i * dim + col].abs().total_cmp(&lu[j * dim + col].abs()))
            .unwrap();
        let pv = lu[pivot * dim + col];
        if pv.abs() < 1e-12 * scale {
            return Err(GeometryError::SingularMetric { pivot: pv.abs(), scale });
        }
        if pivot != col {
            for k in 0..dim {
                lu.swap(pivot * dim + k, col * dim + k);
            }
            perm.swap(pivot, col);
        }
        for row in col + 1..dim {
            let f = lu[row * dim + col] / lu[col * dim + col];
            lu[row * dim + col] = f;
            for k in col + 1..dim {
                lu[row * dim + k] -= f * lu[col * dim + k];
            }
        }
    }
    let mut inv = vec![0.0; dim * dim];
    for j in 0..dim {
        // solve L U x = P e_j
        let mut x: Vec<f64> = (0..dim).map(|i| if perm[i] == j { 1.0 } else { 0.0 }).collect();
        for i in 0..dim {
            for k in 0..i {
                x[i] -= lu[i * dim + k] * x[k];
            }
        }
        for i in (0..dim).rev() {
            for k in i + 1..dim {
                x[i] -= lu[i * dim + k] * x[k];
            }
            x[i] /= lu[i * dim + i];
        }
        for i in 0..dim {
            inv[i * dim + j] = x[i];
        }
    }
    Ok(inv)
}

/// Inverse of a (0,2) metric as a (2,0) tensor.
pub fn inverse_metric(g: &TensorValue) -> Result<TensorValue> {
    if g.variance() != [Slot::Lower, Slot::Lower] {
        return Err(GeometryError::Variance("metric must be (0,2)".into()));
    }
    let inv = invert_matrix(g.components(), g.dim())?;
    TensorValue::new(g.dim(), vec![Slot::Upper, Slot::Upper], inv, g.frame_id().to_string())
}

/// Symmetric bilinear form `m` (row-major) evaluated on two vectors.
pub fn bilinear(m: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let d = x.len();
    let mut s = 0.0;
    for i in 0..d {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..d {
            s += x[i] * m[i * d + j] * y[j];
        }
    }
    s
}

/// `m · x` for a row-major square matrix.
pub fn mat_vec(m: &[f64], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    (0..d).map(|i| (0..d).map(|j| m[i * d + j] * x[j]).sum()).collect()
}

/// Gram–Schmidt with respect to the inner product `g`, picking at each step
/// the candidate with the largest remaining norm. Returns at most `count`
/// orthonormal vectors.
pub fn gram_schmidt(g: &[f64], candidates: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let mut remaining: Vec<Vec<f64>> = candidates.to_vec();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(count);
    while basis.len() < count && !remaining.is_empty() {
        let norms: Vec<f64> = remaining.iter().map(|v| bilinear(g, v, v)).collect();
        let (best, &norm2) = norms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        if norm2 <= 1e-24 {
            break;
        }
        let n = norm2.sqrt();
        let e: Vec<f64> = remaining.swap_remove(best).iter().map(|c| c / n).collect();
        for v in remaining.iter_mut() {
            let p = bilinear(g, &e, v);
            for (vi, ei) in v.iter_mut().zip(&e) {
                *vi -= p * ei;
            }
        }
        basis.push(e);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(d: usize, f: impl Fn(usize, usize) -> f64) -> TensorValue {
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = f(i.min(j), i.max(j));
            }
        }
        TensorValue::from_matrix(d, [Slot::Lower, Slot::Lower], m, "f").unwrap()
    }

    #[test]
    fn trace_of_identity() {
        let id = TensorValue::identity(5, "f");
        let tr = id.contract(0, 1).unwrap();
        assert_eq!(tr.rank(), 0);
        assert_eq!(tr.components()[0], 5.0);
    }

    #[test]
    fn metric_against_inverse_is_identity() {
        let g = sym(3, |i, j| if i == j { 2.0 + i as f64 } else { 0.3 });
        let gi = inverse_metric(&g).unwrap();
        let prod = gi.outer(&g).unwrap().contract(1, 2).unwrap();
        assert!(prod.approx_eq(&TensorValue::identity(3, "f"), Tolerance::default()).unwrap());
    }

    #[test]
    fn contract_rejects_bad_slots() {
        let g = sym(2, |_, _| 1.0);
        assert!(matches!(g.contract(0, 1), Err(GeometryError::Variance(_))));
        let id = TensorValue::identity(2, "f");
        assert!(matches!(id.contract(0, 2), Err(GeometryError::Index { .. })));
        assert!(matches!(id.contract(1, 1), Err(GeometryError::Index { .. }) | Err(GeometryError::Variance(_))));
    }

    #[test]
    fn component_count_is_checked() {
        assert!(matches!(
            TensorValue::new(3, vec![Slot::Lower], vec![1.0, 2.0], "f"),
            Err(GeometryError::Shape(_))
        ));
    }

    #[test]
    fn comparison_needs_same_frame() {
        let a = TensorValue::identity(2, "a");
        let b = TensorValue::identity(2, "b");
        assert!(a.approx_eq(&b, Tolerance::default()).is_err());
    }

    #[test]
    fn singular_metric_detected() {
        let g = sym(2, |_, _| 1.0);
        assert!(matches!(inverse_metric(&g), Err(GeometryError::SingularMetric { .. })));
    }

    #[test]
    fn half_g_wedge_g_on_orthonormal_plane() {
        let g = sym(3, |i, j| if i == j { 1.0 } else { 0.0 });
        let pi1 = kulkarni_nomizu(&g, &g).unwrap().scaled(0.5);
        let x = [1.0, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0];
        assert_eq!(pi1.eval(&[&x, &y, &y, &x]), 1.0);
    }

    #[test]
    fn kulkarni_nomizu_rejects_shape_mismatch() {
        let a = sym(2, |_, _| 1.0);
        let b = sym(3, |_, _| 1.0);
        assert!(matches!(kulkarni_nomizu(&a, &b), Err(GeometryError::Shape(_))));
    }

    #[test]
    fn gram_schmidt_orthonormalizes() {
        let g = sym(3, |i, j| if i == j { 2.0 } else { 0.5 });
        let cand: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let b = gram_schmidt(g.components(), &cand, 3);
        for i in 0..3 {
            for j in 0..3 {
                let v = bilinear(g.components(), &b[i], &b[j]);
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn change_frame_of_metric_to_orthonormal_basis() {
        let g = sym(2, |i, j| if i == j { 4.0 } else { 1.0 });
        let cand = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let b = gram_schmidt(g.components(), &cand, 2);
        // dual covectors: rows of the inverse of the basis matrix
        let m = vec![b[0][0], b[1][0], b[0][1], b[1][1]];
        let inv = invert_matrix(&m, 2).unwrap();
        let dual = vec![vec![inv[0], inv[1]], vec![inv[2], inv[3]]];
        let gn = g.change_frame(&b, &dual, "onb");
        assert!(gn
            .approx_eq(
                &TensorValue::from_matrix(2, [Slot::Lower, Slot::Lower], vec![1.0, 0.0, 0.0, 1.0], "onb").unwrap(),
                Tolerance::default()
            )
            .unwrap());
    }
}
