//! Almost paracontact paracomplex Riemannian structures `(φ, ξ, η, g)`:
//! structure validation, the fundamental tensor `F`, Lee forms, the
//! Nijenhuis tensors and the para-Sasaki-like test.

mod cone;

use std::sync::Arc;

pub use cone::{
    build_cone, check_cone_components, check_cone_parallel, cone_nabla_p, Cone, CONE_RADII, MIN_RADIUS,
};

use crate::constructions::PhpcrModel;
use crate::error::{GeometryError, Result};
use crate::geometry::{ManifoldModel, PointGeometry};
use crate::report::{CheckReport, Sampler, SubCheck, Verdict};
use crate::tensor::{gram_schmidt, Slot, TensorValue};

pub const DEFAULT_TOL: f64 = 1e-8;

/// A manifold model together with its structure fields. Hyperbolic
/// extensions also remember the paraholomorphic base they were built from.
#[derive(Clone, Debug)]
pub struct ApcpcStructure {
    model: ManifoldModel,
    n: usize,
    base: Option<Arc<PhpcrModel>>,
}

impl ApcpcStructure {
    pub fn new(model: impl Into<ManifoldModel>) -> Result<Self> {
        let model = model.into();
        let d = model.dim();
        if d % 2 == 0 {
            return Err(GeometryError::Dimension(format!(
                "almost paracontact structures live in odd dimension, got {d}"
            )));
        }
        if !model.has_structure() {
            return Err(GeometryError::Precondition("model carries no (φ, ξ, η)".into()));
        }
        Ok(ApcpcStructure { model, n: (d - 1) / 2, base: None })
    }

    pub fn with_base(mut self, base: PhpcrModel) -> Self {
        self.base = Some(Arc::new(base));
        self
    }

    pub fn model(&self) -> &ManifoldModel {
        &self.model
    }

    pub fn base(&self) -> Option<&PhpcrModel> {
        self.base.as_deref()
    }

    /// Half the horizontal dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn name(&self) -> &str {
        self.model.name()
    }

    pub fn at(&self, p: &[f64]) -> Result<StructurePoint> {
        StructurePoint::new(PointGeometry::at(&self.model, p)?, self.n)
    }
}

fn trilinear(t: &[f64], d: usize, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let mut s = 0.0;
    for a in 0..d {
        if x[a] == 0.0 {
            continue;
        }
        for b in 0..d {
            let xy = x[a] * y[b];
            if xy == 0.0 {
                continue;
            }
            for c in 0..d {
                s += xy * z[c] * t[(a * d + b) * d + c];
            }
        }
    }
    s
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

/// Everything structural at one point.
#[derive(Debug, Clone)]
pub struct StructurePoint {
    pub geo: PointGeometry,
    n: usize,
    phi: Vec<f64>,
    xi: Vec<f64>,
    eta: Vec<f64>,
    // (∇_{e_a}φ)^k_j
    nphi: Vec<f64>,
    // (∇_{e_a}η)_j
    neta: Vec<f64>,
    // (∇_{e_a}ξ)^k
    nxi: Vec<f64>,
    // F(e_a, e_j, e_k)
    f: Vec<f64>,
    // N(e_j, e_k) and N̂(e_j, e_k) from brackets: [(j*d+k)*d+i] = i-th component
    n_br: Vec<f64>,
    nhat_br: Vec<f64>,
}

impl StructurePoint {
    pub fn new(geo: PointGeometry, n: usize) -> Result<Self> {
        let d = geo.dim();
        let s = geo.structure()?.clone();
        let gm = geo.metric().to_vec();
        let i3 = |a: usize, b: usize, c: usize| (a * d + b) * d + c;

        let mut nphi = vec![0.0; d * d * d];
        let mut neta = vec![0.0; d * d];
        let mut nxi = vec![0.0; d * d];
        for a in 0..d {
            for k in 0..d {
                for j in 0..d {
                    let mut v = s.dphi[i3(a, k, j)];
                    for l in 0..d {
                        v += geo.gamma(k, a, l) * s.phi[l * d + j] - s.phi[k * d + l] * geo.gamma(l, a, j);
                    }
                    nphi[i3(a, k, j)] = v;
                }
                let mut e = s.deta[a * d + k];
                let mut x = s.dxi[a * d + k];
                for l in 0..d {
                    e -= geo.gamma(l, a, k) * s.eta[l];
                    x += geo.gamma(k, a, l) * s.xi[l];
                }
                neta[a * d + k] = e;
                nxi[a * d + k] = x;
            }
        }
        let mut f = vec![0.0; d * d * d];
        for a in 0..d {
            for j in 0..d {
                for k in 0..d {
                    f[i3(a, j, k)] = (0..d).map(|p| gm[k * d + p] * nphi[i3(a, p, j)]).sum();
                }
            }
        }

        // Nijenhuis tensors from their bracket definitions
        let c = |k: usize, i: usize, j: usize| geo.bracket_coeff(k, i, j);
        let phi = |k: usize, j: usize| s.phi[k * d + j];
        let dphi = |a: usize, k: usize, j: usize| s.dphi[i3(a, k, j)];
        let sym_gamma = |l: usize, a: usize, b: usize| geo.gamma(l, a, b) + geo.gamma(l, b, a);
        let apply_phi = |v: &[f64]| -> Vec<f64> {
            (0..d).map(|k| (0..d).map(|j| phi(k, j) * v[j]).sum()).collect()
        };
        let mut n_br = vec![0.0; d * d * d];
        let mut nhat_br = vec![0.0; d * d * d];
        for j in 0..d {
            for k in 0..d {
                // [φe_j, φe_k], [e_j, e_k], [φe_j, e_k], [e_j, φe_k]
                let mut b_pp = vec![0.0; d];
                let mut b_00 = vec![0.0; d];
                let mut b_p0 = vec![0.0; d];
                let mut b_0p = vec![0.0; d];
                // same with symmetric brackets {x, y} = ∇_x y + ∇_y x
                let mut s_pp = vec![0.0; d];
                let mut s_00 = vec![0.0; d];
                let mut s_p0 = vec![0.0; d];
                let mut s_0p = vec![0.0; d];
                for l in 0..d {
                    b_00[l] = c(l, j, k);
                    s_00[l] = sym_gamma(l, j, k);
                    let mut bpp = 0.0;
                    let mut spp = 0.0;
                    let mut bp0 = -dphi(k, l, j);
                    let mut b0p = dphi(j, l, k);
                    let mut sp0 = dphi(k, l, j);
                    let mut s0p = dphi(j, l, k);
                    for a in 0..d {
                        bpp += phi(a, j) * dphi(a, l, k) - phi(a, k) * dphi(a, l, j);
                        spp += phi(a, j) * dphi(a, l, k) + phi(a, k) * dphi(a, l, j);
                        bp0 += phi(a, j) * c(l, a, k);
                        b0p += phi(a, k) * c(l, j, a);
                        sp0 += phi(a, j) * sym_gamma(l, a, k);
                        s0p += phi(a, k) * sym_gamma(l, j, a);
                        for b in 0..d {
                            let pp = phi(a, j) * phi(b, k);
                            if pp != 0.0 {
                                bpp += pp * c(l, a, b);
                                spp += pp * sym_gamma(l, a, b);
                            }
                        }
                    }
                    b_pp[l] = bpp;
                    s_pp[l] = spp;
                    b_p0[l] = bp0;
                    b_0p[l] = b0p;
                    s_p0[l] = sp0;
                    s_0p[l] = s0p;
                }
                let b_00 = apply_phi(&apply_phi(&b_00));
                let s_00 = apply_phi(&apply_phi(&s_00));
                let b_p0 = apply_phi(&b_p0);
                let b_0p = apply_phi(&b_0p);
                let s_p0 = apply_phi(&s_p0);
                let s_0p = apply_phi(&s_0p);
                let d_eta = s.deta[j * d + k] - s.deta[k * d + j]
                    - (0..d).map(|l| s.eta[l] * c(l, j, k)).sum::<f64>();
                let lie_xi_g = neta[j * d + k] + neta[k * d + j];
                for i in 0..d {
                    n_br[i3(j, k, i)] = b_pp[i] + b_00[i] - b_p0[i] - b_0p[i] - d_eta * s.xi[i];
                    nhat_br[i3(j, k, i)] = s_pp[i] + s_00[i] - s_p0[i] - s_0p[i] - lie_xi_g * s.xi[i];
                }
            }
        }

        Ok(StructurePoint {
            n,
            phi: s.phi,
            xi: s.xi,
            eta: s.eta,
            nphi,
            neta,
            nxi,
            f,
            n_br,
            nhat_br,
            geo,
        })
    }

    pub fn dim(&self) -> usize {
        self.geo.dim()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self, x: &[f64], y: &[f64]) -> f64 {
        self.geo.g(x, y)
    }

    pub fn phi(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|k| (0..d).map(|j| self.phi[k * d + j] * x[j]).sum()).collect()
    }

    pub fn phi_matrix(&self) -> &[f64] {
        &self.phi
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn eta_covector(&self) -> &[f64] {
        &self.eta
    }

    pub fn eta(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.eta).map(|(a, b)| a * b).sum()
    }

    /// `x − η(x)ξ`
    pub fn horizontal(&self, x: &[f64]) -> Vec<f64> {
        let e = self.eta(x);
        x.iter().zip(&self.xi).map(|(a, b)| a - e * b).collect()
    }

    /// `g(x, φy)`
    pub fn g_phi(&self, x: &[f64], y: &[f64]) -> f64 {
        self.g(x, &self.phi(y))
    }

    /// Associated metric `g̃(x,y) = g(x,φy) + η(x)η(y)`.
    pub fn g_tilde(&self, x: &[f64], y: &[f64]) -> f64 {
        self.g_phi(x, y) + self.eta(x) * self.eta(y)
    }

    /// `(∇_x φ) y`
    pub fn nabla_phi(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for a in 0..d {
            for j in 0..d {
                let xy = x[a] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += xy * self.nphi[(a * d + k) * d + j];
                }
            }
        }
        out
    }

    /// `(∇_x η)(y)`
    pub fn nabla_eta(&self, x: &[f64], y: &[f64]) -> f64 {
        crate::tensor::bilinear(&self.neta, x, y)
    }

    /// `∇_x ξ`
    pub fn nabla_xi(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|k| (0..d).map(|a| x[a] * self.nxi[a * d + k]).sum()).collect()
    }

    /// `dη(x,y) = x(η(y)) − y(η(x)) − η([x,y])`, computed from frame
    /// derivatives and brackets.
    pub fn d_eta(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = self.dim();
        let s = self.geo.structure().expect("structure present");
        let mut total = 0.0;
        for j in 0..d {
            for k in 0..d {
                let xy = x[j] * y[k];
                if xy == 0.0 {
                    continue;
                }
                let mut v = s.deta[j * d + k] - s.deta[k * d + j];
                for l in 0..d {
                    v -= s.eta[l] * self.geo.bracket_coeff(l, j, k);
                }
                total += xy * v;
            }
        }
        total
    }

    /// `F(x,y,z) = g((∇_x φ)y, z)`
    pub fn f(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        trilinear(&self.f, self.dim(), x, y, z)
    }

    /// `N(x,y)` from the bracket definition `[φ,φ] − dη⊗ξ`.
    pub fn nijenhuis_vector(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.vector_from_table(&self.n_br, x, y)
    }

    /// `N̂(x,y)` from symmetric brackets `{φ,φ} − (L_ξ g)⊗ξ`.
    pub fn assoc_nijenhuis_vector(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.vector_from_table(&self.nhat_br, x, y)
    }

    fn vector_from_table(&self, t: &[f64], x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for j in 0..d {
            for k in 0..d {
                let xy = x[j] * y[k];
                if xy == 0.0 {
                    continue;
                }
                for (i, o) in out.iter_mut().enumerate() {
                    *o += xy * t[(j * d + k) * d + i];
                }
            }
        }
        out
    }

    /// `N(x,y,z) = g(N(x,y), z)` (bracket path).
    pub fn nijenhuis(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        self.g(&self.nijenhuis_vector(x, y), z)
    }

    pub fn assoc_nijenhuis(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        self.g(&self.assoc_nijenhuis_vector(x, y), z)
    }

    /// `N` through the fundamental tensor.
    pub fn nijenhuis_from_f(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let (px, py, pz) = (self.phi(x), self.phi(y), self.phi(z));
        self.f(&px, y, z) - self.f(&py, x, z) - self.f(x, y, &pz) + self.f(y, x, &pz)
            + self.eta(z) * (self.f(x, &py, &self.xi) - self.f(y, &px, &self.xi))
    }

    /// `N̂` through the fundamental tensor.
    pub fn assoc_nijenhuis_from_f(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let (px, py, pz) = (self.phi(x), self.phi(y), self.phi(z));
        self.f(&px, y, z) + self.f(&py, x, z) - self.f(x, y, &pz) - self.f(y, x, &pz)
            + self.eta(z) * (self.f(x, &py, &self.xi) + self.f(y, &px, &self.xi))
    }

    /// g-orthonormal basis of `ker η` from pivoted Gram–Schmidt on the
    /// horizontal projections of the frame.
    pub fn horizontal_basis(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let cands: Vec<Vec<f64>> = (0..d).map(|i| self.horizontal(&unit(d, i))).collect();
        gram_schmidt(self.geo.metric(), &cands, 2 * self.n)
    }

    /// `{ξ, X_1, …, X_2n}` with the `X_i` from [`Self::horizontal_basis`].
    pub fn adapted_basis(&self) -> Vec<Vec<f64>> {
        let mut b = vec![self.xi.clone()];
        b.extend(self.horizontal_basis());
        b
    }

    pub fn lee_forms(&self) -> LeeForms {
        let d = self.dim();
        let hb = self.horizontal_basis();
        let mut theta = vec![0.0; d];
        let mut theta_star = vec![0.0; d];
        let mut omega = vec![0.0; d];
        for (k, ((t, ts), o)) in theta.iter_mut().zip(theta_star.iter_mut()).zip(omega.iter_mut()).enumerate() {
            let ek = unit(d, k);
            for e in &hb {
                *t += self.f(e, e, &ek);
                *ts += self.f(e, &self.phi(e), &ek);
            }
            *o = self.f(&self.xi, &self.xi, &ek);
        }
        LeeForms { theta, theta_star, omega }
    }

    pub fn associated_metric_tensor(&self) -> TensorValue {
        self.tensor2(|x, y| self.g_tilde(x, y))
    }

    pub fn fundamental_f_tensor(&self) -> TensorValue {
        TensorValue::new(self.dim(), vec![Slot::Lower; 3], self.f.clone(), self.geo.frame_id().to_string())
            .expect("F shape")
    }

    pub fn nijenhuis_tensor(&self) -> TensorValue {
        self.tensor3(|x, y, z| self.nijenhuis(x, y, z))
    }

    pub fn assoc_nijenhuis_tensor(&self) -> TensorValue {
        self.tensor3(|x, y, z| self.assoc_nijenhuis(x, y, z))
    }

    pub fn nijenhuis_tensor_from_f(&self) -> TensorValue {
        self.tensor3(|x, y, z| self.nijenhuis_from_f(x, y, z))
    }

    pub fn assoc_nijenhuis_tensor_from_f(&self) -> TensorValue {
        self.tensor3(|x, y, z| self.assoc_nijenhuis_from_f(x, y, z))
    }

    fn tensor2(&self, f: impl Fn(&[f64], &[f64]) -> f64) -> TensorValue {
        let d = self.dim();
        let mut t = TensorValue::zeros(d, vec![Slot::Lower; 2], self.geo.frame_id().to_string());
        for i in 0..d {
            for j in 0..d {
                t.set(&[i, j], f(&unit(d, i), &unit(d, j)));
            }
        }
        t
    }

    fn tensor3(&self, f: impl Fn(&[f64], &[f64], &[f64]) -> f64) -> TensorValue {
        let d = self.dim();
        let mut t = TensorValue::zeros(d, vec![Slot::Lower; 3], self.geo.frame_id().to_string());
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    t.set(&[i, j, k], f(&unit(d, i), &unit(d, j), &unit(d, k)));
                }
            }
        }
        t
    }

    /// Right-hand side of the general formula expressing `F` through
    /// `N` and `N̂`.
    pub fn f_from_nijenhuis(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let px = self.phi(x);
        let (pz, py) = (self.phi(z), self.phi(y));
        let xi = &self.xi;
        0.25 * (self.nijenhuis(&px, y, z)
            + self.nijenhuis(&px, z, y)
            + self.assoc_nijenhuis(&px, y, z)
            + self.assoc_nijenhuis(&px, z, y))
            - 0.5
                * self.eta(x)
                * (self.nijenhuis(xi, y, &pz)
                    + self.assoc_nijenhuis(xi, y, &pz)
                    + self.eta(z) * self.assoc_nijenhuis(xi, xi, &py))
    }

    /// Scalar and *-scalar curvature.
    pub fn scalar(&self) -> f64 {
        self.geo.scalar()
    }

    pub fn scalar_star(&self) -> f64 {
        self.geo.scalar_star().expect("structure present")
    }
}

/// Lee forms as covector components in the model frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LeeForms {
    pub theta: Vec<f64>,
    pub theta_star: Vec<f64>,
    pub omega: Vec<f64>,
}

fn max_over3(basis: &[Vec<f64>], mut f: impl FnMut(&[f64], &[f64], &[f64]) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for x in basis {
        for y in basis {
            for z in basis {
                worst = worst.max(f(x, y, z).abs());
            }
        }
    }
    worst
}

fn max_over2(basis: &[Vec<f64>], mut f: impl FnMut(&[f64], &[f64]) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for x in basis {
        for y in basis {
            worst = worst.max(f(x, y).abs());
        }
    }
    worst
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Residuals of the structure axioms at one point.
pub fn structure_residuals(sp: &StructurePoint) -> [f64; 7] {
    let d = sp.dim();
    let mut res = [0.0f64; 7];
    let xi = sp.xi().to_vec();
    res[1] = (sp.eta(&xi) - 1.0).abs();
    res[2] = max_abs(&sp.phi(&xi));
    for i in 0..d {
        let ei = unit(d, i);
        let pp = sp.phi(&sp.phi(&ei));
        let ei_eta = sp.eta(&ei);
        for k in 0..d {
            let target = if k == i { 1.0 } else { 0.0 } - ei_eta * xi[k];
            res[0] = res[0].max((pp[k] - target).abs());
        }
        res[3] = res[3].max(sp.eta(&sp.phi(&ei)).abs());
        res[4] = res[4].max((sp.g(&ei, &xi) - ei_eta).abs());
        for j in 0..d {
            let ej = unit(d, j);
            let lhs = sp.g(&sp.phi(&ei), &sp.phi(&ej));
            let rhs = sp.g(&ei, &ej) - ei_eta * sp.eta(&ej);
            res[5] = res[5].max((lhs - rhs).abs());
        }
    }
    res[6] = (0..d).map(|i| sp.phi_matrix()[i * d + i]).sum::<f64>().abs();
    res
}

pub const STRUCTURE_AXIOMS: [&str; 7] =
    ["phi_squared", "eta_xi", "phi_xi", "eta_phi", "g_xi_eta", "g_phi_phi", "trace_phi"];

pub fn validate_structure(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
    sampler.report("validate_structure", &STRUCTURE_AXIOMS, tol, |_, rng| {
        let p = s.model().sample_point(rng);
        Ok(structure_residuals(&s.at(&p)?).to_vec())
    })
}

/// `g̃` at `p`.
pub fn associated_metric(s: &ApcpcStructure, p: &[f64]) -> Result<TensorValue> {
    Ok(s.at(p)?.associated_metric_tensor())
}

pub fn fundamental_f(s: &ApcpcStructure, p: &[f64]) -> Result<TensorValue> {
    Ok(s.at(p)?.fundamental_f_tensor())
}

pub fn lee_forms(s: &ApcpcStructure, p: &[f64]) -> Result<LeeForms> {
    Ok(s.at(p)?.lee_forms())
}

pub fn nijenhuis(s: &ApcpcStructure, p: &[f64]) -> Result<TensorValue> {
    Ok(s.at(p)?.nijenhuis_tensor())
}

pub fn assoc_nijenhuis(s: &ApcpcStructure, p: &[f64]) -> Result<TensorValue> {
    Ok(s.at(p)?.assoc_nijenhuis_tensor())
}

/// Algebraic identities every structure satisfies: symmetry and
/// φ-behaviour of `F`, the relations between `∇ξ`, `∇η` and `F`, the two
/// routes to `N` and `N̂`, and `F` recovered from `N`, `N̂`.
pub fn verify_nabf(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
    let names = ["f_from_nijenhuis", "f_symmetry", "f_phi", "nabla_eta_xi", "nijenhuis_paths", "assoc_nijenhuis_paths", "lee_relations"];
    sampler.report("verify_nabf", &names, tol, |_, rng| {
        let p = s.model().sample_point(rng);
        let sp = s.at(&p)?;
        let basis = sp.adapted_basis();
        let xi = sp.xi().to_vec();
        let nabf = max_over3(&basis, |x, y, z| sp.f(x, y, z) - sp.f_from_nijenhuis(x, y, z));
        let sym = max_over3(&basis, |x, y, z| sp.f(x, y, z) - sp.f(x, z, y));
        let fphi = max_over3(&basis, |x, y, z| {
            sp.f(x, y, z) + sp.f(x, &sp.phi(y), &sp.phi(z)) - sp.eta(y) * sp.f(x, &xi, z) - sp.eta(z) * sp.f(x, y, &xi)
        });
        let rel = max_over2(&basis, |x, y| {
            let a = sp.nabla_eta(x, y);
            let b = sp.g(&sp.nabla_xi(x), y);
            let c = -sp.f(x, &sp.phi(y), &xi);
            (a - b).abs().max((a - c).abs())
        });
        let np = max_over3(&basis, |x, y, z| sp.nijenhuis(x, y, z) - sp.nijenhuis_from_f(x, y, z));
        let nh = max_over3(&basis, |x, y, z| sp.assoc_nijenhuis(x, y, z) - sp.assoc_nijenhuis_from_f(x, y, z));
        let lf = sp.lee_forms();
        // ω(ξ) = 0 and θ*∘φ = −θ∘φ²
        let mut lee = xi.iter().zip(&lf.omega).map(|(a, b)| a * b).sum::<f64>().abs();
        for x in &basis {
            let px = sp.phi(x);
            let ppx = sp.phi(&px);
            let a: f64 = lf.theta_star.iter().zip(&px).map(|(t, v)| t * v).sum();
            let b: f64 = lf.theta.iter().zip(&ppx).map(|(t, v)| t * v).sum();
            lee = lee.max((a + b).abs());
        }
        Ok(vec![nabf, sym, fphi, rel, np, nh, lee])
    })
}

pub const PARA_SASAKI_CHECKS: [&str; 12] = [
    "f_conditions",
    "f_xi_slot",
    "nabla_phi_form",
    "nijenhuis_n",
    "nijenhuis_nhat",
    "d_eta",
    "nabla_xi_xi",
    "nabla_eta_horizontal",
    "paracontact_metric",
    "theta",
    "theta_star",
    "omega",
];

/// Per-point residuals of the para-Sasaki-like characterizations and
/// their consequences, in the order of [`PARA_SASAKI_CHECKS`].
pub fn para_sasaki_residuals(sp: &StructurePoint) -> Vec<f64> {
    let n = sp.n() as f64;
    let basis = sp.adapted_basis();
    let hb = &basis[1..];
    let xi = sp.xi().to_vec();
    let d = sp.dim();

    let mut f_cond = max_over3(hb, |x, y, z| sp.f(x, y, z));
    f_cond = f_cond.max(max_over2(hb, |y, z| sp.f(&xi, y, z)));
    for z in hb {
        f_cond = f_cond.max(sp.f(&xi, &xi, z).abs());
    }
    let f_xi = max_over2(hb, |x, y| sp.f(x, y, &xi) + sp.g(x, y));
    let mut nphi_form = 0.0f64;
    for x in &basis {
        for y in &basis {
            let lhs = sp.nabla_phi(x, y);
            let (gxy, ex, ey) = (sp.g(x, y), sp.eta(x), sp.eta(y));
            for k in 0..d {
                let rhs = -gxy * xi[k] - ey * x[k] + 2.0 * ex * ey * xi[k];
                nphi_form = nphi_form.max((lhs[k] - rhs).abs());
            }
        }
    }
    let nij_n = max_over3(&basis, |x, y, z| sp.nijenhuis(x, y, z));
    let nij_nhat = max_over3(&basis, |x, y, z| {
        sp.assoc_nijenhuis(x, y, z) + 4.0 * (sp.g_tilde(x, y) - sp.eta(x) * sp.eta(y)) * sp.eta(z)
    });
    let d_eta = max_over2(&basis, |x, y| sp.d_eta(x, y));
    let nxx = sp.nabla_xi(&xi);
    let nabla_xi_xi = basis.iter().map(|b| sp.g(&nxx, b).abs()).fold(0.0, f64::max);
    let neta_h = max_over2(hb, |x, y| sp.nabla_eta(x, y) - sp.g_phi(x, y));
    let paracontact = max_over2(&basis, |x, y| 2.0 * sp.g_phi(x, y) - sp.nabla_eta(x, y) - sp.nabla_eta(y, x));
    let lf = sp.lee_forms();
    let eta = sp.eta_covector();
    let on = |w: &[f64], b: &[f64]| w.iter().zip(b).map(|(a, c)| a * c).sum::<f64>();
    let mut theta = 0.0f64;
    let mut theta_star = 0.0f64;
    let mut omega = 0.0f64;
    for b in &basis {
        theta = theta.max((on(&lf.theta, b) + 2.0 * n * on(eta, b)).abs());
        theta_star = theta_star.max(on(&lf.theta_star, b).abs());
        omega = omega.max(on(&lf.omega, b).abs());
    }
    vec![
        f_cond, f_xi, nphi_form, nij_n, nij_nhat, d_eta, nabla_xi_xi, neta_h, paracontact, theta, theta_star,
        omega,
    ]
}

/// Runs the three equivalent characterizations (a) `F`-conditions,
/// (b) the closed form of `∇φ`, (c) the Nijenhuis conditions, plus the
/// consequences `dη = 0`, `∇_ξ ξ = 0`, `θ = −2nη`, `θ* = 0`, `ω = 0`.
///
/// A definite pass of one characterization together with a definite fail of
/// another is reported as [`GeometryError::InternalConsistency`].
pub fn check_para_sasaki_like(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
    let mut report = sampler.report("para_sasaki_like", &PARA_SASAKI_CHECKS, tol, |_, rng| {
        let p = s.model().sample_point(rng);
        Ok(para_sasaki_residuals(&s.at(&p)?))
    })?;
    let a = report.residual("f_conditions").max(report.residual("f_xi_slot"));
    let b = report.residual("nabla_phi_form");
    let c = report.residual("nijenhuis_n").max(report.residual("nijenhuis_nhat"));
    let verdicts = [Verdict::classify(a, tol), Verdict::classify(b, tol), Verdict::classify(c, tol)];
    if verdicts.contains(&Verdict::Pass) && verdicts.contains(&Verdict::Fail) {
        return Err(GeometryError::InternalConsistency(format!(
            "characterizations disagree on {}: (a) {a:.3e}, (b) {b:.3e}, (c) {c:.3e}",
            s.name()
        )));
    }
    for (name, r) in [("characterization_a", a), ("characterization_b", b), ("characterization_c", c)] {
        let v = Verdict::classify(r, tol);
        report.push(SubCheck::new(name, r, tol).with("verdict", serde_json::to_value(v).unwrap()));
    }
    Ok(report)
}

/// Returns `Ok(())` if `s` passes [`check_para_sasaki_like`].
pub fn require_para_sasaki_like(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<()> {
    let r = check_para_sasaki_like(s, sampler, tol)?;
    if r.pass {
        Ok(())
    } else {
        let f = r.first_failure().expect("failing report names a sub-check");
        Err(GeometryError::Precondition(format!(
            "{} is not para-Sasaki-like ({} residual {:.3e})",
            s.name(),
            f.name,
            f.max_residual
        )))
    }
}

#[cfg(test)]
mod tests;
