//! Curvature identities of para-Sasaki-like manifolds, the horizontal
//! decomposition over the slices of a hyperbolic extension, and Einstein /
//! η-Einstein fits of the Ricci tensor.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::apcpc::{require_para_sasaki_like, ApcpcStructure, StructurePoint};
use crate::constructions::PhpcrModel;
use crate::error::{GeometryError, Result};
use crate::geometry::PointGeometry;
use crate::report::{random_vector, CheckReport, Sampler};
use crate::tensor::invert_matrix;

/// Points used to confirm the para-Sasaki-like precondition.
const PRECONDITION_POINTS: usize = 8;

/// Ricci tensor written as `α g + β g̃ + γ η⊗η`, with `g̃ = g(·,φ·) + η⊗η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaEinsteinFit {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Frobenius norm of `Ric − αg − βg̃ − γη⊗η`.
    pub residual: f64,
}

impl EtaEinsteinFit {
    /// The same tensor in the basis `{g, g(·,φ·), η⊗η}`.
    pub fn horizontal_form(&self) -> (f64, f64, f64) {
        (self.alpha, self.beta, self.beta + self.gamma)
    }
}

fn check_precondition(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<()> {
    require_para_sasaki_like(s, &Sampler::new(sampler.seed, PRECONDITION_POINTS), tol)
}

/// Random g-unit vector, optionally projected to `ker η`.
fn unit_vector<R: Rng>(sp: &StructurePoint, rng: &mut R, horizontal: bool) -> Vec<f64> {
    loop {
        let mut v = random_vector(rng, sp.dim());
        if horizontal {
            v = sp.horizontal(&v);
        }
        let n = sp.geo.norm(&v);
        if n > 1e-3 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}

/// Four unit vectors, no two of them nearly parallel.
fn quadruple<R: Rng>(sp: &StructurePoint, rng: &mut R, horizontal: bool) -> [Vec<f64>; 4] {
    'retry: loop {
        let q: [Vec<f64>; 4] = std::array::from_fn(|_| unit_vector(sp, rng, horizontal));
        for i in 0..4 {
            for j in i + 1..4 {
                if sp.g(&q[i], &q[j]).abs() > 0.99 {
                    continue 'retry;
                }
            }
        }
        return q;
    }
}

/// `|lhs − rhs|` relative to the largest term, floored at 1.
fn rel(lhs: f64, rhs: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(1.0f64, |m, t| m.max(t.abs()));
    (lhs - rhs).abs() / scale
}

fn vec_rel(lhs: &[f64], rhs: &[f64], geo: &PointGeometry) -> f64 {
    let diff: Vec<f64> = lhs.iter().zip(rhs).map(|(a, b)| a - b).collect();
    geo.norm(&diff) / geo.norm(rhs).max(1.0)
}

/// Right-hand side of the `φ`-commutation law for `R`.
fn curf_rhs(sp: &StructurePoint, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
    let e = |a: &[f64]| sp.eta(a);
    let gp = |a: &[f64], b: &[f64]| sp.g_phi(a, b);
    -(sp.g(y, z) - 2.0 * e(y) * e(z)) * gp(x, w) - (sp.g(y, w) - 2.0 * e(y) * e(w)) * gp(x, z)
        + (sp.g(x, z) - 2.0 * e(x) * e(z)) * gp(y, w)
        + (sp.g(x, w) - 2.0 * e(x) * e(w)) * gp(y, z)
}

/// `R(x,y)ξ` as predicted: `−η(y)x + η(x)y`.
fn r_xi(sp: &StructurePoint, x: &[f64], y: &[f64]) -> Vec<f64> {
    let (ex, ey) = (sp.eta(x), sp.eta(y));
    x.iter().zip(y).map(|(a, b)| -ey * a + ex * b).collect()
}

/// `R(x,y,φz,w) − R(x,y,z,φw)` against its closed form, on general
/// quadruples; `cur` is the `z = ξ` specialization `R(x,y)ξ = −η(y)x + η(x)y`.
pub fn check_curf(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
    check_precondition(s, sampler, tol)?;
    sampler.report("phi_curvature", &["phi_curvature", "r_xy_xi"], tol, |_, rng| {
        let p = s.model().sample_point(rng);
        let sp = s.at(&p)?;
        let [x, y, z, w] = quadruple(&sp, rng, false);
        let geo = &sp.geo;
        let a = geo.riemann4(&x, &y, &sp.phi(&z), &w);
        let b = geo.riemann4(&x, &y, &z, &sp.phi(&w));
        let phi_curv = rel(a - b, curf_rhs(&sp, &x, &y, &z, &w), &[a, b]);
        let cur = vec_rel(&geo.curvature(&x, &y, sp.xi()), &r_xi(&sp, &x, &y), geo);
        Ok(vec![phi_curv, cur])
    })
}

/// The curvature identities involving `ξ`: `R(x,y)ξ`, `R(ξ,X)ξ = X`,
/// `Ric(y,ξ) = −2nη(y)` and `R(x,y,z,ξ) = R(ξ,z,y,x) = −η(x)g(y,z) + η(y)g(x,z)`.
pub fn check_xi_curvature(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
    check_precondition(s, sampler, tol)?;
    let two_n = 2.0 * s.n() as f64;
    sampler.report("xi_curvature", &["r_xy_xi", "r_xi_x_xi", "ric_xi", "r_xyz_xi"], tol, |_, rng| {
        let p = s.model().sample_point(rng);
        let sp = s.at(&p)?;
        let geo = &sp.geo;
        let [x, y, z, _] = quadruple(&sp, rng, false);
        let xh = unit_vector(&sp, rng, true);
        let xi = sp.xi();
        let cur = vec_rel(&geo.curvature(&x, &y, xi), &r_xi(&sp, &x, &y), geo);
        let rxx = vec_rel(&geo.curvature(xi, &xh, xi), &xh, geo);
        let ric = (geo.ricci(&y, xi) + two_n * sp.eta(&y)).abs() / two_n;
        let want = -sp.eta(&x) * sp.g(&y, &z) + sp.eta(&y) * sp.g(&x, &z);
        let a = geo.riemann4(&x, &y, &z, xi);
        let b = geo.riemann4(xi, &z, &y, &x);
        let r_xi = rel(a, want, &[a, want]).max(rel(b, want, &[b, want]));
        Ok(vec![cur, rxx, ric, r_xi])
    })
}

/// Curvature of the slice `{t} × N` of a hyperbolic extension at `(t, y)`.
pub struct SliceGeometry {
    pub geo: PointGeometry,
    /// `P^k_j` of the base at `y`.
    pub p: Vec<f64>,
}

impl SliceGeometry {
    pub fn at(base: &PhpcrModel, point: &[f64]) -> Result<SliceGeometry> {
        let (t, y) = (point[0], &point[1..]);
        let geo = base.slice_at(t)?.geometry(y)?;
        Ok(SliceGeometry { geo, p: base.p_at(y) })
    }

    /// `R^h` on the horizontal parts of extension vectors.
    pub fn riemann4(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        self.geo.riemann4(&x[1..], &y[1..], &z[1..], &w[1..])
    }

    pub fn ricci(&self, x: &[f64], y: &[f64]) -> f64 {
        self.geo.ricci(&x[1..], &y[1..])
    }

    pub fn scalar(&self) -> f64 {
        self.geo.scalar()
    }

    /// `Σ Ric^h(e_i, P e_i)` over an `h(t)`-orthonormal basis.
    pub fn scalar_star(&self) -> f64 {
        let d = self.geo.dim();
        let (hi, ric) = (self.geo.metric_inverse(), self.geo.ricci_matrix());
        let mut total = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    total += hi[i * d + j] * ric[i * d + k] * self.p[k * d + j];
                }
            }
        }
        total
    }
}

fn require_base(s: &ApcpcStructure) -> Result<&PhpcrModel> {
    s.base().ok_or_else(|| {
        GeometryError::Backend(format!(
            "{} is not a hyperbolic extension; its slices are not computable",
            s.name()
        ))
    })
}

/// Scalar invariants of `M` and of the slice through a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionValues {
    pub scal: f64,
    pub scal_h: f64,
    pub scal_star: f64,
    pub scal_h_star: f64,
}

pub fn decomposition_values(s: &ApcpcStructure, point: &[f64]) -> Result<DecompositionValues> {
    let base = require_base(s)?;
    let sp = s.at(point)?;
    let slice = SliceGeometry::at(base, point)?;
    Ok(DecompositionValues {
        scal: sp.scalar(),
        scal_h: slice.scalar(),
        scal_star: sp.scalar_star(),
        scal_h_star: slice.scalar_star(),
    })
}

/// Full decomposition of `R` through `R^h` on general vectors.
fn decomposed_r(sp: &StructurePoint, slice: &SliceGeometry, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
    let h = |v: &[f64]| sp.horizontal(v);
    let e = |v: &[f64]| sp.eta(v);
    let gp = |a: &[f64], b: &[f64]| sp.g_phi(a, b);
    slice.riemann4(&h(x), &h(y), &h(z), &h(w)) - gp(y, z) * gp(x, w) + gp(x, z) * gp(y, w)
        - (sp.g(y, z) * e(x) - sp.g(x, z) * e(y)) * e(w)
        - (sp.g(x, w) * e(y) - sp.g(y, w) * e(x)) * e(z)
}

/// Expresses `R`, `Ric`, `Scal` and `Scal*` of a para-Sasaki-like
/// hyperbolic extension through the curvature of its slices.
pub fn horizontal_decomposition(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
    let base = require_base(s)?;
    check_precondition(s, sampler, tol)?;
    let two_n = 2.0 * s.n() as f64;
    let names = ["gauss_horizontal", "full_decomposition", "ricci", "scal", "scal_star"];
    sampler.report("horizontal_decomposition", &names, tol, |_, rng| {
        let p = s.model().sample_point(rng);
        let sp = s.at(&p)?;
        let slice = SliceGeometry::at(base, &p)?;
        let geo = &sp.geo;

        let [x, y, z, w] = quadruple(&sp, rng, true);
        let lhs = geo.riemann4(&x, &y, &z, &w);
        let rh = slice.riemann4(&x, &y, &z, &w);
        let extra = sp.g_phi(&x, &z) * sp.g_phi(&y, &w) - sp.g_phi(&y, &z) * sp.g_phi(&x, &w);
        let gauss = rel(lhs, rh + extra, &[lhs, rh, extra]);

        let [a, b, c, d] = quadruple(&sp, rng, false);
        let full_l = geo.riemann4(&a, &b, &c, &d);
        let full_r = decomposed_r(&sp, &slice, &a, &b, &c, &d);
        let full = rel(full_l, full_r, &[full_l, full_r]);

        let ric_l = geo.ricci(&a, &b);
        let ric_h = slice.ricci(&sp.horizontal(&a), &sp.horizontal(&b));
        let ric_r = ric_h - two_n * sp.eta(&a) * sp.eta(&b);
        let ricci = rel(ric_l, ric_r, &[ric_l, ric_h]);

        let (sc, sh) = (sp.scalar(), slice.scalar());
        let scal = rel(sc, sh - two_n, &[sc, sh]);
        let (ss, shs) = (sp.scalar_star(), slice.scalar_star());
        let scal_star = rel(ss, shs, &[ss, shs]);
        Ok(vec![gauss, full, ricci, scal, scal_star])
    })
}

/// Frobenius inner product of two (0,2) tensors through `g^{-1}`.
fn frobenius(g_inv: &[f64], a: &[f64], b: &[f64], d: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut row = 0.0;
            for k in 0..d {
                for l in 0..d {
                    row += g_inv[i * d + k] * g_inv[j * d + l] * b[k * d + l];
                }
            }
            s += a[i * d + j] * row;
        }
    }
    s
}

/// Best `λ` with `Ric ≈ λ g` at `p`, and the Frobenius norm of `Ric − λg`.
pub fn einstein_fit(s: &ApcpcStructure, p: &[f64]) -> Result<(f64, f64)> {
    let geo = PointGeometry::at(s.model(), p)?;
    let d = geo.dim();
    let (gi, ric) = (geo.metric_inverse(), geo.ricci_matrix());
    let lambda = geo.scalar() / d as f64;
    let r: Vec<f64> = ric.iter().zip(geo.metric()).map(|(a, b)| a - lambda * b).collect();
    Ok((lambda, frobenius(gi, &r, &r, d).max(0.0).sqrt()))
}

/// Least-squares coefficients of `Ric` in `{g, g̃, η⊗η}` at `p`.
pub fn eta_einstein_fit(s: &ApcpcStructure, p: &[f64]) -> Result<EtaEinsteinFit> {
    let sp = s.at(p)?;
    let d = sp.dim();
    let geo = &sp.geo;
    let gi = geo.metric_inverse();
    let tensor = |f: &dyn Fn(&[f64], &[f64]) -> f64| {
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let (ei, ej) = (unit(d, i), unit(d, j));
                m[i * d + j] = f(&ei, &ej);
            }
        }
        m
    };
    let basis = [
        geo.metric().to_vec(),
        tensor(&|x, y| sp.g_tilde(x, y)),
        tensor(&|x, y| sp.eta(x) * sp.eta(y)),
    ];
    let ric = geo.ricci_matrix();
    let mut gram = [0.0; 9];
    let mut rhs = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            gram[i * 3 + j] = frobenius(gi, &basis[i], &basis[j], d);
        }
        rhs[i] = frobenius(gi, &basis[i], ric, d);
    }
    let diag = (0..3).map(|i| gram[i * 4]).product::<f64>();
    let det = det3(&gram);
    if !(det.abs() > 1e-10 * diag.abs()) {
        return Err(GeometryError::FitDegenerate(format!(
            "g, g~ and eta*eta are linearly dependent at {p:?} (relative determinant {:.2e})",
            det / diag
        )));
    }
    let inv = invert_matrix(&gram, 3)?;
    let c: Vec<f64> = (0..3).map(|i| (0..3).map(|j| inv[i * 3 + j] * rhs[j]).sum()).collect();
    let r: Vec<f64> = (0..d * d)
        .map(|k| ric[k] - c[0] * basis[0][k] - c[1] * basis[1][k] - c[2] * basis[2][k])
        .collect();
    Ok(EtaEinsteinFit {
        alpha: c[0],
        beta: c[1],
        gamma: c[2],
        residual: frobenius(gi, &r, &r, d).max(0.0).sqrt(),
    })
}

fn det3(m: &[f64; 9]) -> f64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}
