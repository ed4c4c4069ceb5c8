//! Homothetic transformations: constant `u, v, w`.

use super::{apply_conformal, ConformalData, TransformKind};
use crate::apcpc::{require_para_sasaki_like, ApcpcStructure};
use crate::curvature::{einstein_fit, eta_einstein_fit};
use crate::error::{GeometryError, Result};
use crate::report::{random_vector, CheckReport, Sampler, SubCheck};

fn unit(d: usize, i: usize) -> Vec<f64> {
    (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

fn norm_diff(geo: &crate::geometry::PointGeometry, a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    geo.norm(&diff)
}

/// Connection, curvature, Ricci and scalar curvature of a homothetic
/// transformation of a para-Sasaki-like structure against their closed
/// forms:
///
/// - `connection_law`: `∇̄_x y = ∇_x y − e^{2u−2w}sinh(2v) g(φx,φy)ξ + (1 − e^{2u−2w}cosh(2v)) g(x,φy)ξ`
/// - `curvature_law`: `R̄` through `R` and the same two coefficients
/// - `ricci_invariance`: `Ric̄ = Ric`
/// - `scal_law`: `Scal̄ = e^{−2u}(cosh 2v Scal − sinh 2v Scal*) − 2n(e^{−2w} − e^{−2u}cosh 2v)`
/// - `scal_star_law`: `Scal̄* = e^{−2u}(cosh 2v Scal* − sinh 2v Scal)`
/// - `scal_star_trace_law`: `Scal̄* = e^{−2u}(cosh 2v Scal* − sinh 2v (Scal + 2n))`,
///   the trace of `Ric̄ = Ric` against `ḡ⁻¹` and `φ`
///
/// The last two differ by `2n e^{−2u} sinh 2v`, so at most one of them
/// holds when `v ≠ 0`.
pub fn check_homothetic_laws(s: &ApcpcStructure, d: &ConformalData, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
    let (u, v, w) = d
        .constants()
        .ok_or_else(|| GeometryError::Parameter(format!("homothetic laws need constant u, v, w (got {d})")))?;
    require_para_sasaki_like(s, &Sampler::new(sampler.seed, 8), tol)?;
    let sb = apply_conformal(s, d)?;
    let dim = s.dim();
    let two_n = 2.0 * s.n() as f64;
    let (ch, sh) = ((2.0 * v).cosh(), (2.0 * v).sinh());
    let k = (2.0 * u - 2.0 * w).exp();
    let (a, b) = (1.0 - k * ch, k * sh);
    let names = ["connection_law", "curvature_law", "ricci_invariance", "scal_law", "scal_star_law", "scal_star_trace_law"];
    sampler.report("homothetic_laws", &names, tol, |_, rng| {
        let p = s.model().sample_point(rng);
        let sp = s.at(&p)?;
        let spb = sb.at(&p)?;
        let xi = sp.xi().to_vec();
        let axpy = |out: &mut Vec<f64>, c: f64, v: &[f64]| out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);

        let mut conn = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let (x, y) = (unit(dim, i), unit(dim, j));
                let (px, py) = (sp.phi(&x), sp.phi(&y));
                let mut want = sp.geo.nabla(&x, &y, None);
                axpy(&mut want, -b * sp.g(&px, &py) + a * sp.g(&x, &py), &xi);
                let got = spb.geo.nabla(&x, &y, None);
                conn = conn.max(norm_diff(&sp.geo, &got, &want) / sp.geo.norm(&want).max(1.0));
            }
        }

        let (x, y, z) = (random_vector(rng, dim), random_vector(rng, dim), random_vector(rng, dim));
        let (px, py, pz) = (sp.phi(&x), sp.phi(&y), sp.phi(&z));
        let (ex, ey) = (sp.eta(&x), sp.eta(&y));
        let mut want = sp.geo.curvature(&x, &y, &z);
        let (gpypz, gpxpz, gypz, gxpz) = (sp.g(&py, &pz), sp.g(&px, &pz), sp.g(&y, &pz), sp.g(&x, &pz));
        axpy(&mut want, a * (gpypz * ex - gpxpz * ey) - b * (gypz * ex - gxpz * ey), &xi);
        axpy(&mut want, a * gypz - b * gpypz, &px);
        axpy(&mut want, -a * gxpz + b * gpxpz, &py);
        let got = spb.geo.curvature(&x, &y, &z);
        let bar_rr = norm_diff(&sp.geo, &got, &want) / sp.geo.norm(&want).max(1.0);

        let (ric, ricb) = (sp.geo.ricci_matrix(), spb.geo.ricci_matrix());
        let scale = ric.iter().fold(1.0f64, |m, r| m.max(r.abs()));
        let ri = ric.iter().zip(ricb).map(|(r, rb)| (r - rb).abs()).fold(0.0, f64::max) / scale;

        let (sc, ss) = (sp.scalar(), sp.scalar_star());
        let (scb, ssb) = (spb.scalar(), spb.scalar_star());
        let e2u = (-2.0 * u).exp();
        let scal_want = e2u * (ch * sc - sh * ss) - two_n * ((-2.0 * w).exp() - e2u * ch);
        let star_two_term = e2u * (ch * ss - sh * sc);
        let star_trace = e2u * (ch * ss - sh * (sc + two_n));
        let r = |got: f64, want: f64| (got - want).abs() / want.abs().max(1.0);
        Ok(vec![conn, bar_rr, ri, r(scb, scal_want), r(ssb, star_two_term), r(ssb, star_trace)])
    })
}

/// Turns a para-Sasaki-like hyperbolic extension over an Einstein base with
/// negative scalar curvature into an Einstein one by the homothety with
/// `v = w = 0` and `u = −½ ln(4n²/(−Scal^h))`, which rescales the slices to
/// `Scal^h = −4n²`.
pub fn homothety_to_einstein(s: &ApcpcStructure, sampler: &Sampler, tol: f64) -> Result<(ConformalData, ApcpcStructure)> {
    let base = s
        .base()
        .ok_or_else(|| GeometryError::NotApplicable(format!("{} has no paraholomorphic base", s.name())))?;
    let d = base.dim();
    let n = s.n() as f64;
    let mut scal = Vec::with_capacity(sampler.count);
    for i in 0..sampler.count {
        let y = base_point(base, sampler, i);
        let geo = base.geometry(&y)?;
        let lambda = geo.scalar() / d as f64;
        let worst = geo
            .ricci_matrix()
            .iter()
            .zip(geo.metric())
            .map(|(r, g)| (r - lambda * g).abs())
            .fold(0.0, f64::max);
        if worst > tol * lambda.abs().max(1.0) {
            return Err(GeometryError::NotApplicable(format!(
                "base {} is not Einstein (|Ric - λh| = {worst:.3e} at {y:?})",
                base.name()
            )));
        }
        scal.push(geo.scalar());
    }
    let scal_h = scal.iter().sum::<f64>() / scal.len() as f64;
    if scal_h > -tol {
        return Err(GeometryError::NotApplicable(format!(
            "base {} has scalar curvature {scal_h:.6} >= 0",
            base.name()
        )));
    }
    let u = -0.5 * (4.0 * n * n / -scal_h).ln();
    let data = ConformalData::homothetic(u, 0.0, 0.0);
    let out = apply_conformal(s, &data)?;
    Ok((data, out))
}

fn base_point(base: &crate::constructions::PhpcrModel, sampler: &Sampler, i: usize) -> Vec<f64> {
    let model: crate::geometry::ManifoldModel = base.chart().clone().into();
    model.sample_point(&mut sampler.rng(i))
}

/// `(α, β, γ)` with `Ric̄ = α ḡ + β ḡ(·,φ·) + γ η⊗η` after the homothety
/// `ḡ = p g + q g(·,φ·) + (1 − p) η⊗η` of a structure with `Ric = −2n g`.
pub fn pq_coefficients(n: usize, p: f64, q: f64) -> (f64, f64, f64) {
    let two_n = 2.0 * n as f64;
    let det = p * p - q * q;
    (-two_n * p / det, two_n * q / det, -two_n * (det - p) / det)
}

impl ConformalData {
    /// The homothety `ḡ = p g + q g(·,φ·) + (1 − p) η⊗η`, `η̄ = η`, which is
    /// `w = 0`, `e^{4u} = p² − q²`, `tanh 2v = q/p`.
    pub fn from_pq(p: f64, q: f64) -> Result<ConformalData> {
        let det = p * p - q * q;
        if det.abs() < 1e-12 {
            return Err(GeometryError::Parameter(format!("p² = q² (p={p}, q={q}) makes the η-Einstein form singular")));
        }
        if p <= q.abs() {
            return Err(GeometryError::Parameter(format!("p={p}, q={q}: the metric needs p > |q|")));
        }
        let data = ConformalData::homothetic(0.25 * det.ln(), 0.5 * (q / p).atanh(), 0.0);
        debug_assert_eq!(data.kind, TransformKind::Homothetic);
        Ok(data)
    }
}

/// Checks that the `(p, q)` homothety of a structure with `Ric = −2n g`
/// has `Ric̄ = −2n/(p²−q²) {p ḡ − q ḡ(·,φ·) + (p² − q² − p) η⊗η}` and that
/// [`eta_einstein_fit`] of the result returns those coefficients.
///
/// The fit works in the basis `{g, g̃, η⊗η}` with `g̃ = g(·,φ·) + η⊗η`, so
/// its `γ` is compared with `γ_h − β`, where `γ_h` is the `η⊗η`
/// coefficient above. A hyperbolic extension has `Ric = −2n g` only on the
/// slice `t = 0`, so for extensions the sample points are moved there.
pub fn check_eta_einstein_form(s: &ApcpcStructure, p: f64, q: f64, sampler: &Sampler, tol: f64) -> Result<CheckReport> {
    let d = ConformalData::from_pq(p, q)?;
    require_para_sasaki_like(s, &Sampler::new(sampler.seed, 8), tol)?;
    let sb = apply_conformal(s, &d)?;
    let dim = s.dim();
    let n = s.n();
    let two_n = 2.0 * n as f64;
    let (alpha, beta, gamma_h) = pq_coefficients(n, p, q);
    let point = |i: usize| {
        let mut x = s.model().sample_point(&mut sampler.rng(i));
        if s.base().is_some() {
            x[0] = 0.0;
        }
        x
    };
    for i in 0..sampler.count {
        let x = point(i);
        let (lambda, res) = einstein_fit(s, &x)?;
        if (lambda + two_n).abs() > tol || res > tol {
            return Err(GeometryError::Precondition(format!(
                "{} does not have Ric = -{two_n} g at {x:?} (λ = {lambda:.6}, residual {res:.3e})",
                s.name()
            )));
        }
    }
    let names = ["eta_einstein", "alpha", "beta", "gamma"];
    let mut report = sampler.report("eta_einstein_form", &names, tol, |i, _| {
        let x = point(i);
        let spb = sb.at(&x)?;
        let ric = spb.geo.ricci_matrix();
        let mut worst = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                let (ea, eb) = (unit(dim, a), unit(dim, b));
                let e = spb.eta(&ea) * spb.eta(&eb);
                let want = alpha * spb.g(&ea, &eb) + beta * spb.g_phi(&ea, &eb) + gamma_h * e;
                worst = worst.max((ric[a * dim + b] - want).abs());
            }
        }
        let fit = eta_einstein_fit(&sb, &x)?;
        Ok(vec![
            worst / two_n,
            (fit.alpha - alpha).abs(),
            (fit.beta - beta).abs(),
            (fit.gamma - (gamma_h - beta)).abs(),
        ])
    })?;
    let fit = eta_einstein_fit(&sb, &point(0))?;
    report.push(
        SubCheck::new("fit_residual", fit.residual, tol)
            .with("alpha", fit.alpha)
            .with("beta", fit.beta)
            .with("gamma", fit.gamma)
            .with("gamma_horizontal", fit.horizontal_form().2),
    );
    Ok(report)
}
