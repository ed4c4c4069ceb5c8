use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{hyperbolic_extension, PhpcrModel, T_RANGE};
use crate::apcpc::ApcpcStructure;
use crate::error::{GeometryError, Result};
use crate::geometry::{ChartModel, LieFrameModel};
use crate::jet::{invert, Jet, JetMap};
use crate::tensor::invert_matrix;

/// Box used for flat coordinates.
pub const FLAT_BOX: (f64, f64) = (-1.0, 1.0);
/// Polar angles stay this far from the poles of a spherical chart.
pub const POLE_MARGIN: f64 = 0.2;
/// Half-width of the coordinate box inside each Poincaré ball.
pub const BALL_BOX: f64 = 0.45;

fn identity(d: usize) -> Vec<f64> {
    (0..d * d).map(|k| if k / d == k % d { 1.0 } else { 0.0 }).collect()
}

/// `φ e_i = e_{n+i}`, `φ e_{n+i} = e_i`, `φ e_0 = 0` on a `(2n+1)`-frame
/// whose first vector is ξ.
pub fn standard_phi(n: usize) -> Vec<f64> {
    let d = 2 * n + 1;
    let mut phi = vec![0.0; d * d];
    for i in 1..=n {
        phi[(n + i) * d + i] = 1.0;
        phi[i * d + n + i] = 1.0;
    }
    phi
}

/// The swap `P ∂_i = ∂_{n+i}`, `P ∂_{n+i} = ∂_i` on `ℝ^{2n}`.
pub fn swap_p(n: usize) -> Vec<f64> {
    let d = 2 * n;
    let mut p = vec![0.0; d * d];
    for i in 0..n {
        p[(n + i) * d + i] = 1.0;
        p[i * d + n + i] = 1.0;
    }
    p
}

fn constant_map(values: Vec<f64>) -> JetMap {
    Arc::new(move |x: &[Jet]| values.iter().map(|&v| x[0].cst(v)).collect())
}

/// Flat `ℝ^{2n}` with constant metric `h` and paracomplex structure `p`.
pub fn flat_phpcr_with(name: &str, n: usize, h: Vec<f64>, p: Vec<f64>) -> Result<PhpcrModel> {
    let d = 2 * n;
    if h.len() != d * d {
        return Err(GeometryError::Shape("flat metric has wrong size".into()));
    }
    let chart = ChartModel::new(name, d, constant_map(h), vec![FLAT_BOX; d])?;
    PhpcrModel::with_constant_p(chart, p)
}

/// Euclidean `ℝ^{2n}` with the swap structure.
pub fn flat_phpcr(n: usize) -> Result<PhpcrModel> {
    if n == 0 {
        return Err(GeometryError::Parameter("n must be at least 1".into()));
    }
    flat_phpcr_with(&format!("flat{}", 2 * n), n, identity(2 * n), swap_p(n))
}

/// Left-invariant model of the solvable group with `[e_0,e_i] = −e_{n+i}`,
/// `[e_0,e_{n+i}] = −e_i`, orthonormal frame and `ξ = e_0`.
pub fn example1_lie(n: usize) -> Result<ApcpcStructure> {
    if n == 0 {
        return Err(GeometryError::Parameter("example 1 needs n >= 1".into()));
    }
    let d = 2 * n + 1;
    let mut brackets = Vec::new();
    for i in 1..=n {
        brackets.push((0, i, n + i, -1.0));
        brackets.push((0, n + i, i, -1.0));
    }
    let mut unit0 = vec![0.0; d];
    unit0[0] = 1.0;
    let model = LieFrameModel::new(format!("example1(n={n})"), d, &brackets, identity(d))?
        .with_structure(standard_phi(n), unit0.clone(), unit0)?;
    ApcpcStructure::new(model)
}

/// Both forms of Example 1 and the map between their frames.
#[derive(Clone, Debug)]
pub struct Example1 {
    pub n: usize,
    pub lie: ApcpcStructure,
    /// Chart form on `(t, x^1, …, x^{2n})`: the hyperbolic extension of
    /// flat `ℝ^{2n}` with the swap structure.
    pub chart: ApcpcStructure,
}

impl Example1 {
    /// Coframe `e^0 = dt`, `e^i = cosh t dx^i + sinh t dx^{n+i}`,
    /// `e^{n+i} = sinh t dx^i + cosh t dx^{n+i}` as rows of chart components.
    pub fn coframe_at(&self, t: f64) -> Vec<Vec<f64>> {
        let n = self.n;
        let d = 2 * n + 1;
        let (c, s) = (t.cosh(), t.sinh());
        let mut rows = vec![vec![0.0; d]; d];
        rows[0][0] = 1.0;
        for i in 1..=n {
            rows[i][i] = c;
            rows[i][n + i] = s;
            rows[n + i][i] = s;
            rows[n + i][n + i] = c;
        }
        rows
    }

    /// Frame vectors dual to [`Example1::coframe_at`], in chart components.
    pub fn frame_at(&self, t: f64) -> Vec<Vec<f64>> {
        let n = self.n;
        let d = 2 * n + 1;
        let (c, s) = (t.cosh(), t.sinh());
        let mut cols = vec![vec![0.0; d]; d];
        cols[0][0] = 1.0;
        for i in 1..=n {
            cols[i][i] = c;
            cols[i][n + i] = -s;
            cols[n + i][i] = -s;
            cols[n + i][n + i] = c;
        }
        cols
    }
}

pub fn example1(n: usize) -> Result<Example1> {
    let lie = example1_lie(n)?;
    let base = flat_phpcr(n)?;
    let chart = hyperbolic_extension(&base)?;
    let chart_model = chart.model().as_chart().expect("chart").clone().renamed(format!("example1-chart(n={n})"));
    let chart = ApcpcStructure::new(chart_model)?.with_base(base);
    Ok(Example1 { n, lie, chart })
}

/// Brackets of the five-dimensional group of Example 2.
pub fn example2_brackets(lambda: f64, mu: f64) -> Vec<(usize, usize, usize, f64)> {
    let mut b = Vec::new();
    let mut push = |j: usize, coeffs: [f64; 4]| {
        for (k, &v) in coeffs.iter().enumerate() {
            if v != 0.0 {
                b.push((0, j, k + 1, v));
            }
        }
    };
    push(1, [0.0, lambda, -1.0, mu]);
    push(2, [-lambda, 0.0, -mu, -1.0]);
    push(3, [-1.0, mu, 0.0, lambda]);
    push(4, [-mu, -1.0, -lambda, 0.0]);
    b
}

pub fn example2_lie(lambda: f64, mu: f64) -> Result<ApcpcStructure> {
    if !lambda.is_finite() || !mu.is_finite() {
        return Err(GeometryError::Parameter("λ and μ must be finite".into()));
    }
    let mut unit0 = vec![0.0; 5];
    unit0[0] = 1.0;
    let model = LieFrameModel::new(format!("example2(l={lambda},m={mu})"), 5, &example2_brackets(lambda, mu), identity(5))?
        .with_structure(standard_phi(2), unit0.clone(), unit0)?;
    ApcpcStructure::new(model)
}

/// Example 2 as a Lie model, with its chart form when `μ = 0`, `λ ≠ 0`.
#[derive(Clone, Debug)]
pub struct Example2 {
    pub lambda: f64,
    pub mu: f64,
    pub lie: ApcpcStructure,
    pub chart: Option<ApcpcStructure>,
}

impl Example2 {
    /// Coframe of the chart form, rows in `(t, x^1..x^4)` components.
    pub fn coframe_at(&self, t: f64) -> Vec<Vec<f64>> {
        let lt = self.lambda * t;
        let (f1, f2) = (t.exp() * lt.cos(), (-t).exp() * lt.cos());
        let (f3, f4) = (t.exp() * lt.sin(), (-t).exp() * lt.sin());
        vec![
            vec![1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, f1, f2, f3, f4],
            vec![0.0, -f3, -f4, f1, f2],
            vec![0.0, f1, -f2, f3, -f4],
            vec![0.0, -f3, f4, f1, -f2],
        ]
    }

    pub fn frame_at(&self, t: f64) -> Vec<Vec<f64>> {
        let rows = self.coframe_at(t);
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let inv = invert_matrix(&flat, 5).expect("coframe invertible");
        (0..5).map(|a| (0..5).map(|i| inv[i * 5 + a]).collect()).collect()
    }
}

/// Flat `ℝ⁴` with `h = 2Σ(dx^i)²` and `P = diag(1,−1,1,−1)`; its extension
/// has the metric with coefficients `2cosh(2t) ± 2sinh(2t)`.
pub fn example2_base() -> Result<PhpcrModel> {
    let mut h = identity(4);
    h.iter_mut().for_each(|v| *v *= 2.0);
    let mut p = vec![0.0; 16];
    for (i, s) in [1.0, -1.0, 1.0, -1.0].iter().enumerate() {
        p[i * 4 + i] = *s;
    }
    flat_phpcr_with("flat4-split", 2, h, p)
}

pub fn example2(lambda: f64, mu: f64) -> Result<Example2> {
    let lie = example2_lie(lambda, mu)?;
    let chart = if mu == 0.0 && lambda != 0.0 { Some(example2_chart_form(lambda)?) } else { None };
    Ok(Example2 { lambda, mu, lie, chart })
}

/// Chart form of Example 2; defined only for `μ = 0`, `λ ≠ 0`.
pub fn example2_chart(lambda: f64, mu: f64) -> Result<Example2> {
    if mu != 0.0 || lambda == 0.0 {
        return Err(GeometryError::Parameter(format!(
            "the chart form of example 2 needs mu = 0 and lambda != 0 (got lambda={lambda}, mu={mu})"
        )));
    }
    example2(lambda, mu)
}

fn example2_chart_form(lambda: f64) -> Result<ApcpcStructure> {
    let base = example2_base()?;
    let ext = hyperbolic_extension(&base)?;
    let chart = ext.model().as_chart().expect("chart").clone().renamed(format!("example2-chart(l={lambda})"));
    Ok(ApcpcStructure::new(chart)?.with_base(base))
}

/// Block-diagonal metric of a product of two charts.
pub fn product_metric(a: JetMap, da: usize, b: JetMap, db: usize) -> JetMap {
    let d = da + db;
    Arc::new(move |x: &[Jet]| {
        let ga = a(&x[..da]);
        let gb = b(&x[da..]);
        let mut out = vec![x[0].cst(0.0); d * d];
        for i in 0..da {
            for j in 0..da {
                out[i * d + j] = ga[i * da + j].clone();
            }
        }
        for i in 0..db {
            for j in 0..db {
                out[(da + i) * d + da + j] = gb[i * db + j].clone();
            }
        }
        out
    })
}

/// `c · 4|dx|² / (1 − |x|²)²` on the unit ball in `ℝ^n`.
pub fn poincare_ball_metric(n: usize, c: f64) -> JetMap {
    Arc::new(move |x: &[Jet]| {
        let mut r2 = x[0].cst(0.0);
        for xi in x.iter().take(n) {
            r2 += &xi.square();
        }
        let conf = (x[0].cst(1.0) - r2).square().recip() * (4.0 * c);
        let mut out = vec![x[0].cst(0.0); n * n];
        for i in 0..n {
            out[i * n + i] = conf.clone();
        }
        out
    })
}

/// Round metric of radius `r` on `S^n` in hyperspherical angles
/// `r²(dθ₁² + sin²θ₁ dθ₂² + sin²θ₁ sin²θ₂ dθ₃² + …)`.
pub fn sphere_metric(n: usize, r: f64) -> JetMap {
    Arc::new(move |x: &[Jet]| {
        let mut out = vec![x[0].cst(0.0); n * n];
        let mut w = x[0].cst(r * r);
        for i in 0..n {
            out[i * n + i] = w.clone();
            if i + 1 < n {
                w = &w * &x[i].sin().square();
            }
        }
        out
    })
}

fn split_p(n: usize) -> Vec<f64> {
    let d = 2 * n;
    let mut p = vec![0.0; d * d];
    for i in 0..d {
        p[i * d + i] = if i < n { 1.0 } else { -1.0 };
    }
    p
}

/// Product of two Poincaré balls scaled so each factor has `Ric = −2n h`,
/// with `P = +1` on the first factor and `−1` on the second.
pub fn example3(n: usize) -> Result<PhpcrModel> {
    if n < 2 {
        return Err(GeometryError::Parameter(
            "example 3 needs n >= 2: a one-dimensional factor has zero Ricci curvature".into(),
        ));
    }
    let c = (n as f64 - 1.0) / (2.0 * n as f64);
    let metric = product_metric(poincare_ball_metric(n, c), n, poincare_ball_metric(n, c), n);
    let chart = ChartModel::new(format!("example3(n={n})"), 2 * n, metric, vec![(-BALL_BOX, BALL_BOX); 2 * n])?;
    PhpcrModel::with_constant_p(chart, split_p(n))
}

/// Radii of the two sphere factors of Example 4.
pub fn example4_radii(a: f64, b: f64) -> (f64, f64) {
    (((a + b) / 2.0).sqrt(), ((a - b) / 2.0).sqrt())
}

/// The `P`-invariant sphere `h'(z,z) = a`, `h̃'(z,z) = b` in `ℝ^{2n+2}`,
/// realized as `S^n(√((a+b)/2)) × S^n(√((a−b)/2))` in hyperspherical
/// charts, with `P = +1` on the first factor and `−1` on the second.
pub fn example4(n: usize, a: f64, b: f64) -> Result<PhpcrModel> {
    if n < 2 {
        return Err(GeometryError::Parameter("example 4 needs n >= 2".into()));
    }
    if !(a > b.abs()) {
        return Err(GeometryError::Parameter(format!("example 4 needs a > |b| (got a={a}, b={b})")));
    }
    let (rp, rm) = example4_radii(a, b);
    let metric = product_metric(sphere_metric(n, rp), n, sphere_metric(n, rm), n);
    let mut domain = Vec::with_capacity(2 * n);
    for _ in 0..2 {
        for k in 0..n {
            // the last angle of each factor is azimuthal
            if k + 1 == n {
                domain.push((-3.0, 3.0));
            } else {
                domain.push((POLE_MARGIN, std::f64::consts::PI - POLE_MARGIN));
            }
        }
    }
    let chart = ChartModel::new(format!("example4(n={n},a={a},b={b})"), 2 * n, metric, domain)?;
    PhpcrModel::with_constant_p(chart, split_p(n))
}

/// `ℝ × ℝ^{2n}` with the product metric `dt² + Σ(dx^i)²`, `ξ = ∂_t` and the
/// swap structure: every structure tensor is parallel.
pub fn parallel_fixture(n: usize) -> Result<ApcpcStructure> {
    if n == 0 {
        return Err(GeometryError::Parameter("n must be at least 1".into()));
    }
    let d = 2 * n + 1;
    let mut unit0 = vec![0.0; d];
    unit0[0] = 1.0;
    let chart = ChartModel::new(format!("parallel(n={n})"), d, constant_map(identity(d)), {
        let mut dom = vec![T_RANGE];
        dom.extend(vec![FLAT_BOX; 2 * n]);
        dom
    })?
    .with_structure(constant_map(standard_phi(n)), constant_map(unit0.clone()), constant_map(unit0));
    ApcpcStructure::new(chart)
}

/// A structure with no special properties: an orthonormal coframe
/// `E(x) = I + ε·S(x)` with smooth bump `S`, `η = e^0`, `ξ = e_0` and `φ`
/// standard in that frame. Deterministic in `seed`.
pub fn generic_fixture(n: usize, eps: f64, seed: u64) -> Result<ApcpcStructure> {
    if n == 0 {
        return Err(GeometryError::Parameter("n must be at least 1".into()));
    }
    let d = 2 * n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<(Vec<f64>, f64)> = (0..d * d)
        .map(|_| ((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect(), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let coframe = Arc::new(move |x: &[Jet]| -> Vec<Jet> {
        waves
            .iter()
            .enumerate()
            .map(|(k, (w, c))| {
                let mut arg = x[0].cst(*c);
                for (wi, xi) in w.iter().zip(x) {
                    arg += &(xi * *wi);
                }
                let base = if k / d == k % d { 1.0 } else { 0.0 };
                arg.sin() * eps + base
            })
            .collect()
    });
    let phi0 = standard_phi(n);

    let cf = coframe.clone();
    let metric: JetMap = Arc::new(move |x: &[Jet]| {
        let e = cf(x);
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut s = x[0].cst(0.0);
                for a in 0..d {
                    s += &(&e[a * d + i] * &e[a * d + j]);
                }
                out.push(s);
            }
        }
        out
    });
    let cf = coframe.clone();
    let eta: JetMap = Arc::new(move |x: &[Jet]| cf(x)[..d].to_vec());
    let cf = coframe.clone();
    let xi: JetMap = Arc::new(move |x: &[Jet]| {
        let f = invert(&cf(x), d).expect("coframe invertible on the sample box");
        (0..d).map(|i| f[i * d].clone()).collect()
    });
    let cf = coframe;
    let phi: JetMap = Arc::new(move |x: &[Jet]| {
        let e = cf(x);
        let f = invert(&e, d).expect("coframe invertible on the sample box");
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut s = x[0].cst(0.0);
                for a in 0..d {
                    for b in 0..d {
                        let p = phi0[a * d + b];
                        if p != 0.0 {
                            s += &(&f[i * d + a] * &e[b * d + j] * p);
                        }
                    }
                }
                out.push(s);
            }
        }
        out
    });
    let chart = ChartModel::new(format!("generic(n={n},seed={seed})"), d, metric, vec![FLAT_BOX; d])?
        .with_structure(phi, xi, eta);
    ApcpcStructure::new(chart)
}
