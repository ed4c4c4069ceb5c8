//! Acceptance criteria, one PASS/FAIL line each at the stated tolerance.
//! Runs without the libtest harness so the lines come out in order.

use std::time::Instant;

use parasasaki::apcpc::{
    build_cone, check_cone_parallel, check_para_sasaki_like, cone_nabla_p, ApcpcStructure, DEFAULT_TOL,
};
use parasasaki::constructions::{example1, example2, example3, example4, hyperbolic_extension, parallel_fixture};
use parasasaki::curvature::{check_curf, check_xi_curvature, decomposition_values, einstein_fit, eta_einstein_fit, SliceGeometry};
use parasasaki::geometry::ManifoldModel;
use parasasaki::report::{random_vector, Sampler, DEFAULT_SEED};
use parasasaki::tensor::{curvature_symmetry_residuals, inverse_metric, kulkarni_nomizu, Slot, TensorValue};
use parasasaki::transform::{
    apply_conformal, check_homothetic_laws, check_sssl, verify_lemma_ff, ConformalData,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

fn sampler(points: usize) -> Sampler {
    Sampler::new(DEFAULT_SEED, points)
}

fn ext4() -> ApcpcStructure {
    hyperbolic_extension(&example4(2, 2.0, 1.0).unwrap()).unwrap()
}

fn ext3() -> ApcpcStructure {
    hyperbolic_extension(&example3(2).unwrap()).unwrap()
}

fn base_point(s: &ApcpcStructure, i: usize, t: f64) -> Vec<f64> {
    let mut p = s.model().sample_point(&mut sampler(1).rng(i));
    p[0] = t;
    p
}

fn c1_para_sasaki_like_corpus() -> Outcome {
    let start = Instant::now();
    let mut fixtures = Vec::new();
    for n in 1..=3 {
        let e = example1(n).unwrap();
        fixtures.push(e.lie);
        fixtures.push(e.chart);
    }
    for (l, m) in [(0.0, 0.0), (1.0, 0.0), (2.0, 3.0)] {
        fixtures.push(example2(l, m).unwrap().lie);
    }
    let mut worst = (0.0f64, String::new());
    for s in &fixtures {
        let r = check_para_sasaki_like(s, &sampler(32), DEFAULT_TOL).unwrap();
        if r.max_residual >= worst.0 || r.max_residual.is_nan() {
            worst = (r.max_residual, s.name().to_string());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst.0 < 1e-8 && secs < 10.0,
        format!("{} fixtures, max residual {:.2e} ({}), {secs:.2} s", fixtures.len(), worst.0, worst.1),
    )
}

fn c2_cone() -> Outcome {
    let radii = [0.7, 1.0, 1.5];
    let s = example1(2).unwrap().chart;
    let r = check_cone_parallel(&s, &sampler(32), &radii, DEFAULT_TOL).unwrap();
    // counterexample: predicted ǧ((∇̌_X P̌)Y, ξ) = r² g(X,Y) on the parallel product
    let flat = parallel_fixture(2).unwrap();
    let cone = build_cone(&flat).unwrap();
    let mut worst = 0.0f64;
    for i in 0..8 {
        let mut rng = sampler(8).rng(i);
        let p = flat.model().sample_point(&mut rng);
        let sp = flat.at(&p).unwrap();
        let x = sp.horizontal(&random_vector(&mut rng, 5));
        let y = sp.horizontal(&random_vector(&mut rng, 5));
        let mut xi = sp.xi().to_vec();
        xi.push(0.0);
        for &rad in &radii {
            let got = cone_nabla_p(&cone, &p, rad, &x, &y, &xi).unwrap();
            worst = worst.max((got - rad * rad * sp.g(&x, &y)).abs());
        }
    }
    outcome(
        r.max_residual < 1e-8 && worst < 1e-8,
        format!("‖∇̌P̌‖ {:.3e}; counterexample component off by {worst:.3e}", r.max_residual),
    )
}

fn c3_curvature_identities() -> Outcome {
    let mut fixtures = Vec::new();
    for n in 1..=3 {
        let e = example1(n).unwrap();
        fixtures.push(e.lie);
        fixtures.push(e.chart);
    }
    for (l, m) in [(0.0, 0.0), (1.0, 0.0), (2.0, 3.0)] {
        fixtures.push(example2(l, m).unwrap().lie);
    }
    fixtures.push(ext3());
    fixtures.push(ext4());
    let mut worst = 0.0f64;
    let mut ric_xi = 0.0f64;
    for s in &fixtures {
        let a = check_curf(s, &sampler(64), DEFAULT_TOL).unwrap();
        let b = check_xi_curvature(s, &sampler(64), DEFAULT_TOL).unwrap();
        worst = worst.max(a.max_residual).max(b.max_residual);
        if s.n() == 2 {
            for i in 0..8 {
                let sp = s.at(&s.model().sample_point(&mut sampler(8).rng(i))).unwrap();
                ric_xi = ric_xi.max((sp.geo.ricci(sp.xi(), sp.xi()) + 4.0).abs());
            }
        }
    }
    outcome(
        worst < 1e-8 && ric_xi < 1e-9,
        format!("{} fixtures, identities {worst:.2e}, |Ric(ξ,ξ)+4| {ric_xi:.2e}", fixtures.len()),
    )
}

fn c4_decomposition() -> Outcome {
    let s = ext4();
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for t in [-1.0, 0.0, 1.0] {
        for i in 0..4 {
            let v = decomposition_values(&s, &base_point(&s, i, t)).unwrap();
            a = a.max((v.scal - v.scal_h + 4.0).abs());
            b = b.max((v.scal_star - v.scal_h_star).abs());
        }
    }
    outcome(a < 1e-7 && b < 1e-7, format!("|Scal−Scal^h+4| {a:.2e}, |Scal*−Scal^h*| {b:.2e}"))
}

fn c5_einstein() -> Outcome {
    let s = ext3();
    let mut lines = Vec::new();
    let mut ok = true;
    for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let p = base_point(&s, 0, t);
        let (lambda, _) = einstein_fit(&s, &p).unwrap();
        let scal = s.at(&p).unwrap().geo.scalar();
        ok &= (lambda + 4.0).abs() < 1e-7 && (scal + 20.0).abs() < 1e-6;
        lines.push(format!("t={t}: λ={lambda:.6} Scal={scal:.6}"));
    }
    let base = example3(2).unwrap();
    let mut slice = 0.0f64;
    for i in 0..8 {
        let y = ManifoldModel::from(base.chart().clone()).sample_point(&mut sampler(8).rng(i));
        let geo = base.geometry(&y).unwrap();
        let (ric, h) = (geo.ricci_matrix(), geo.metric());
        slice = slice.max(ric.iter().zip(h).map(|(r, h)| (r + 4.0 * h).powi(2)).sum::<f64>().sqrt());
    }
    ok &= slice < 1e-7;
    outcome(ok, format!("{}; slice ‖Ric^h+4h‖ {slice:.2e}", lines.join(", ")))
}

/// `R' = (a(π₁ + π₂) − bπ₃)/(a² − b²)` with `π₁ = ½ h⊙h`, `π₂ = ½ h̃⊙h̃`, `π₃ = h⊙h̃`.
fn example4_oracle(h: &TensorValue, p: &[f64], a: f64, b: f64) -> TensorValue {
    let d = h.dim();
    let mut ht = TensorValue::zeros(d, vec![Slot::Lower; 2], h.frame_id().to_string());
    for i in 0..d {
        for j in 0..d {
            ht.set(&[i, j], (0..d).map(|k| h.get(&[i, k]) * p[k * d + j]).sum());
        }
    }
    let pi1 = kulkarni_nomizu(h, h).unwrap().scaled(0.5);
    let pi2 = kulkarni_nomizu(&ht, &ht).unwrap().scaled(0.5);
    let pi3 = kulkarni_nomizu(h, &ht).unwrap();
    pi1.lincomb(a, &pi2, a).unwrap().lincomb(1.0, &pi3, -b).unwrap().scaled(1.0 / (a * a - b * b))
}

fn c6_example4() -> Outcome {
    let (a, b) = (2.0, 1.0);
    let base = example4(2, a, b).unwrap();
    let (mut rnu, mut scal, mut scal_star) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..8 {
        let y = ManifoldModel::from(base.chart().clone()).sample_point(&mut sampler(8).rng(i));
        let geo = base.geometry(&y).unwrap();
        let want = example4_oracle(&geo.metric_tensor(), &base.p_at(&y), a, b);
        for x in 0..4 {
            for yy in 0..4 {
                for z in 0..4 {
                    for w in 0..4 {
                        let r = geo.riemann4(&unit(4, x), &unit(4, yy), &unit(4, z), &unit(4, w));
                        rnu = rnu.max((r - want.get(&[x, yy, z, w])).abs());
                    }
                }
            }
        }
        let mut q = vec![0.0];
        q.extend(&y);
        scal = scal.max((geo.scalar() - 16.0 / 3.0).abs());
        scal_star = scal_star.max((SliceGeometry::at(&base, &q).unwrap().scalar_star() + 8.0 / 3.0).abs());
    }
    let s = ext4();
    let fit = eta_einstein_fit(&s, &base_point(&s, 0, 0.0)).unwrap();
    let want = [4.0 / 3.0, -2.0 / 3.0, -16.0 / 3.0];
    let got = [fit.alpha, fit.beta, fit.gamma];
    let fit_err = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    let (_, _, gh) = fit.horizontal_form();
    outcome(
        rnu < 1e-7 && scal < 1e-7 && scal_star < 1e-7 && fit_err < 1e-6,
        format!(
            "R^h {rnu:.2e}, Scal' {scal:.2e}, Scal'* {scal_star:.2e}; fit ({:.6}, {:.6}, {:.6}) vs (4/3, −2/3, −16/3), \
             γ in the g(·,φ·) basis {gh:.6}",
            fit.alpha, fit.beta, fit.gamma
        ),
    )
}

fn c7_lemma() -> Outcome {
    let s = example1(2).unwrap().chart;
    let d = ConformalData::parse("0.1*x1", "0.2*x2", "0.3*t").unwrap();
    let ff = verify_lemma_ff(&s, &d, &sampler(32), 1e-7).unwrap();
    let id = verify_lemma_ff(&s, &ConformalData::identity(), &sampler(32), 1e-12).unwrap();
    outcome(
        ff.max_residual < 1e-7 && id.max_residual < 1e-12,
        format!("(u,v,w) = (0.1x1, 0.2x2, 0.3t): {:.2e}; identity {:.2e}", ff.max_residual, id.max_residual),
    )
}

fn c8_preservation() -> Outcome {
    let s = example1(2).unwrap().chart;
    let good = ConformalData::parse(
        "0.1*sin(x1 + x3) + 0.05*(x2 - x4)",
        "0.1*sin(x1 + x3) - 0.05*(x2 - x4)",
        "0",
    )
    .unwrap();
    let bad = ConformalData::parse("x1", "0", "0").unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, d, want) in [("paraholomorphic", &good, true), ("violating", &bad, false)] {
        let (pred, _) = check_sssl(&s, d, &sampler(32), DEFAULT_TOL).unwrap();
        let t = apply_conformal(&s, d).unwrap();
        let direct = check_para_sasaki_like(&t, &sampler(32), DEFAULT_TOL).unwrap().pass;
        ok &= pred == want && direct == want;
        parts.push(format!("{name}: predicate {pred}, direct {direct}"));
    }
    outcome(ok, parts.join("; "))
}

fn c9_homothety() -> Outcome {
    let triples = [(0.3, 0.2, 0.1), (-0.2, 0.0, 0.3), (0.1, -0.3, 0.0)];
    let fixtures = [example1(2).unwrap().lie, ext4()];
    let (mut ri, mut scal, mut scal_star, mut trace) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut bar = 0.0f64;
    for s in &fixtures {
        for &(u, v, w) in &triples {
            let d = ConformalData::homothetic(u, v, w);
            let r = check_homothetic_laws(s, &d, &sampler(16), DEFAULT_TOL).unwrap();
            ri = ri.max(r.residual("ricci_invariance"));
            scal = scal.max(r.residual("scal_law"));
            scal_star = scal_star.max(r.residual("scal_star_law"));
            trace = trace.max(r.residual("scal_star_trace_law"));
        }
    }
    let e = example1(2).unwrap().lie;
    for &(u, v, w) in &triples {
        let t = apply_conformal(&e, &ConformalData::homothetic(u, v, w)).unwrap();
        let got = t.at(&[0.0; 5]).unwrap().geo.scalar();
        bar = bar.max((got + 4.0 * (-2.0 * w).exp()).abs());
    }
    outcome(
        ri < 1e-8 && scal < 1e-7 && scal_star < 1e-7 && bar < 1e-7,
        format!(
            "ri {ri:.2e}, Scal {scal:.2e}, Scal* {scal_star:.2e} (trace law {trace:.2e}), Scal̄ vs −4e^(−2w) {bar:.2e}"
        ),
    )
}

fn c10_properties() -> Outcome {
    let start = Instant::now();
    let e = example1(2).unwrap();
    let fixtures = [e.lie.clone(), e.chart.clone(), ext4(), example2(2.0, 3.0).unwrap().lie];
    let cases = 32;
    let mut sym = 0.0f64;
    let mut kn = 0.0f64;
    let mut round = 0.0f64;
    for s in &fixtures {
        for i in 0..cases {
            let p = s.model().sample_point(&mut sampler(cases).rng(i));
            let geo = s.at(&p).unwrap().geo;
            let r = geo.riemann_tensor();
            let scale = r.max_abs().max(1.0);
            sym = sym.max(curvature_symmetry_residuals(&r).iter().fold(0.0f64, |m, x| m.max(*x)) / scale);
            let g = geo.metric_tensor();
            let gi = inverse_metric(&g).unwrap();
            let ric = geo.ricci_tensor();
            let back = ric.raise_index(1, &gi).unwrap().lower_index(1, &g).unwrap();
            round = round.max(back.max_abs_diff(&ric).unwrap() / ric.max_abs().max(1.0));
        }
    }
    let mut rng = sampler(1).rng(0);
    for _ in 0..cases {
        let sym_matrix = |rng: &mut _| {
            let m = random_vector(rng, 16);
            let mut t = TensorValue::zeros(4, vec![Slot::Lower; 2], "e");
            for i in 0..4 {
                for j in 0..4 {
                    t.set(&[i, j], m[i * 4 + j] + m[j * 4 + i]);
                }
            }
            t
        };
        let (a, b) = (sym_matrix(&mut rng), sym_matrix(&mut rng));
        let ab = kulkarni_nomizu(&a, &b).unwrap();
        kn = kn.max(curvature_symmetry_residuals(&ab).iter().fold(0.0f64, |m, x| m.max(*x)));
        kn = kn.max(ab.max_abs_diff(&kulkarni_nomizu(&b, &a).unwrap()).unwrap());
    }
    // one transformation after another equals the summed triple
    let chart = &e.chart;
    let (d1, d2) = (
        ConformalData::parse("0.1*x1", "0.05*x2*t", "0.2").unwrap(),
        ConformalData::parse("-0.3", "0.1*x3", "0.1*t").unwrap(),
    );
    let two = apply_conformal(&apply_conformal(chart, &d1).unwrap(), &d2).unwrap();
    let one = apply_conformal(chart, &d1.then(&d2)).unwrap();
    let mut group = 0.0f64;
    for i in 0..cases {
        let p = chart.model().sample_point(&mut sampler(cases).rng(i));
        let (a, b) = (two.at(&p).unwrap(), one.at(&p).unwrap());
        let da = a.geo.metric().iter().zip(b.geo.metric()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let dx = a.xi().iter().zip(b.xi()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        group = group.max(da).max(dx);
    }
    // Lie and chart forms of Example 1 in the same orthonormal frame
    let lie = e.lie.at(&[0.0; 5]).unwrap();
    let mut cross = 0.0f64;
    for i in 0..cases {
        let p = e.chart.model().sample_point(&mut sampler(cases).rng(i));
        let sp = e.chart.at(&p).unwrap();
        let frame = e.frame_at(p[0]);
        for a in 0..5 {
            for b in 0..5 {
                cross = cross.max((sp.geo.ricci(&frame[a], &frame[b]) - lie.geo.ricci(&unit(5, a), &unit(5, b))).abs());
                for c in 0..5 {
                    let f = sp.f(&frame[a], &frame[b], &frame[c]) - lie.f(&unit(5, a), &unit(5, b), &unit(5, c));
                    cross = cross.max(f.abs());
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let worst = sym.max(kn).max(round).max(group).max(cross);
    outcome(
        worst < 1e-8 && secs < 60.0,
        format!(
            "symmetries {sym:.1e}, Kulkarni–Nomizu {kn:.1e}, raise/lower {round:.1e}, group {group:.1e}, \
             cross-backend {cross:.1e}, {secs:.2} s"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("para-Sasaki-like corpus", c1_para_sasaki_like_corpus),
        ("cone criterion", c2_cone),
        ("curvature identities", c3_curvature_identities),
        ("horizontal decomposition", c4_decomposition),
        ("Einstein extension", c5_einstein),
        ("Example 4 closed forms", c6_example4),
        ("transformation of F", c7_lemma),
        ("para-Sasaki-like preservation", c8_preservation),
        ("homothetic invariants", c9_homothety),
        ("property suites", c10_properties),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
