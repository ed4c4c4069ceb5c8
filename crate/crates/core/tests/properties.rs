use proptest::prelude::*;

use parasasaki::constructions::{example1, example4, generic_fixture, hyperbolic_extension};
use parasasaki::report::Sampler;
use parasasaki::tensor::{curvature_symmetry_residuals, inverse_metric, kulkarni_nomizu, Slot, TensorValue};
use parasasaki::transform::{apply_conformal, ConformalData};

fn symmetric(d: usize, m: &[f64]) -> TensorValue {
    let mut t = TensorValue::zeros(d, vec![Slot::Lower; 2], "e");
    for i in 0..d {
        for j in 0..d {
            t.set(&[i, j], m[i * d + j] + m[j * d + i]);
        }
    }
    t
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn riemann_has_curvature_symmetries(seed in 0u64..1000, idx in 0usize..64) {
        let s = generic_fixture(1, 0.2, seed).unwrap();
        let p = s.model().sample_point(&mut Sampler::new(seed, 1).rng(idx));
        let r = s.at(&p).unwrap().geo.riemann_tensor();
        let scale = r.max_abs().max(1.0);
        for res in curvature_symmetry_residuals(&r) {
            prop_assert!(res / scale < 1e-10, "{res}");
        }
    }

    #[test]
    fn kulkarni_nomizu_is_symmetric_and_algebraic(
        a in prop::collection::vec(-2.0f64..2.0, 16),
        b in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let (a, b) = (symmetric(4, &a), symmetric(4, &b));
        let ab = kulkarni_nomizu(&a, &b).unwrap();
        prop_assert!(ab.max_abs_diff(&kulkarni_nomizu(&b, &a).unwrap()).unwrap() < 1e-12);
        for res in curvature_symmetry_residuals(&ab) {
            prop_assert!(res < 1e-12);
        }
    }

    #[test]
    fn raise_then_lower_is_identity(t in -1.4f64..1.4, x in prop::collection::vec(-1.0f64..1.0, 4), slot in 0usize..2) {
        let s = hyperbolic_extension(&example4(2, 2.0, 1.0).unwrap()).unwrap();
        let mut p = s.model().sample_point(&mut Sampler::new(3, 1).rng(0));
        p[0] = t;
        p[1] += 0.2 * x[0];
        p[3] += 0.2 * x[2];
        let geo = s.at(&p).unwrap().geo;
        let g = geo.metric_tensor();
        let gi = inverse_metric(&g).unwrap();
        let ric = geo.ricci_tensor();
        let back = ric.raise_index(slot, &gi).unwrap().lower_index(slot, &g).unwrap();
        prop_assert!(back.max_abs_diff(&ric).unwrap() < 1e-9 * ric.max_abs().max(1.0));
    }

    #[test]
    fn conformal_transformations_compose_additively(
        c in prop::collection::vec(-0.4f64..0.4, 6),
        idx in 0usize..32,
    ) {
        let s = example1(2).unwrap().chart;
        let d1 = ConformalData::parse(&format!("{}*x1", c[0]), &format!("{}*t", c[1]), &c[2].to_string()).unwrap();
        let d2 = ConformalData::parse(&c[3].to_string(), &format!("{}*x2", c[4]), &format!("{}*x3", c[5])).unwrap();
        let two = apply_conformal(&apply_conformal(&s, &d1).unwrap(), &d2).unwrap();
        let one = apply_conformal(&s, &d1.then(&d2)).unwrap();
        let p = s.model().sample_point(&mut Sampler::new(9, 1).rng(idx));
        let (a, b) = (two.at(&p).unwrap(), one.at(&p).unwrap());
        prop_assert!(max_abs(a.geo.metric(), b.geo.metric()) < 1e-12);
        prop_assert!(max_abs(a.xi(), b.xi()) < 1e-12);
        prop_assert!(max_abs(a.eta_covector(), b.eta_covector()) < 1e-12);
    }

    #[test]
    fn inverse_transformation_restores_the_metric(u in -0.5f64..0.5, v in -0.5f64..0.5, w in -0.5f64..0.5) {
        let s = example1(2).unwrap().lie;
        let d = ConformalData::homothetic(u, v, w);
        let back = ConformalData::homothetic(-u, -v, -w);
        let t = apply_conformal(&apply_conformal(&s, &d).unwrap(), &back).unwrap();
        let (a, b) = (s.at(&[0.0; 5]).unwrap(), t.at(&[0.0; 5]).unwrap());
        prop_assert!(max_abs(a.geo.metric(), b.geo.metric()) < 1e-12);
    }
}
