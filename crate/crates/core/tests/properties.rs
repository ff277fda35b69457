use contraction_core::compact_picture::CircleFunction;
use contraction_core::deformation::{
    action_t, inverse_t, phi_t, phi_t_inv, product_t, pullback_t, zoom, DeformedElement,
};
use contraction_core::discrete_series::{ds_basis, ds_rep};
use contraction_core::matgroup::{
    cartan_decompose, iwasawa_decompose, mat_exp, p_from_coords, p_norm, rotation, spd_log,
};
use contraction_core::quasisplit_fine::{qs_rep, t_transform, FineKTypeData};
use contraction_core::report::fit_order;
use contraction_core::waves::{isotypic_project, wave_eval, wave_field, WaveSpec};
use contraction_core::{Complex64, Mat};
use proptest::prelude::*;

fn p2(r: f64) -> impl Strategy<Value = Mat> {
    (-r..r, -r..r).prop_map(|(a, b)| p_from_coords(2, &[a, b]))
}

fn p3(r: f64) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-r..r, 5).prop_map(|c| p_from_coords(3, &c))
}

fn element(t: f64) -> impl Strategy<Value = DeformedElement> {
    (-3.2f64..3.2, p2(1.0))
        .prop_map(move |(th, v)| DeformedElement::new(rotation(th), v, t).unwrap())
}

fn scale() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.05f64..1.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_log_roundtrip(x in p3(1.5)) {
        let back = spd_log(&mat_exp(&x).unwrap()).unwrap();
        prop_assert!((back - &x).amax() < 1e-10);
    }

    #[test]
    fn decompositions_reconstruct(x in p3(1.0), y in p3(1.0)) {
        let g = mat_exp(&x).unwrap() * mat_exp(&y).unwrap();
        let (k, s) = cartan_decompose(&g).unwrap();
        prop_assert!((mat_exp(&s).unwrap() * &k - &g).amax() < 1e-10);
        prop_assert!((&k * k.transpose() - Mat::identity(3, 3)).amax() < 1e-12);
        let iw = iwasawa_decompose(&g).unwrap();
        prop_assert!((iw.reconstruct().unwrap() - &g).amax() < 1e-10);
        for i in 0..3 {
            prop_assert!((iw.n_part[(i, i)] - 1.0).abs() < 1e-12);
            for j in 0..i {
                prop_assert!(iw.n_part[(i, j)] == 0.0);
            }
        }
    }

    #[test]
    fn phi_t_is_a_homomorphism(t in 0.05f64..1.0, a in (-3.2f64..3.2, p2(1.0)), b in (-3.2f64..3.2, p2(1.0))) {
        let a = DeformedElement::new(rotation(a.0), a.1, t).unwrap();
        let b = DeformedElement::new(rotation(b.0), b.1, t).unwrap();
        let ab = product_t(&a, &b).unwrap();
        let lhs = phi_t(&ab).unwrap();
        let rhs = phi_t(&a).unwrap() * phi_t(&b).unwrap();
        prop_assert!((lhs - rhs).amax() < 1e-9);
        let back = phi_t_inv(&phi_t(&a).unwrap(), t).unwrap();
        prop_assert!(back.chart_distance(&a) < 1e-9);
    }

    #[test]
    fn group_axioms(t in scale(), th in (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0), v in (p2(1.0), p2(1.0), p2(1.0))) {
        let a = DeformedElement::new(rotation(th.0), v.0, t).unwrap();
        let b = DeformedElement::new(rotation(th.1), v.1, t).unwrap();
        let c = DeformedElement::new(rotation(th.2), v.2, t).unwrap();
        let left = product_t(&product_t(&a, &b).unwrap(), &c).unwrap();
        let right = product_t(&a, &product_t(&b, &c).unwrap()).unwrap();
        prop_assert!(left.chart_distance(&right) < 1e-8);
        let e = product_t(&a, &inverse_t(&a).unwrap()).unwrap();
        prop_assert!(e.chart_distance(&DeformedElement::identity(2, t)) < 1e-9);
    }

    #[test]
    fn action_is_an_action(t in scale(), a in (-3.0f64..3.0, p2(1.0)), b in (-3.0f64..3.0, p2(1.0)), x in p2(1.5)) {
        let a = DeformedElement::new(rotation(a.0), a.1, t).unwrap();
        let b = DeformedElement::new(rotation(b.0), b.1, t).unwrap();
        let ab = product_t(&a, &b).unwrap();
        let lhs = action_t(&ab, &x).unwrap();
        let rhs = action_t(&a, &action_t(&b, &x).unwrap()).unwrap();
        prop_assert!((lhs - rhs).amax() < 1e-8);
    }

    #[test]
    fn pullback_inverts_action(t in scale(), a in element(0.5), x in p2(1.5)) {
        let a = a.with_t(t);
        let (y, kc) = pullback_t(&a, &x).unwrap();
        let back = action_t(&a, &y).unwrap();
        prop_assert!((back - &x).amax() < 1e-9);
        prop_assert!((&kc * kc.transpose() - Mat::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn zoom_preserves_direction(x in p2(2.0), t in 0.01f64..1.0) {
        let z = zoom(&x, t).unwrap();
        prop_assert!((t * p_norm(&z) - p_norm(&x)).abs() < 1e-12);
    }

    #[test]
    fn wave_zoom_identity(ell in 1.0f64..40.0, th in -3.2f64..3.2, t in 0.01f64..1.0, x in p2(1.5)) {
        let e = WaveSpec::sl2(ell, th, 1.0).unwrap();
        let et = WaveSpec::sl2(t * ell, th, t).unwrap();
        let lhs = wave_eval(&e, &(&x * t)).unwrap();
        let rhs = wave_eval(&et, &x).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-14 * lhs.norm().max(1.0));
    }

    #[test]
    fn wave_is_m_invariant(ell in 1.0f64..40.0, th in -3.2f64..3.2, t in scale(), x in p2(1.5)) {
        let a = wave_eval(&WaveSpec::sl2(ell, th, t).unwrap(), &x).unwrap();
        let b = wave_eval(&WaveSpec::sl2(ell, th + std::f64::consts::PI, t).unwrap(), &x).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn isotypic_projection_is_idempotent(mode in -3i64..=3, th in -3.2f64..3.2, x in p2(1.0)) {
        let f = wave_field(&WaveSpec::sl2(3.0, th, 0.5).unwrap());
        let p = isotypic_project(&f, mode, 64, 0).unwrap();
        let pp = isotypic_project(&p, mode, 64, 0).unwrap();
        prop_assert!((p.eval(&x).unwrap() - pp.eval(&x).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn ds_rep_is_a_homomorphism(t in scale(), a in element(0.5), b in element(0.5), x in p2(1.0), j in 0u32..3) {
        let (a, b) = (a.with_t(t), b.with_t(t));
        let f = ds_basis(j, 2, None).unwrap();
        let lhs = ds_rep(&a, &ds_rep(&b, &f, 2).unwrap(), 2).unwrap().eval(&x).unwrap();
        let rhs = ds_rep(&product_t(&a, &b).unwrap(), &f, 2).unwrap().eval(&x).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-7);
    }

    #[test]
    fn qs_rep_is_a_homomorphism(t in scale(), a in element(0.5), b in element(0.5), x in p2(1.0)) {
        let (a, b) = (a.with_t(t), b.with_t(t));
        let d = FineKTypeData::new(1).unwrap();
        let f = t_transform(&CircleFunction::mode(-1), t, None, &d).unwrap();
        let lhs = qs_rep(&a, &qs_rep(&b, &f, &d).unwrap(), &d).unwrap().eval(&x).unwrap();
        let rhs = qs_rep(&product_t(&a, &b).unwrap(), &f, &d).unwrap().eval(&x).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-7);
    }

    #[test]
    fn fitted_order_recovers_power(c in 0.01f64..100.0, p in 0.5f64..3.0) {
        let ts: Vec<f64> = (1..=8).map(|k| 0.5f64.powi(k)).collect();
        let errs: Vec<f64> = ts.iter().map(|t| c * t.powf(p)).collect();
        prop_assert!((fit_order(&ts, &errs).unwrap() - p).abs() < 1e-9);
    }
}

#[test]
fn fit_order_floor_gives_sentinel() {
    let ts = [0.5, 0.25, 0.125];
    assert_eq!(fit_order(&ts, &[1e-16; 3]).unwrap(), f64::INFINITY);
    assert!(fit_order(&ts[..2], &[1.0, 0.5]).is_err());
    let _ = Complex64::new(0.0, 0.0);
}
