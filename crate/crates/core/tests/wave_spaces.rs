use contraction_core::compact_picture::{CircleFunction, Parity};
use contraction_core::deformation::DeformedElement;
use contraction_core::matgroup::{p_from_coords, rotation, Covector};
use contraction_core::report::{dyadic_ladder, strictly_decreasing};
use contraction_core::waves::{poisson_closed, quasi_regular, zoom_field};
use contraction_core::{Complex64, Mat};
use nalgebra::{DMatrix, DVector};

fn even_f() -> CircleFunction {
    CircleFunction::from_pairs(
        Parity::Trivial,
        &[
            (0, Complex64::new(1.0, 0.0)),
            (2, Complex64::new(0.4, -0.2)),
            (-4, Complex64::new(0.0, 0.3)),
        ],
    )
    .unwrap()
}

fn square(range: f64, per_axis: usize) -> Vec<Mat> {
    let step = 2.0 * range / (per_axis - 1) as f64;
    (0..per_axis * per_axis)
        .map(|i| {
            let (a, b) = (i % per_axis, i / per_axis);
            p_from_coords(2, &[-range + step * a as f64, -range + step * b as f64])
        })
        .collect()
}

/// `π_t(a)` maps wave superpositions to wave superpositions: the image is
/// recovered from Poisson transforms of even modes by least squares.
#[test]
fn superpositions_are_stable() {
    let (lambda, t, nodes) = (Covector::sl2(3.0), 0.6, 192);
    let a = DeformedElement::new(rotation(0.8), p_from_coords(2, &[0.3, -0.2]), t).unwrap();
    let moved = quasi_regular(&a, &poisson_closed(&even_f(), &lambda, t, nodes).unwrap()).unwrap();
    let points = square(1.0, 15);
    let modes: Vec<i64> = (-24..=24).filter(|j| j % 2 == 0).collect();
    let basis: Vec<_> = modes
        .iter()
        .map(|j| poisson_closed(&CircleFunction::mode(*j), &lambda, t, nodes).unwrap())
        .collect();
    let a_mat = DMatrix::from_fn(points.len(), modes.len(), |i, j| {
        basis[j].eval(&points[i]).unwrap()
    });
    let b = DVector::from_fn(points.len(), |i, _| moved.eval(&points[i]).unwrap());
    let coef = a_mat.clone().svd(true, true).solve(&b, 1e-14).unwrap();
    let residual = (&a_mat * coef - &b).camax() / b.camax();
    assert!(residual <= 1e-6, "residual {residual}");
}

/// `C_t` carries `Ṽ_1^{χ/t}` onto `Ṽ_t^χ` with the same density.
#[test]
fn zoom_moves_between_carrier_spaces() {
    let chi = 5.0;
    for t in [0.5, 0.25] {
        let one = poisson_closed(&even_f(), &Covector::sl2(chi / t), 1.0, 256).unwrap();
        let zoomed = zoom_field(&one, t).unwrap();
        let direct = poisson_closed(&even_f(), &Covector::sl2(chi), t, 256).unwrap();
        for x in square(1.5, 7) {
            let (p, q) = (zoomed.eval(&x).unwrap(), direct.eval(&x).unwrap());
            assert!((p - q).norm() <= 1e-12 * p.norm().max(1.0), "t = {t}");
        }
    }
}

/// `π_t(k, v)f_t → π_0(k, v)f_0` uniformly on a compact set.
#[test]
fn dooley_rice_in_the_wave_picture() {
    let chi = Covector::sl2(4.0);
    let (k, v) = (rotation(0.5), p_from_coords(2, &[0.6, 0.4]));
    let points = square(1.0, 9);
    let flat = DeformedElement::new(k.clone(), v.clone(), 0.0).unwrap();
    let limit = quasi_regular(&flat, &poisson_closed(&even_f(), &chi, 0.0, 256).unwrap()).unwrap();
    let gaps: Vec<f64> = dyadic_ladder(1, 6)
        .into_iter()
        .map(|t| {
            let a = DeformedElement::new(k.clone(), v.clone(), t).unwrap();
            let ft = quasi_regular(&a, &poisson_closed(&even_f(), &chi, t, 256).unwrap()).unwrap();
            points
                .iter()
                .map(|x| (ft.eval(x).unwrap() - limit.eval(x).unwrap()).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(strictly_decreasing(&gaps), "{gaps:?}");
    assert!(gaps.last().unwrap() < &(0.1 * gaps[0]), "{gaps:?}");
}
