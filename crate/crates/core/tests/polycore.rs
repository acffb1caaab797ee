mod common;

use amoebalab::poly::{Field, MultiPoly, ThetaPoint};
use amoebalab::rng::{standard_normal, SeedContext};
use common::{c, complex_poly};
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;

proptest! {
    #[test]
    fn inverse_rotation_restores_coefficients(
        f in complex_poly(3),
        angles in prop::collection::vec(0.0..PI, 3),
    ) {
        let theta = ThetaPoint::new(angles.clone()).unwrap();
        let back: Vec<f64> = angles.iter().map(|a| -a).collect();
        let g = f.rotate_arguments(&theta).unwrap().rotate_by_angles(&back).unwrap();
        for (e, v) in f.terms() {
            let w = g.coeff(e.entries());
            prop_assert!((w - v).norm() <= 1e-12 * v.norm());
        }
        prop_assert_eq!(g.num_terms(), f.num_terms());
    }

    #[test]
    fn split_reassembles_exactly(f in complex_poly(2)) {
        let (re, im) = f.re_im_split();
        prop_assert_eq!(re.field(), Field::Real);
        prop_assert_eq!(im.field(), Field::Real);
        for (e, v) in f.terms() {
            let back = c(re.coeff(e.entries()).re, im.coeff(e.entries()).re);
            prop_assert_eq!(back, *v);
        }
        prop_assert!(re.degree() <= f.degree() && im.degree() <= f.degree());
    }

    #[test]
    fn dehomogenize_inverts_homogenize(f in complex_poly(3), extra in 0u32..3) {
        let d = f.degree().unwrap() + extra;
        for chart in 0..=3 {
            let h = f.homogenize(chart, d).unwrap();
            prop_assert!(h.is_homogeneous());
            prop_assert_eq!(&h.dehomogenize(chart).unwrap(), &f);
        }
    }

    #[test]
    fn derivative_of_sum_is_sum_of_derivatives(f in complex_poly(2), g in complex_poly(2)) {
        let s = f.add(&g).unwrap();
        let x = [c(0.3, -0.8), c(1.1, 0.4)];
        for var in 0..2 {
            let lhs = s.partial_derivative(var).unwrap().evaluate(&x).unwrap();
            let rhs = f.partial_derivative(var).unwrap().evaluate(&x).unwrap()
                + g.partial_derivative(var).unwrap().evaluate(&x).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn text_format_round_trips(f in complex_poly(3)) {
        prop_assert_eq!(MultiPoly::from_text(&f.to_text()).unwrap(), f);
    }
}

/// Evaluating at `r e^{i theta}` equals evaluating the rotated polynomial at `r`.
#[test]
fn rotation_realizes_polar_substitution() {
    let mut rng = SeedContext::new(1, 0, "rotation-eval").rng();
    for _ in 0..1000 {
        let nvars = rng.random_range(1..=4);
        let nterms = rng.random_range(1..=8);
        let terms: Vec<(Vec<u32>, _)> = (0..nterms)
            .map(|_| {
                let e = (0..nvars).map(|_| rng.random_range(0..4)).collect();
                (e, c(standard_normal(&mut rng), standard_normal(&mut rng)))
            })
            .collect();
        let f = MultiPoly::from_terms(nvars, Field::Complex, terms).unwrap();
        if f.is_zero() {
            continue;
        }
        let angles: Vec<f64> = (0..nvars).map(|_| rng.random_range(0.0..PI)).collect();
        let r: Vec<f64> = (0..nvars).map(|_| rng.random_range(-2.0..2.0)).collect();
        let z: Vec<_> = r
            .iter()
            .zip(&angles)
            .map(|(x, t)| amoebalab::Complex64::from_polar(*x, *t))
            .collect();
        let rr: Vec<_> = r.iter().map(|x| c(*x, 0.0)).collect();
        let direct = f.evaluate(&z).unwrap();
        let rotated = f
            .rotate_arguments(&ThetaPoint::new(angles).unwrap())
            .unwrap()
            .evaluate(&rr)
            .unwrap();
        let scale = f.evaluate_abs(&z).unwrap().max(1e-300);
        assert!((direct - rotated).norm() <= 1e-10 * scale.max(direct.norm()));
    }
}
