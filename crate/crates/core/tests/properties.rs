//! Property tests for the algebraic invariants of the duality and the
//! polynomial layer.

use angular_billiard::geometry::{dual_of_line, dual_of_point, normalize_angle};
use angular_billiard::poly::homogenize;
use angular_billiard::{BivariatePoly, OrientedLine, PlanePoint};
use proptest::prelude::*;

proptest! {
    #[test]
    fn duality_is_an_involution(phi in 0.0..std::f64::consts::TAU, p in 0.01f64..100.0) {
        let line = OrientedLine::new(phi, p);
        let q = dual_of_line(&line).unwrap();
        let back = dual_of_point(q).unwrap();
        prop_assert!((back.p() - line.p()).abs() < 1e-12 * (1.0 + p));
        prop_assert!(back.foot().dist(line.foot()) < 1e-12 * (1.0 + line.foot().norm()));
    }

    #[test]
    fn point_duality_round_trips(x in -50.0f64..50.0, y in -50.0f64..50.0) {
        let q = PlanePoint::new(x, y);
        prop_assume!(q.norm() > 1e-3);
        let line = dual_of_point(q).unwrap();
        let back = dual_of_line(&line).unwrap();
        prop_assert!(back.dist(q) < 1e-10 * (1.0 + q.norm()));
    }

    #[test]
    fn normalized_angles_stay_in_range(phi in -1e3f64..1e3) {
        let n = normalize_angle(phi);
        prop_assert!((0.0..std::f64::consts::TAU).contains(&n));
        prop_assert!(((n - phi) / std::f64::consts::TAU).rem_euclid(1.0) < 1e-9
            || ((n - phi) / std::f64::consts::TAU).rem_euclid(1.0) > 1.0 - 1e-9);
    }

    #[test]
    fn homogenization_round_trips(
        coeffs in proptest::collection::vec((0usize..5, 0usize..5, -10.0f64..10.0), 1..8)
    ) {
        let f = BivariatePoly::from_triples(&coeffs);
        prop_assume!(!f.is_zero());
        let back = homogenize(&f).dehomogenize();
        for (i, j, _) in f.to_triples() {
            prop_assert!((back.coeff(i, j) - f.coeff(i, j)).abs() < 1e-12);
        }
    }
}
