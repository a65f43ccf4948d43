//! Property-based invariants over randomly generated matrices.

use num_complex::Complex64;
use proptest::prelude::*;
use rsphere::cmat::{identity, re, CMat};
use rsphere::hopf;
use rsphere::manifold::{
    exp_p0, geodesic_eval, log_p0, norm_distance, phi0, phi0_inv, SphereProjection,
    TangentVector,
};
use rsphere::matfun::{herm_fun, op_norm, polar, ScalarFn};
use rsphere::Tolerances;

fn cmat_strategy(n: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        CMat::from_fn(n, n, |i, j| {
            let (re_part, im_part) = v[i * n + j];
            Complex64::new(re_part, im_part)
        })
    })
}

fn hermitian_strategy(n: usize) -> impl Strategy<Value = CMat> {
    cmat_strategy(n).prop_map(|a| (&a + a.adjoint()) * re(0.5))
}

/// Tangent block rescaled into the open log domain.
fn tangent_in_log_domain(n: usize) -> impl Strategy<Value = CMat> {
    (cmat_strategy(n), 0.05f64..(std::f64::consts::FRAC_PI_4 - 2e-3)).prop_filter_map(
        "nonzero block",
        |(a, target)| {
            let norm = op_norm(&a);
            (norm > 1e-6).then(|| a * re(target / norm))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pythagorean_identity(h in hermitian_strategy(4)) {
        let s = herm_fun(&h, ScalarFn::Sin).unwrap();
        let c = herm_fun(&h, ScalarFn::Cos).unwrap();
        prop_assert!(op_norm(&(&s * &s + &c * &c - identity(4))) < 1e-10);
    }

    #[test]
    fn polar_reconstructs(a in cmat_strategy(4)) {
        let p = polar(&a);
        let err = op_norm(&(&p.isometry * &p.modulus - &a));
        prop_assert!(err < 1e-10 * (1.0 + op_norm(&a)));
    }

    #[test]
    fn graph_projection_axioms(a in cmat_strategy(3)) {
        let p = phi0_inv(&a);
        let m = p.matrix();
        prop_assert!(op_norm(&(m * m - m)) < 1e-10);
        prop_assert!(op_norm(&(m - &m.adjoint())) < 1e-12);
        // affine coordinate round trip
        let round = phi0(&p).unwrap();
        prop_assert!(op_norm(&(round - &a)) < 1e-8 * (1.0 + op_norm(&a)).powi(3));
    }

    #[test]
    fn exp_log_round_trip(a in tangent_in_log_domain(3)) {
        let x = TangentVector::new(a);
        let p = exp_p0(&x);
        let back = log_p0(&p).unwrap();
        prop_assert!(op_norm(&(back.block() - x.block())) < 1e-8);
    }

    #[test]
    fn geodesic_distance_law(a in tangent_in_log_domain(3), t in -1.0f64..1.0, dt in 0.0f64..1.0) {
        let x = TangentVector::new(a);
        let s = t + dt * (std::f64::consts::FRAC_PI_2 / x.norm()).min(2.0);
        let lhs = norm_distance(&geodesic_eval(&x, t), &geodesic_eval(&x, s));
        let rhs = ((s - t) * x.norm()).sin();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn fibration_is_gauge_invariant(a in cmat_strategy(3), h in hermitian_strategy(3)) {
        let x = hopf::Psi0(&a, &identity(3)).unwrap();
        let u = herm_fun(&h, ScalarFn::ExpI).unwrap();
        let gauged = x.gauge(&u);
        prop_assert!(norm_distance(&hopf::hopf(&gauged), &hopf::hopf(&x)) < 1e-10);
        // and the section recovers the positive representative
        let p = hopf::hopf(&x);
        let back = hopf::section_sigma(&p).unwrap();
        prop_assert!(norm_distance(&hopf::hopf(&back), &p) < 1e-10);
    }

    #[test]
    fn projections_accept_their_own_constructions(a in cmat_strategy(3)) {
        let p = phi0_inv(&a);
        let again = SphereProjection::try_new(p.matrix().clone(), &Tolerances::default());
        prop_assert!(again.is_ok());
    }
}
