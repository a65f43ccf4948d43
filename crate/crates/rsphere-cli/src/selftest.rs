//! Seeded randomized invariant checks, one line per check.

use rsphere::cmat::{identity, re};
use rsphere::hopf;
use rsphere::manifold::{
    exp_p0, geodesic_eval, log_p0, norm_distance, parallel_transport, SphereProjection,
    TangentVector,
};
use rsphere::matfun::{self, herm_fun, op_norm, polar, ScalarFn};
use rsphere::opgraph;
use rsphere::sample;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, err: f64, bound: f64) {
        if err.is_finite() && err <= bound {
            println!("selftest {name}: ok (err {err:.2e} <= {bound:.0e})");
        } else {
            println!("selftest {name}: FAILED (err {err:.2e} > {bound:.0e})");
            self.failures += 1;
        }
    }
}

pub fn run(seed: u64, steps: usize) -> bool {
    let mut rng = sample::rng(seed);
    let mut report = Report { failures: 0 };
    let n = 4;

    // sin^2 + cos^2 = 1 under the functional calculus
    {
        let h = sample::hermitian(&mut rng, n);
        let s = herm_fun(&h, ScalarFn::Sin).unwrap();
        let c = herm_fun(&h, ScalarFn::Cos).unwrap();
        let err = op_norm(&(&s * &s + &c * &c - identity(n)));
        report.check("pythagorean-identity", err, 1e-10);
    }

    // polar round trip
    {
        let a = sample::complex_matrix(&mut rng, n, n);
        let p = polar(&a);
        let err = op_norm(&(&p.isometry * &p.modulus - &a)) / (1.0 + op_norm(&a));
        report.check("polar-round-trip", err, 1e-10);
    }

    // exp of principal log recovers the unitary
    {
        let u = sample::unitary_with_angle_bound(&mut rng, n, std::f64::consts::PI - 0.2);
        let l = matfun::principal_log_unitary(&u, 0.05).unwrap();
        let err = op_norm(&(matfun::unitary_exp(&l).unwrap() - u));
        report.check("unitary-log-round-trip", err, 1e-9);
    }

    // chart inverse lands on the sphere
    {
        let a = sample::complex_matrix(&mut rng, n, n);
        let x = hopf::Psi0(&a, &identity(n)).unwrap();
        let g = x.x1().adjoint() * x.x1() + x.x2().adjoint() * x.x2();
        report.check("chart-inverse-membership", op_norm(&(g - identity(n))), 1e-10);
    }

    // gauge invariance of the fibration
    {
        let (x1, x2) = sample::sphere_vector(&mut rng, n);
        let x = hopf::SphereVector::try_new(x1, x2, &rsphere::Tolerances::default()).unwrap();
        let u = sample::unitary(&mut rng, n);
        let err = norm_distance(&hopf::hopf(&x.gauge(&u)), &hopf::hopf(&x));
        report.check("fibration-gauge-invariance", err, 1e-10);
    }

    // log(exp(X)) = X within the closed-form domain
    {
        let a = {
            let g = sample::complex_matrix(&mut rng, n, n);
            g.clone() * re(0.7 / op_norm(&g))
        };
        let x = TangentVector::new(a);
        let back = log_p0(&exp_p0(&x)).unwrap();
        report.check("exp-log-round-trip", op_norm(&(back.block() - x.block())), 1e-8);
    }

    // distance law along a geodesic
    {
        let a = {
            let g = sample::complex_matrix(&mut rng, n, n);
            g.clone() * re(1.0 / op_norm(&g))
        };
        let x = TangentVector::new(a);
        let (t, s) = (0.2, 1.1);
        let lhs = norm_distance(&geodesic_eval(&x, t), &geodesic_eval(&x, s));
        let err = (lhs - ((s - t) * x.norm()).sin()).abs();
        report.check("geodesic-distance-law", err, 1e-9);
    }

    // minimal geodesic reaches the graph projection
    {
        let t_op = sample::complex_matrix(&mut rng, n, n) * re(3.0);
        let geo = opgraph::minimal_geodesic_to_graph(&t_op);
        let err = norm_distance(&geo.evaluate(1.0), &opgraph::proj_graph(&t_op));
        report.check("graph-geodesic-endpoint", err, 1e-9);
    }

    // parallel transport along a geodesic matches the exponential
    {
        let steps = steps.max(4);
        let a = {
            let g = sample::complex_matrix(&mut rng, 2, 2);
            g.clone() * re(1.2 / op_norm(&g))
        };
        let x = TangentVector::new(a);
        let times: Vec<f64> = (0..=2 * steps).map(|k| k as f64 / (2 * steps) as f64).collect();
        let samples: Vec<SphereProjection> =
            times.iter().map(|&t| geodesic_eval(&x, t)).collect();
        let r = parallel_transport(&times, &samples, steps).unwrap();
        let oracle = matfun::unitary_exp(&x.tilde()).unwrap();
        report.check("parallel-transport", op_norm(&(&r.unitary - oracle)), 1e-6);
    }

    // Finsler identity: the tangent norm equals the module norm of X x
    {
        let (x1, x2) = sample::sphere_vector(&mut rng, n);
        let x = hopf::SphereVector::try_new(x1, x2, &rsphere::Tolerances::default()).unwrap();
        let p = hopf::hopf(&x);
        let s = sample::complex_matrix(&mut rng, 2 * n, 2 * n);
        let q = identity(2 * n) - p.matrix();
        let y0 = p.matrix() * &s * &q;
        let tangent = &y0 + y0.adjoint();
        let xi = hopf::kappa(&x, &tangent).unwrap();
        report.check("finsler-identity", (op_norm(&tangent) - xi.norm()).abs(), 1e-10);
    }

    if report.failures == 0 {
        println!("selftest: all checks passed (seed {seed})");
        true
    } else {
        println!("selftest: {} check(s) FAILED (seed {seed})", report.failures);
        false
    }
}
