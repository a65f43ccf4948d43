//! Seeded random matrices for tests and the CLI self-test.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::cmat::{re, CMat};
use crate::matfun::{self, hermitian_eigen, op_norm_hermitian, ScalarFn};

/// Deterministic generator from a seed.
pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Matrix with i.i.d. entries uniform in the complex unit square around 0.
pub fn complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Random Hermitian matrix with norm O(1).
pub fn hermitian<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let a = complex_matrix(rng, n, n);
    (&a + a.adjoint()) * re(0.5)
}

/// Random Hermitian matrix rescaled to the given operator norm.
pub fn hermitian_with_norm<R: Rng>(rng: &mut R, n: usize, norm: f64) -> CMat {
    let h = hermitian(rng, n);
    let current = op_norm_hermitian(&h).max(f64::MIN_POSITIVE);
    h * re(norm / current)
}

/// Haar-ish random unitary: the eigenvector basis of a random Hermitian
/// matrix times random phases.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let (_, q) = hermitian_eigen(&hermitian(rng, n));
    let mut phases = CMat::zeros(n, n);
    for i in 0..n {
        let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        phases[(i, i)] = Complex64::new(t.cos(), t.sin());
    }
    q * phases
}

/// Random anti-Hermitian matrix.
pub fn anti_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMat {
    hermitian(rng, n) * Complex64::new(0.0, 1.0)
}

/// Random unitary of the block form `diag(u, v)`, which fixes the base
/// projector `diag(I, 0)`.
pub fn base_fixing_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let u = unitary(rng, n);
    let v = unitary(rng, n);
    let mut m = CMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&u);
    m.view_mut((n, n), (n, n)).copy_from(&v);
    m
}

/// Random point of the projection sphere at a prescribed maximal principal
/// angle: conjugate `diag(I, 0)` by `e^{X~}` with `||X|| = angle`, then by a
/// random block-diagonal unitary.
pub fn projection_at_angle<R: Rng>(rng: &mut R, n: usize, angle: f64) -> CMat {
    let a = {
        let g = complex_matrix(rng, n, n);
        let scale = angle / matfun::op_norm(&g).max(f64::MIN_POSITIVE);
        g * re(scale)
    };
    let xt = crate::cmat::block2(
        &CMat::zeros(n, n),
        &(-a.adjoint()),
        &a,
        &CMat::zeros(n, n),
    );
    let e = matfun::unitary_exp(&xt).expect("exp of anti-Hermitian");
    let w = base_fixing_unitary(rng, n);
    let frame = e * w;
    &frame * crate::cmat::base_projector(n) * frame.adjoint()
}

/// Random isometric column (point of the unitary sphere), as raw blocks.
pub fn sphere_vector<R: Rng>(rng: &mut R, n: usize) -> (CMat, CMat) {
    let a = complex_matrix(rng, n, n);
    let u = unitary(rng, n);
    let c = matfun::inv_sqrt_one_plus_gram(&a);
    ((&c * &u), (&a * c * u))
}

/// Random point of the unitary sphere.
pub fn sphere_point<R: Rng>(rng: &mut R, n: usize) -> crate::hopf::SphereVector {
    let (x1, x2) = sphere_vector(rng, n);
    crate::hopf::SphereVector::from_trusted(x1, x2)
}

/// Random Hermitian with spectrum in `[lo, hi]`.
pub fn hermitian_in_band<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> CMat {
    let h = hermitian(rng, n);
    let (vals, vecs) = hermitian_eigen(&h);
    let (vmin, vmax) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
        (a.min(x), b.max(x))
    });
    let span = (vmax - vmin).max(f64::MIN_POSITIVE);
    let mut d = CMat::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = re(lo + (vals[i] - vmin) / span * (hi - lo));
    }
    &vecs * d * vecs.adjoint()
}

/// Unitary `e^{iH}` with `||H|| <= max_angle`, keeping the spectrum away
/// from -1 when `max_angle < pi`.
pub fn unitary_with_angle_bound<R: Rng>(rng: &mut R, n: usize, max_angle: f64) -> CMat {
    let h = hermitian_in_band(rng, n, -max_angle, max_angle);
    matfun::herm_fun(&h, ScalarFn::ExpI).expect("exp_i of Hermitian")
}

/// Projection sampled "mixed": either strictly inside the principal chart or
/// with at least one exact right-angle direction (outside it).
pub fn projection_mixed<R: Rng>(rng: &mut R, n: usize, inside: bool) -> CMat {
    if inside {
        let angle = rng.random_range(0.1..1.4);
        projection_at_angle(rng, n, angle)
    } else {
        // Force one principal angle to exactly pi/2: one column of the range
        // basis lives entirely in the lower copy.
        let angles: Vec<f64> =
            (0..n).map(|i| if i == 0 { std::f64::consts::FRAC_PI_2 } else { rng.random_range(0.0..1.4) }).collect();
        let mut a = CMat::zeros(n, n);
        for (i, &t) in angles.iter().enumerate() {
            a[(i, i)] = re(t);
        }
        let xt = crate::cmat::block2(&CMat::zeros(n, n), &(-a.adjoint()), &a, &CMat::zeros(n, n));
        let e = matfun::unitary_exp(&xt).expect("exp");
        let w = base_fixing_unitary(rng, n);
        let frame = e * w;
        let p = &frame * crate::cmat::base_projector(n) * frame.adjoint();
        (&p + p.adjoint()) * re(0.5)
    }
}

/// Random k-dimensional orthonormal column set in dimension n.
pub fn isometry_cols<R: Rng>(rng: &mut R, n: usize, k: usize) -> CMat {
    let u = unitary(rng, n);
    u.view((0, 0), (n, k)).into()
}
