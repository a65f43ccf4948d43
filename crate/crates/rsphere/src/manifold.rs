//! The projection sphere itself: chart predicates, the exponential and
//! logarithm of the reductive connection, closed-form geodesics, the Finsler
//! distance, angle operators, parallel transport, tangent charts, and the
//! block-algebra decomposition induced by a projector conjugate to its
//! complement.
//!
//! Conventions. The base point is `p0 = diag(I, 0)`. A tangent vector at
//! `p0` is Hermitian and codiagonal, `X = [[0, a*], [a, 0]]`; only the
//! lower-left block `a` is stored. Its anti-Hermitian companion
//! `X~ = [X, p0] = [[0, -a*], [a, 0]]` generates the geodesic
//! `t -> e^{tX~} p0 e^{-tX~}`, and is materialized on demand.

use num_complex::Complex64;

use crate::cmat::{
    self, base_projector, base_symmetry, block2, block_of, identity, re, CMat,
};
use crate::error::{Error, Result};
use crate::hopf::section_sigma;
use crate::matfun::{
    self, hermitian_eigen, herm_fun, min_eig_hermitian, op_norm, op_norm_hermitian, polar,
    principal_log_unitary, ScalarFn,
};
use crate::tol::Tolerances;

/// Hermitian idempotent of trace `n` in `M_{2n}(C)`: a point of the
/// projection sphere.
#[derive(Debug, Clone)]
pub struct SphereProjection {
    m: CMat,
    n: usize,
}

impl SphereProjection {
    /// Validates shape, Hermiticity, idempotency and trace. Inputs failing
    /// by more than `tol.projection_accept` are rejected, not re-projected.
    pub fn try_new(m: CMat, tol: &Tolerances) -> Result<Self> {
        let rows = m.nrows();
        if rows == 0 || !rows.is_multiple_of(2) || m.ncols() != rows {
            return Err(Error::DimensionMismatch {
                expected: "even-dimensional square matrix".into(),
                got: format!("{}x{}", rows, m.ncols()),
            });
        }
        let n = rows / 2;
        let herm = (&m - m.adjoint()).norm();
        let idem = (&m * &m - &m).norm();
        let trace = (m.trace() - re(n as f64)).norm();
        let defect = herm.max(idem).max(trace);
        if defect > tol.projection_accept * (rows as f64).sqrt() {
            return Err(Error::NotProjection { defect });
        }
        Ok(SphereProjection { m, n })
    }

    pub(crate) fn from_trusted(m: CMat) -> Self {
        let n = m.nrows() / 2;
        debug_assert_eq!(m.nrows(), 2 * n);
        SphereProjection { m, n }
    }

    /// The base point `diag(I_n, 0)`.
    pub fn base_point(n: usize) -> Self {
        SphereProjection { m: base_projector(n), n }
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    /// Block size of the coefficient algebra.
    pub fn algebra_dim(&self) -> usize {
        self.n
    }

    /// Block `p_{ij}` for `i, j` in `{0, 1}`.
    pub fn block(&self, i: usize, j: usize) -> CMat {
        block_of(&self.m, i, j)
    }
}

/// Operator-norm distance between two projections.
pub fn norm_distance(p: &SphereProjection, q: &SphereProjection) -> f64 {
    op_norm_hermitian(&(p.matrix() - q.matrix()))
}

/// Tangent vector at the base point, stored by its lower-left block.
#[derive(Debug, Clone)]
pub struct TangentVector {
    a: CMat,
}

impl TangentVector {
    pub fn new(a: CMat) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "tangent block must be square");
        TangentVector { a }
    }

    pub fn zero(n: usize) -> Self {
        TangentVector { a: CMat::zeros(n, n) }
    }

    /// Extracts the lower-left block of an anti-Hermitian codiagonal
    /// generator `X~ = [[0, -a*], [a, 0]]`.
    pub fn try_from_tilde(xt: &CMat, tol: &Tolerances) -> Result<Self> {
        let n = xt.nrows() / 2;
        if xt.nrows() != 2 * n || xt.ncols() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: "even-dimensional square matrix".into(),
                got: format!("{}x{}", xt.nrows(), xt.ncols()),
            });
        }
        let scale = xt.norm().max(1.0);
        let anti = (xt + xt.adjoint()).norm();
        let diag = block_of(xt, 0, 0).norm() + block_of(xt, 1, 1).norm();
        if anti.max(diag) > tol.membership * scale * 100.0 {
            return Err(Error::NotCodiagonal { defect: anti.max(diag) / scale });
        }
        Ok(TangentVector { a: block_of(xt, 1, 0) })
    }

    /// Extracts the lower-left block of a full codiagonal Hermitian matrix.
    pub fn try_from_full(x: &CMat, tol: &Tolerances) -> Result<Self> {
        let n = x.nrows() / 2;
        if x.nrows() != 2 * n || x.ncols() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: "even-dimensional square matrix".into(),
                got: format!("{}x{}", x.nrows(), x.ncols()),
            });
        }
        let scale = x.norm().max(1.0);
        let herm = (x - x.adjoint()).norm();
        let diag = block_of(x, 0, 0).norm() + block_of(x, 1, 1).norm();
        if herm.max(diag) > tol.membership * scale * 100.0 {
            return Err(Error::NotCodiagonal { defect: herm.max(diag) / scale });
        }
        Ok(TangentVector { a: block_of(x, 1, 0) })
    }

    pub fn block(&self) -> &CMat {
        &self.a
    }

    pub fn algebra_dim(&self) -> usize {
        self.a.nrows()
    }

    /// The full Hermitian form `X = [[0, a*], [a, 0]]`.
    pub fn full(&self) -> CMat {
        let n = self.a.nrows();
        block2(&CMat::zeros(n, n), &self.a.adjoint(), &self.a, &CMat::zeros(n, n))
    }

    /// The anti-Hermitian companion `X~ = [X, p0] = [[0, -a*], [a, 0]]`.
    pub fn tilde(&self) -> CMat {
        let n = self.a.nrows();
        block2(&CMat::zeros(n, n), &(-self.a.adjoint()), &self.a, &CMat::zeros(n, n))
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.a)
    }
}

/// Geodesic through `base` with initial velocity `generator`, expressed in a
/// unitary frame that carries the base point `p0` to `base`.
#[derive(Debug, Clone)]
pub struct Geodesic {
    base: SphereProjection,
    generator: TangentVector,
    frame: CMat,
}

impl Geodesic {
    /// Geodesic through the base point `p0`.
    pub fn from_base_point(generator: TangentVector) -> Self {
        let n = generator.algebra_dim();
        Geodesic { base: SphereProjection::base_point(n), generator, frame: identity(2 * n) }
    }

    /// Geodesic through an arbitrary base, from a full tangent matrix at
    /// that base. The frame is built from an eigendecomposition of the base
    /// with deterministic phase fixing; all evaluation happens in the `p0`
    /// frame.
    pub fn at(base: &SphereProjection, tangent_at_base: &CMat) -> Result<Self> {
        let frame = frame_unitary(base);
        let pulled = frame.adjoint() * tangent_at_base * &frame;
        let generator = TangentVector::try_from_full(&pulled, &Tolerances::default())?;
        Ok(Geodesic { base: base.clone(), generator, frame })
    }

    pub fn base(&self) -> &SphereProjection {
        &self.base
    }

    /// Initial velocity, in the frame of the base.
    pub fn generator(&self) -> &TangentVector {
        &self.generator
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    /// Constant speed `||generator||`.
    pub fn speed(&self) -> f64 {
        self.generator.norm()
    }

    /// Closed-form evaluation at parameter `t`.
    pub fn evaluate(&self, t: f64) -> SphereProjection {
        let g = geodesic_eval(&self.generator, t);
        if self.frame == identity(self.frame.nrows()) {
            return g;
        }
        let m = &self.frame * g.matrix() * self.frame.adjoint();
        SphereProjection::from_trusted((&m + m.adjoint()) * re(0.5))
    }
}

/// Unitary mapping `p0` to `base`: eigenvectors of the base sorted by
/// descending eigenvalue, each column's largest-magnitude entry made real
/// positive.
pub fn frame_unitary(base: &SphereProjection) -> CMat {
    let (vals, vecs) = hermitian_eigen(base.matrix());
    let dim = base.matrix().nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    let mut frame = CMat::zeros(dim, dim);
    for (col, &idx) in order.iter().enumerate() {
        let mut v = cmat::column_of(&vecs, idx);
        let mut best = 0usize;
        let mut best_mag = 0.0f64;
        for r in 0..dim {
            let m = v[(r, 0)].norm();
            if m > best_mag {
                best_mag = m;
                best = r;
            }
        }
        if best_mag > 0.0 {
            let phase = v[(best, 0)] / best_mag;
            v *= phase.conj();
        }
        frame.view_mut((0, col), (dim, 1)).copy_from(&v);
    }
    frame
}

/// The four equivalent chart-membership statements, evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChartStatus {
    /// The range admits a generator with invertible top block.
    pub regular_element: bool,
    /// The projection reconstructs from its affine coordinate as a graph
    /// projection.
    pub graph_reconstruction: bool,
    /// `||p - p0|| < 1`.
    pub open_ball: bool,
    /// The `p_{11}` block is invertible.
    pub corner_invertible: bool,
}

impl ChartStatus {
    pub fn all_agree(&self) -> bool {
        let r = self.regular_element;
        r == self.graph_reconstruction && r == self.open_ball && r == self.corner_invertible
    }

    pub fn in_chart(&self) -> bool {
        self.regular_element
    }
}

/// Evaluates the four chart conditions by four different computations.
pub fn chart_status(p: &SphereProjection, tol: f64) -> ChartStatus {
    let n = p.algebra_dim();

    // (1) regular element: an orthonormal basis of the range has invertible
    // top block.
    let (vals, vecs) = hermitian_eigen(p.matrix());
    let mut cols: Vec<usize> = (0..2 * n).filter(|&i| vals[i] > 0.5).collect();
    cols.truncate(n);
    let regular_element = if cols.len() == n {
        let mut top = CMat::zeros(n, n);
        for (j, &c) in cols.iter().enumerate() {
            for i in 0..n {
                top[(i, j)] = vecs[(i, c)];
            }
        }
        let svd = top.svd(false, false);
        svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min) > tol
    } else {
        false
    };

    // (2) reconstruction through the affine coordinate, with a rank-cut
    // pseudo-inverse of p11.
    let p11 = p.block(0, 0);
    let p12 = p.block(0, 1);
    let (pv, pw) = hermitian_eigen(&p11);
    let mut pinv = CMat::zeros(n, n);
    for i in 0..n {
        if pv[i] > tol {
            pinv[(i, i)] = re(1.0 / pv[i]);
        }
    }
    let a_star = &pw * pinv * pw.adjoint() * p12;
    let reconstructed = phi0_inv(&a_star.adjoint());
    let graph_reconstruction =
        norm_distance(p, &reconstructed) <= tol.sqrt();

    // (3) the open norm ball around the base point.
    let open_ball =
        norm_distance(p, &SphereProjection::base_point(n)) < 1.0 - tol;

    // (4) p11 invertible, through its spectrum.
    let corner_invertible = min_eig_hermitian(&p11) > tol;

    ChartStatus { regular_element, graph_reconstruction, open_ball, corner_invertible }
}

/// Affine coordinate of the principal chart: `a = x2 x1^{-1}` for the
/// section representative; equals `p21 p11^{-1}`.
pub fn phi0(p: &SphereProjection) -> Result<CMat> {
    let p11 = p.block(0, 0);
    if min_eig_hermitian(&p11) <= Tolerances::default().rank_rel {
        return Err(Error::NotInChart);
    }
    let p12 = p.block(0, 1);
    let a_star = matfun::hpd_solve(&p11, &p12).ok_or(Error::NotInChart)?;
    Ok(a_star.adjoint())
}

/// Inverse chart: the graph projection of `a`,
/// `[[c2, c2 a*], [a c2, a c2 a*]]` with `c2 = (1 + a* a)^{-1}`.
///
/// Evaluated through the SVD of `a`, so the entries are scalar functions of
/// singular values and stay accurate for large-norm (truncated unbounded)
/// operators where forming `1 + a* a` would square the condition number.
pub fn phi0_inv(a: &CMat) -> SphereProjection {
    let n = a.nrows();
    let triples = matfun::singular_triples_full(a);
    let b11 = identity(n) + triples.map_right(|s| -s * s / (1.0 + s * s));
    let b21 = triples.map_outer(|s| s / (1.0 + s * s));
    let b22 = triples.map_left(|s| s * s / (1.0 + s * s));
    let b11 = (&b11 + b11.adjoint()) * re(0.5);
    SphereProjection::from_trusted(block2(&b11, &b21.adjoint(), &b21, &b22))
}

/// Chart transition between the charts translated by two `2n x 2n`
/// unitaries: the Moebius map `a -> (e + f a)(c + d a)^{-1}` with
/// `[[c, d], [e, f]] = u* v`.
pub fn chart_transition(u: &CMat, v: &CMat, a: &CMat) -> Result<CMat> {
    let w = u.adjoint() * v;
    let c = block_of(&w, 0, 0);
    let d = block_of(&w, 0, 1);
    let e = block_of(&w, 1, 0);
    let f = block_of(&w, 1, 1);
    let den = &c + &d * a;
    let num = &e + &f * a;
    let svd = den.clone().svd(false, false);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= Tolerances::default().rank_rel {
        return Err(Error::MobiusPole);
    }
    // num . den^{-1} through the adjoint system.
    let sol = den.adjoint().lu().solve(&num.adjoint()).ok_or(Error::MobiusPole)?;
    Ok(sol.adjoint())
}

/// Exponential map at the base point: the closed-form geodesic at `t = 1`.
pub fn exp_p0(x: &TangentVector) -> SphereProjection {
    geodesic_eval(x, 1.0)
}

/// Closed-form geodesic through the base point,
/// `gamma(t) = e^{tX~} p0 e^{-tX~}` evaluated via one SVD of the block:
/// with `a = W S V*`,
/// `gamma(t) = [[V cos^2(tS) V*, V sin(tS)cos(tS) W*],
///             [W sin(tS)cos(tS) V*, W sin^2(tS) W*]]`.
pub fn geodesic_eval(x: &TangentVector, t: f64) -> SphereProjection {
    let n = x.algebra_dim();
    let triples = matfun::singular_triples_full(x.block());
    // directions dropped as numerically zero sit where cos^2 = 1, sin = 0
    let b11 = identity(n)
        + triples.map_right(|s| {
            let c = (t * s).cos();
            c * c - 1.0
        });
    let b21 = triples.map_outer(|s| {
        let (sn, cs) = (t * s).sin_cos();
        sn * cs
    });
    let b22 = triples.map_left(|s| {
        let sn = (t * s).sin();
        sn * sn
    });
    let b11 = (&b11 + b11.adjoint()) * re(0.5);
    SphereProjection::from_trusted(block2(&b11, &b21.adjoint(), &b21, &b22))
}

/// Inverse of the exponential map on the closed-form domain:
/// `X = rho0 . Asinc(2 |[p0, p]|) . [p0, p]` with `rho0 = 2 p0 - 1`.
///
/// Guarded by `min eig(p11) > 1/2` (every principal angle below pi/4),
/// which is exactly where the arcsin branch in the formula returns the
/// angle itself rather than its complement. The weaker commutator condition
/// `||[p0, p]|| < 1/2` admits angles in `(pi/4, pi/2)` on which the formula
/// fails; see the 60-degree regression tests.
pub fn log_p0(p: &SphereProjection) -> Result<TangentVector> {
    let n = p.algebra_dim();
    let min_eig = min_eig_hermitian(&p.block(0, 0));
    if min_eig <= 0.5 {
        return Err(Error::OutsideLogDomain { min_eig });
    }
    let commutator = commutator_with_base(p);
    // i [p0, p] is Hermitian; Asinc acts on |[p0, p]| through its spectrum.
    let herm = &commutator * Complex64::new(0.0, 1.0);
    let (vals, vecs) = hermitian_eigen(&herm);
    let mut factor = CMat::zeros(2 * n, 2 * n);
    for i in 0..2 * n {
        factor[(i, i)] = re(matfun::asinc((2.0 * vals[i].abs()).min(1.0)));
    }
    let x = base_symmetry(n) * &vecs * factor * vecs.adjoint() * &commutator;
    TangentVector::try_from_full(&x, &Tolerances::default())
}

/// The commutator `[p0, p] = [[0, p12], [-p21, 0]]`.
pub fn commutator_with_base(p: &SphereProjection) -> CMat {
    let n = p.algebra_dim();
    let p12 = p.block(0, 1);
    let p21 = p.block(1, 0);
    block2(&CMat::zeros(n, n), &p12, &(-p21), &CMat::zeros(n, n))
}

/// General logarithm between any two projections at norm distance below 1:
/// `X~ = 1/2 log((2q - 1)(2p - 1))`, anti-Hermitian, with
/// `e^{X~} p e^{-X~} = q` and `||X~|| < pi/2`.
pub fn log_general(p: &SphereProjection, q: &SphereProjection) -> Result<CMat> {
    let d = norm_distance(p, q);
    let margin = 1.0 - d;
    if margin <= 1e-9 {
        return Err(Error::ProjectionsTooFar { margin });
    }
    let dim = p.matrix().nrows();
    let rho_p = p.matrix() * re(2.0) - identity(dim);
    let rho_q = q.matrix() * re(2.0) - identity(dim);
    let w = rho_q * rho_p;
    let l = principal_log_unitary(&w, 1e-12).map_err(|e| match e {
        Error::SpectrumTouchesMinusOne { .. } => Error::ProjectionsTooFar { margin },
        other => other,
    })?;
    Ok(l * re(0.5))
}

/// Finsler (geodesic) distance `||log_general(p, q)||`; satisfies
/// `||p - q|| = sin(dist)`.
pub fn finsler_dist(p: &SphereProjection, q: &SphereProjection) -> Result<f64> {
    let xt = log_general(p, q)?;
    Ok(op_norm_hermitian(&(xt * Complex64::new(0.0, 1.0))))
}

/// Angle operator of a projection in the log domain: `phi = arccos(x1)`
/// (values in `[0, pi/4)`) and the phase `w` from the polar decomposition
/// of `x2`, where `(x1, x2)` is the positive section representative.
/// `|log_p0(p)| = diag(phi, w phi w*)` and `||phi|| = dist(p0, p)`.
pub fn angle(p: &SphereProjection) -> Result<(CMat, CMat)> {
    let min_eig = min_eig_hermitian(&p.block(0, 0));
    if min_eig <= 0.5 {
        return Err(Error::OutsideLogDomain { min_eig });
    }
    let x = section_sigma(p)?;
    let phi = herm_fun(x.x1(), ScalarFn::Arccos)?;
    let w = polar(x.x2()).isometry;
    Ok((phi, w))
}

/// Polar parts of the commutator `[p0, p]` (the complementary cross ratio):
/// returns `(modulus, isometry)` with `[p0, p] = isometry . modulus`.
pub fn complementary_cross_ratio(p: &SphereProjection) -> (CMat, CMat) {
    let parts = polar(&commutator_with_base(p));
    (parts.modulus, parts.isometry)
}

/// Result of integrating the transport equation along a sampled path.
#[derive(Debug, Clone)]
pub struct TransportResult {
    /// The transporting unitary at the final time.
    pub unitary: CMat,
    /// Richardson step-halving estimate of the integration error (absent
    /// when the step count is odd).
    pub error_estimate: Option<f64>,
}

/// Parallel transport of the connection along a sampled path: integrates
/// `dg/dt = [dp/dt, p] g`, `g(0) = I`, with the classical 4th-order
/// one-step method. The path derivative is taken from 5-point central
/// differences of the samples (one-sided at the ends), so the samples must
/// line up with the integration grid: `2 * steps + 1` uniformly spaced
/// samples covering nodes and midpoints.
pub fn parallel_transport(
    times: &[f64],
    samples: &[SphereProjection],
    steps: usize,
) -> Result<TransportResult> {
    if samples.len() != times.len() {
        return Err(Error::PathTooCoarse {
            reason: format!("{} samples vs {} times", samples.len(), times.len()),
        });
    }
    if steps < 2 || samples.len() != 2 * steps + 1 {
        return Err(Error::PathTooCoarse {
            reason: format!(
                "need 2*steps+1 = {} uniformly spaced samples (nodes and midpoints), got {}",
                2 * steps + 1,
                samples.len()
            ),
        });
    }
    let m = samples.len();
    let h = (times[m - 1] - times[0]) / (m as f64 - 1.0);
    if h <= 0.0 {
        return Err(Error::PathTooCoarse { reason: "times must increase".into() });
    }
    for k in 0..m - 1 {
        let dt = times[k + 1] - times[k];
        if (dt - h).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::PathTooCoarse { reason: "non-uniform sample times".into() });
        }
        if norm_distance(&samples[k], &samples[k + 1]) >= 0.5 {
            return Err(Error::PathTooCoarse {
                reason: format!("consecutive samples {} and {} are 0.5 apart or more", k, k + 1),
            });
        }
    }
    let full = integrate_transport(samples, h, 1);
    // the half-resolution pass needs an even step count and 5 strided
    // samples for its derivative stencils
    let error_estimate = if steps.is_multiple_of(2) && steps >= 4 {
        let coarse = integrate_transport(samples, h, 2);
        Some((&full - coarse).norm() / 15.0)
    } else {
        None
    };
    Ok(TransportResult { unitary: full, error_estimate })
}

/// One RK4 sweep using every `stride`-th sample; `stride = 2` gives the
/// half-resolution pass for the Richardson estimate.
fn integrate_transport(samples: &[SphereProjection], h: f64, stride: usize) -> CMat {
    let idx: Vec<usize> = (0..samples.len()).step_by(stride).collect();
    let mm = idx.len();
    let hh = h * stride as f64;
    let dim = samples[0].matrix().nrows();
    // 5-point derivative stencils on the strided grid.
    let coeffs_interior = [1.0, -8.0, 0.0, 8.0, -1.0];
    let coeffs_left0 = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let coeffs_left1 = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let deriv = |j: usize| -> CMat {
        let (offsets, coeffs): (Vec<isize>, [f64; 5]) = if j >= 2 && j + 2 < mm {
            (vec![-2, -1, 0, 1, 2], coeffs_interior)
        } else if j == 0 {
            (vec![0, 1, 2, 3, 4], coeffs_left0)
        } else if j == 1 {
            (vec![-1, 0, 1, 2, 3], coeffs_left1)
        } else if j == mm - 1 {
            (vec![0, -1, -2, -3, -4], {
                let mut c = coeffs_left0;
                c.iter_mut().for_each(|x| *x = -*x);
                c
            })
        } else {
            (vec![1, 0, -1, -2, -3], {
                let mut c = coeffs_left1;
                c.iter_mut().for_each(|x| *x = -*x);
                c
            })
        };
        let mut d = CMat::zeros(dim, dim);
        for (o, c) in offsets.iter().zip(coeffs.iter()) {
            let jj = (j as isize + o) as usize;
            d += samples[idx[jj]].matrix() * re(c / (12.0 * hh));
        }
        d
    };
    // generator field A_j = [p'_j, p_j]
    let gen: Vec<CMat> = (0..mm)
        .map(|j| {
            let dp = deriv(j);
            let pm = samples[idx[j]].matrix();
            &dp * pm - pm * dp
        })
        .collect();
    let mut g = identity(dim);
    let step = 2.0 * hh;
    let mut j = 0;
    while j + 2 < mm {
        let k1 = &gen[j] * &g;
        let k2 = &gen[j + 1] * (&g + &k1 * re(step / 2.0));
        let k3 = &gen[j + 1] * (&g + &k2 * re(step / 2.0));
        let k4 = &gen[j + 2] * (&g + &k3 * re(step));
        g += (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(step / 6.0);
        j += 2;
    }
    g
}

/// Tangent map of the principal chart:
/// `Y -> (Yx)_2 x1^{-1} - x2 x1^{-1} (Yx)_1 x1^{-1}` with `x` the section
/// representative of `p`. Independent of the fiber representative.
pub fn tangent_chart(p: &SphereProjection, y: &CMat) -> Result<CMat> {
    let n = p.algebra_dim();
    if y.nrows() != 2 * n || y.ncols() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", 2 * n),
            got: format!("{}x{}", y.nrows(), y.ncols()),
        });
    }
    let scale = y.norm().max(1.0);
    let herm = (y - y.adjoint()).norm();
    let pm = p.matrix();
    let diag_defect = (pm * y * pm).norm()
        + ((identity(2 * n) - pm) * y * (identity(2 * n) - pm)).norm();
    if herm.max(diag_defect) > 1e-6 * scale {
        return Err(Error::NotTangent { defect: herm.max(diag_defect) / scale });
    }
    let x = section_sigma(p).map_err(|_| Error::NotInChart)?;
    let yx = y * x.column();
    let yx1: CMat = yx.view((0, 0), (n, n)).into();
    let yx2: CMat = yx.view((n, 0), (n, n)).into();
    // x1 is Hermitian positive definite.
    let x1inv = matfun::hpd_solve(x.x1(), &identity(n)).ok_or(Error::NotInChart)?;
    let a = x.x2() * &x1inv;
    Ok(&yx2 * &x1inv - a * yx1 * x1inv)
}

/// Inverse tangent map: the tangent vector at `phi0_inv(a)` with chart
/// velocity `adot`,
/// `Y = adot_v c2 av* + av c2 adot_v* - av b av*` for `av = (1; a)`,
/// `adot_v = (0; adot)`, `c2 = (1 + a* a)^{-1}` and
/// `b = c2 (adot* a + a* adot) c2` (the derivative of `c2` along `adot`).
pub fn tangent_chart_inv(a: &CMat, adot: &CMat) -> CMat {
    let n = a.nrows();
    let g = identity(n) + a.adjoint() * a;
    let (vals, vecs) = hermitian_eigen(&g);
    let mut inv = CMat::zeros(n, n);
    for i in 0..n {
        inv[(i, i)] = re(1.0 / vals[i].max(1.0));
    }
    let c2 = &vecs * inv * vecs.adjoint();
    let c2 = (&c2 + c2.adjoint()) * re(0.5);
    let b = &c2 * (adot.adjoint() * a + a.adjoint() * adot) * &c2;
    let y11 = -&b;
    let y21 = adot * &c2 - a * &b;
    let y22 = adot * &c2 * a.adjoint() + a * &c2 * adot.adjoint() - a * &b * a.adjoint();
    let y22 = (&y22 + y22.adjoint()) * re(0.5);
    let y11 = (&y11 + y11.adjoint()) * re(0.5);
    block2(&y11, &y21.adjoint(), &y21, &y22)
}

/// Finsler norm pulled back to the chart: `||tangent_chart_inv(a, adot)||`.
pub fn finsler_pullback_norm(a: &CMat, adot: &CMat) -> f64 {
    op_norm_hermitian(&tangent_chart_inv(a, adot))
}

/// Block-matrix decomposition induced by a projector conjugate to its
/// complement.
///
/// Given `p` with `u p u* = 1 - p`, the compressed corner `A = p M p` turns
/// the ambient algebra into `2 x 2` matrices over `A`: the four blocks of an
/// element `m` are `p m p`, `p m u p`, `p u* m p`, `p u* m u p`. Blocks are
/// represented on an orthonormal basis of the range of `p`, so the image of
/// an `N x N` matrix is again `N x N` (with `N = 2 rank p`) and the map is a
/// unital *-isomorphism.
#[derive(Debug, Clone)]
pub struct RspDecomposition {
    basis: CMat,
    u: CMat,
    rank: usize,
}

impl RspDecomposition {
    pub fn try_new(p: &CMat, u: &CMat, tol: &Tolerances) -> Result<Self> {
        let dim = p.nrows();
        if p.ncols() != dim || u.nrows() != dim || u.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: "square p and u of equal size".into(),
                got: format!("{}x{} and {}x{}", p.nrows(), p.ncols(), u.nrows(), u.ncols()),
            });
        }
        let herm = (p - p.adjoint()).norm();
        let idem = (p * p - p).norm();
        if herm.max(idem) > tol.projection_accept * (dim as f64).sqrt() {
            return Err(Error::NotProjection { defect: herm.max(idem) });
        }
        let udef = cmat::unitary_defect(u);
        if udef > tol.membership * (dim as f64).sqrt() {
            return Err(Error::NotUnitary { defect: udef, tol: tol.membership });
        }
        let conj = u * p * u.adjoint() + p - identity(dim);
        let defect = conj.norm();
        if defect > tol.projection_accept * (dim as f64).sqrt() {
            return Err(Error::NotRsp { defect });
        }
        let (vals, vecs) = hermitian_eigen(p);
        let cols: Vec<usize> = (0..dim).filter(|&i| vals[i] > 0.5).collect();
        let rank = cols.len();
        if 2 * rank != dim {
            return Err(Error::NotRsp { defect: (dim as f64 - 2.0 * rank as f64).abs() });
        }
        let mut basis = CMat::zeros(dim, rank);
        for (j, &c) in cols.iter().enumerate() {
            basis.view_mut((0, j), (dim, 1)).copy_from(&vecs.column(c).into_owned());
        }
        Ok(RspDecomposition { basis, u: u.clone(), rank })
    }

    /// The isomorphism: `m` as a `2 x 2` block matrix over the corner
    /// algebra, on the chosen range basis (a `2r x 2r` matrix).
    pub fn apply(&self, m: &CMat) -> CMat {
        let v = &self.basis;
        let uv = &self.u * v;
        let x = v.adjoint() * m * v;
        let y = v.adjoint() * m * &uv;
        let z = uv.adjoint() * m * v;
        let t = uv.adjoint() * m * &uv;
        block2(&x, &y, &z, &t)
    }

    /// Inverse: reassemble `m = X + Y u* + u Z + u T u*` from expanded
    /// blocks.
    pub fn inverse(&self, j: &CMat) -> CMat {
        let r = self.rank;
        let v = &self.basis;
        let expand = |b: CMat| -> CMat { v * b * v.adjoint() };
        let x = expand(block_of(j, 0, 0));
        let y = expand(block_of(j, 0, 1));
        let z = expand(block_of(j, 1, 0));
        let t = expand(block_of(j, 1, 1));
        debug_assert_eq!(x.nrows(), 2 * r);
        &x + &y * self.u.adjoint() + &self.u * &z + &self.u * t * self.u.adjoint()
    }
}

/// One-shot form of the isomorphism for a single matrix.
pub fn rsp_isomorphism(m: &CMat, p: &CMat, u: &CMat) -> Result<CMat> {
    let d = RspDecomposition::try_new(p, u, &Tolerances::default())?;
    Ok(d.apply(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::{cplx, diag_re, from_rows, swap};
    use crate::sample;
    use rand::Rng;

    const PI: f64 = std::f64::consts::PI;
    const TOL: f64 = 1e-10;

    /// Scalar-angle projection [[cos^2, sc], [sc, sin^2]].
    fn planar(theta: f64) -> SphereProjection {
        let (s, c) = theta.sin_cos();
        SphereProjection::try_new(
            from_rows(2, 2, &[re2(c * c), re2(s * c), re2(s * c), re2(s * s)]),
            &Tolerances::default(),
        )
        .unwrap()
    }

    fn re2(x: f64) -> Complex64 {
        re(x)
    }

    /// Test-only matrix exponential by scaling and squaring of a Taylor sum;
    /// independent of the spectral route used by the library.
    fn expm_taylor(a: &CMat) -> CMat {
        let norm = a.norm();
        let s = norm.log2().ceil().max(0.0) as u32 + 4;
        let scaled = a * re(1.0 / 2f64.powi(s as i32));
        let dim = a.nrows();
        let mut term = identity(dim);
        let mut sum = identity(dim);
        for k in 1..24 {
            term = &term * &scaled * re(1.0 / k as f64);
            sum += &term;
        }
        let mut out = sum;
        for _ in 0..s {
            out = &out * &out;
        }
        out
    }

    #[test]
    fn chart_status_examples() {
        let p0 = SphereProjection::base_point(1);
        let st = chart_status(&p0, 1e-8);
        assert!(st.all_agree() && st.in_chart());

        let opposite = SphereProjection::try_new(diag_re(&[0.0, 1.0]), &Tolerances::default())
            .unwrap();
        let st = chart_status(&opposite, 1e-8);
        assert!(st.all_agree() && !st.in_chart());

        // theta = pi/3: inside the chart even though the commutator norm
        // exceeds 1/2.
        let p = planar(PI / 3.0);
        let st = chart_status(&p, 1e-8);
        assert!(st.all_agree() && st.in_chart());
    }

    #[test]
    fn phi0_examples() {
        let p0 = SphereProjection::base_point(2);
        assert!(phi0(&p0).unwrap().norm() < TOL);

        let half = SphereProjection::try_new(
            CMat::from_fn(2, 2, |_, _| re(0.5)),
            &Tolerances::default(),
        )
        .unwrap();
        let a = phi0(&half).unwrap();
        assert!((a - identity(1)).norm() < TOL);

        let mut rng = sample::rng(40);
        for _ in 0..8 {
            let a = sample::complex_matrix(&mut rng, 3, 3);
            let round = phi0(&phi0_inv(&a)).unwrap();
            assert!((round - &a).norm() < 1e-9);
        }
    }

    #[test]
    fn phi0_inv_examples() {
        let p = phi0_inv(&CMat::zeros(2, 2));
        assert!((p.matrix() - base_projector(2)).norm() < TOL);

        let p = phi0_inv(&identity(1));
        assert!((p.matrix() - CMat::from_fn(2, 2, |_, _| re(0.5))).norm() < TOL);

        // graph invariance: p (xi, a xi) = (xi, a xi)
        let mut rng = sample::rng(41);
        let a = sample::complex_matrix(&mut rng, 3, 3);
        let p = phi0_inv(&a);
        let xi = sample::complex_matrix(&mut rng, 3, 1);
        let v = cmat::stack2(&xi.clone(), &(&a * &xi));
        assert!((p.matrix() * &v - &v).norm() < 1e-10);
    }

    #[test]
    fn chart_transition_examples() {
        let mut rng = sample::rng(42);
        let a = sample::complex_matrix(&mut rng, 2, 2);
        let id = identity(4);
        let t = chart_transition(&id, &id, &a).unwrap();
        assert!((t - &a).norm() < TOL);

        // the swap chart sends a to a^{-1}
        let sw = swap(1);
        let a = from_rows(1, 1, &[cplx(0.3, 0.7)]);
        let t = chart_transition(&sw, &identity(2), &a).unwrap();
        assert!((t[(0, 0)] - a[(0, 0)].inv()).norm() < TOL);

        // the transition is what the charts themselves compute: the chart
        // translated by w reads p through phi0(w* p w)
        for _ in 0..6 {
            let u = sample::unitary(&mut rng, 4);
            let v = sample::unitary(&mut rng, 4);
            let a = sample::complex_matrix(&mut rng, 2, 2);
            let p = phi0_inv(&a);
            let moved = &v * p.matrix() * v.adjoint();
            let read_back = phi0(&SphereProjection::from_trusted(
                u.adjoint() * &moved * &u,
            ));
            match (chart_transition(&u, &v, &a), read_back) {
                (Ok(t), Ok(direct)) => assert!((t - direct).norm() < 1e-8),
                // both must agree that the point left the chart
                (Err(_), Err(_)) => {}
                (t, d) => panic!("transition and chart disagree: {t:?} vs {d:?}"),
            }
        }

        // group action: transition(u1, u2) then transition(u2, u3) equals
        // transition(u1, u3)
        for _ in 0..6 {
            let u1 = sample::unitary(&mut rng, 4);
            let u2 = sample::unitary(&mut rng, 4);
            let u3 = sample::unitary(&mut rng, 4);
            let a = sample::complex_matrix(&mut rng, 2, 2);
            let step = chart_transition(&u2, &u3, &a).and_then(|b| chart_transition(&u1, &u2, &b));
            let direct = chart_transition(&u1, &u3, &a);
            if let (Ok(s), Ok(d)) = (step, direct) {
                assert!((s - d).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn exp_p0_scalar_examples() {
        let x = TangentVector::zero(2);
        assert!((exp_p0(&x).matrix() - base_projector(2)).norm() < TOL);

        let x = TangentVector::new(diag_re(&[PI / 2.0]));
        let p = exp_p0(&x);
        assert!((p.matrix() - diag_re(&[0.0, 1.0])).norm() < TOL);

        let x = TangentVector::new(diag_re(&[PI / 4.0]));
        let p = exp_p0(&x);
        assert!((p.matrix() - CMat::from_fn(2, 2, |_, _| re(0.5))).norm() < TOL);
    }

    #[test]
    fn geodesic_matches_exponential_oracle() {
        let mut rng = sample::rng(43);
        for _ in 0..20 {
            let n = 3;
            let a = {
                let g = sample::complex_matrix(&mut rng, n, n);
                let target: f64 = rng.random_range(0.1..PI);
                g.clone() * re(target / op_norm(&g))
            };
            let x = TangentVector::new(a);
            let t: f64 = rng.random_range(-2.0..2.0);
            let closed = geodesic_eval(&x, t);
            let e = expm_taylor(&(x.tilde() * re(t)));
            let oracle = &e * base_projector(n) * e.adjoint();
            assert!((closed.matrix() - oracle).norm() < 1e-10);
        }
    }

    #[test]
    fn geodesic_at_zero_and_one() {
        let mut rng = sample::rng(44);
        let a = sample::complex_matrix(&mut rng, 2, 2);
        let x = TangentVector::new(a);
        assert!((geodesic_eval(&x, 0.0).matrix() - base_projector(2)).norm() < TOL);
        assert!((geodesic_eval(&x, 1.0).matrix() - exp_p0(&x).matrix()).norm() < TOL);
    }

    #[test]
    fn log_p0_examples() {
        let p0 = SphereProjection::base_point(2);
        assert!(log_p0(&p0).unwrap().norm() < TOL);

        // theta = pi/6: |a| = pi/6
        let p = planar(PI / 6.0);
        let x = log_p0(&p).unwrap();
        assert!((x.block()[(0, 0)] - re(PI / 6.0)).norm() < TOL);
        assert!((exp_p0(&x).matrix() - p.matrix()).norm() < TOL);

        // theta = pi/3 must be rejected: the closed form would return the
        // complementary angle pi/6 and miss p.
        let p = planar(PI / 3.0);
        match log_p0(&p) {
            Err(Error::OutsideLogDomain { min_eig }) => assert!((min_eig - 0.25).abs() < 1e-9),
            other => panic!("expected OutsideLogDomain, got {other:?}"),
        }
    }

    #[test]
    fn exp_log_round_trips() {
        let mut rng = sample::rng(45);
        for n in [1usize, 2, 4, 8] {
            // log(exp(X)) = X for ||X|| <= pi/4 - margin
            let a = {
                let g = sample::complex_matrix(&mut rng, n, n);
                let target: f64 = rng.random_range(0.05..(PI / 4.0 - 1e-3));
                g.clone() * re(target / op_norm(&g))
            };
            let x = TangentVector::new(a);
            let back = log_p0(&exp_p0(&x)).unwrap();
            assert!((back.block() - x.block()).norm() < 1e-8);

            // exp(log(p)) = p on the guarded domain
            let ang = rng.random_range(0.05..(PI / 4.0 - 1e-3));
            let p = SphereProjection::from_trusted(sample::projection_at_angle(&mut rng, n, ang));
            if min_eig_hermitian(&p.block(0, 0)) > 0.5 + 1e-3 {
                let x = log_p0(&p).unwrap();
                assert!((exp_p0(&x).matrix() - p.matrix()).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn log_general_examples() {
        let mut rng = sample::rng(46);
        let p = SphereProjection::from_trusted(sample::projection_at_angle(&mut rng, 2, 0.8));
        assert!(log_general(&p, &p).unwrap().norm() < 1e-9);

        // scalar pi/3 rotation angle
        let p0 = SphereProjection::base_point(1);
        let q = planar(PI / 3.0);
        let xt = log_general(&p0, &q).unwrap();
        assert!((op_norm(&xt) - PI / 3.0).abs() < 1e-12);
        let e = matfun::unitary_exp(&xt).unwrap();
        assert!((&e * p0.matrix() * e.adjoint() - q.matrix()).norm() < 1e-10);

        // consistency with the closed form: log_general(p0, q) = [X, p0]
        for _ in 0..20 {
            let n = 3;
            let ang = rng.random_range(0.05..(PI / 4.0 - 1e-3));
            let q = SphereProjection::from_trusted(sample::projection_at_angle(&mut rng, n, ang));
            if min_eig_hermitian(&q.block(0, 0)) <= 0.5 {
                continue;
            }
            let p0 = SphereProjection::base_point(n);
            let general = log_general(&p0, &q).unwrap();
            let closed = log_p0(&q).unwrap().tilde();
            assert!((general - closed).norm() < 1e-9);
        }
    }

    #[test]
    fn finsler_dist_examples() {
        let mut rng = sample::rng(47);
        let p = SphereProjection::from_trusted(sample::projection_at_angle(&mut rng, 2, 0.4));
        assert!(finsler_dist(&p, &p).unwrap() < 1e-9);

        let p0 = SphereProjection::base_point(1);
        assert!((finsler_dist(&p0, &planar(PI / 6.0)).unwrap() - PI / 6.0).abs() < 1e-12);

        // sin law along a geodesic
        for _ in 0..10 {
            let n = 2;
            let a = {
                let g = sample::complex_matrix(&mut rng, n, n);
                g.clone() * re(1.0 / op_norm(&g))
            };
            let x = TangentVector::new(a);
            let t: f64 = rng.random_range(0.0..0.7);
            let s: f64 = rng.random_range(0.8..1.5);
            let gt = geodesic_eval(&x, t);
            let gs = geodesic_eval(&x, s);
            let lhs = norm_distance(&gt, &gs);
            let rhs = ((s - t) * x.norm()).sin();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn distance_law_and_commutator_norm_identities() {
        let mut rng = sample::rng(48);
        for _ in 0..10 {
            let n = 3;
            let a = {
                let g = sample::complex_matrix(&mut rng, n, n);
                let target: f64 = rng.random_range(0.1..(PI / 2.0));
                g.clone() * re(target / op_norm(&g))
            };
            let x = TangentVector::new(a);
            let p = exp_p0(&x);
            // || [p0, p] || = 1/4 || 1 - e^{4 X~} ||
            let lhs = op_norm(&commutator_with_base(&p));
            let e4 = matfun::unitary_exp(&(x.tilde() * re(4.0))).unwrap();
            let rhs = 0.25 * op_norm(&(identity(2 * n) - e4));
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn chart_geodesic_relation() {
        // phi0(Exp(X)) = v tan|a| with a = v|a|
        let mut rng = sample::rng(49);
        for _ in 0..10 {
            let n = 3;
            let a = {
                let g = sample::complex_matrix(&mut rng, n, n);
                let target: f64 = rng.random_range(0.05..(PI / 4.0 - 1e-3));
                g.clone() * re(target / op_norm(&g))
            };
            let x = TangentVector::new(a.clone());
            let lhs = phi0(&exp_p0(&x)).unwrap();
            let parts = polar(&a);
            let tan_abs = herm_fun(&parts.modulus, ScalarFn::Tan).unwrap();
            let rhs = &parts.isometry * tan_abs;
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn angle_examples() {
        let p0 = SphereProjection::base_point(2);
        let (phi, w) = angle(&p0).unwrap();
        assert!(phi.norm() < TOL && w.norm() < TOL);

        let (phi, w) = angle(&planar(PI / 6.0)).unwrap();
        assert!((phi[(0, 0)] - re(PI / 6.0)).norm() < TOL);
        assert!((w[(0, 0)] - re(1.0)).norm() < TOL);

        // block-diagonal angles pi/8 and pi/6 via a diagonal generator
        let x = TangentVector::new(diag_re(&[PI / 8.0, PI / 6.0]));
        let p = exp_p0(&x);
        let (phi, _) = angle(&p).unwrap();
        assert!((phi - diag_re(&[PI / 8.0, PI / 6.0])).norm() < 1e-10);

        // |log(p)| = diag(phi, w phi w*) and ||phi|| = dist
        let mut rng = sample::rng(50);
        for _ in 0..8 {
            let n = 2;
            let ang = rng.random_range(0.1..(PI / 4.0 - 1e-2));
            let p = SphereProjection::from_trusted(sample::projection_at_angle(&mut rng, n, ang));
            if min_eig_hermitian(&p.block(0, 0)) <= 0.5 + 1e-6 {
                continue;
            }
            let (phi, w) = angle(&p).unwrap();
            let x = log_p0(&p).unwrap();
            let abs_x = polar(&x.full()).modulus;
            let expected = block2(
                &phi,
                &CMat::zeros(n, n),
                &CMat::zeros(n, n),
                &(&w * &phi * w.adjoint()),
            );
            assert!((abs_x - expected).norm() < 1e-9);
            let p0 = SphereProjection::base_point(n);
            assert!((op_norm_hermitian(&phi) - finsler_dist(&p0, &p).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn cross_ratio_examples() {
        let p0 = SphereProjection::base_point(2);
        let (m, v) = complementary_cross_ratio(&p0);
        assert!(m.norm() < TOL && v.norm() < TOL);

        let (m, _) = complementary_cross_ratio(&planar(PI / 6.0));
        let expected = 3.0f64.sqrt() / 4.0;
        assert!((m - identity(2) * re(expected)).norm() < 1e-12);

        // the commutator is anti-Hermitian with codiagonal blocks p12, -p21
        let mut rng = sample::rng(51);
        let p = SphereProjection::from_trusted(sample::projection_at_angle(&mut rng, 3, 1.1));
        let k = commutator_with_base(&p);
        assert!((&k + k.adjoint()).norm() < 1e-12);
        assert!((block_of(&k, 0, 1) - p.block(0, 1)).norm() < 1e-12);
        assert!((block_of(&k, 1, 0) + p.block(1, 0)).norm() < 1e-12);
        // modulus = diag(x1 |x2|, w x1 |x2| w*)
        let q = SphereProjection::from_trusted(sample::projection_at_angle(&mut rng, 2, 0.6));
        let (modulus, _) = complementary_cross_ratio(&q);
        let x = section_sigma(&q).unwrap();
        let abs_x2 = polar(x.x2()).modulus;
        let w = polar(x.x2()).isometry;
        let top = x.x1() * &abs_x2;
        let bot = &w * &top * w.adjoint();
        let expected = block2(&top, &CMat::zeros(2, 2), &CMat::zeros(2, 2), &bot);
        assert!((modulus - expected).norm() < 1e-9);
    }

    #[test]
    fn transport_constant_path_is_identity() {
        let p = SphereProjection::base_point(2);
        let steps = 4;
        let times: Vec<f64> = (0..=2 * steps).map(|k| k as f64 / (2 * steps) as f64).collect();
        let samples = vec![p; 2 * steps + 1];
        let r = parallel_transport(&times, &samples, steps).unwrap();
        assert!((r.unitary - identity(4)).norm() < 1e-14);
    }

    #[test]
    fn transport_along_geodesic_matches_exponential() {
        let mut rng = sample::rng(52);
        let n = 2;
        let a = {
            let g = sample::complex_matrix(&mut rng, n, n);
            g.clone() * re((PI / 2.0) / op_norm(&g))
        };
        let x = TangentVector::new(a);
        let steps = 200;
        let times: Vec<f64> = (0..=2 * steps).map(|k| k as f64 / (2 * steps) as f64).collect();
        let samples: Vec<SphereProjection> =
            times.iter().map(|&t| geodesic_eval(&x, t)).collect();
        let r = parallel_transport(&times, &samples, steps).unwrap();
        let oracle = expm_taylor(&x.tilde());
        assert!((&r.unitary - oracle).norm() < 1e-6);
        assert!(cmat::unitary_defect(&r.unitary) < 1e-6);
        // g p(0) g* = p(1)
        let end = &r.unitary * base_projector(n) * r.unitary.adjoint();
        assert!((end - samples.last().unwrap().matrix()).norm() < 1e-6);
        assert!(r.error_estimate.unwrap() < 1e-6);
    }

    #[test]
    fn transport_preserves_codiagonality() {
        let mut rng = sample::rng(53);
        let n = 2;
        let a = sample::complex_matrix(&mut rng, n, n);
        let x = TangentVector::new(a.clone() * re(1.0 / op_norm(&a)));
        let steps = 50;
        let times: Vec<f64> = (0..=2 * steps).map(|k| k as f64 / (2 * steps) as f64).collect();
        let samples: Vec<SphereProjection> =
            times.iter().map(|&t| geodesic_eval(&x, t)).collect();
        let g = parallel_transport(&times, &samples, steps).unwrap().unitary;
        let y = sample::hermitian(&mut rng, n);
        let tangent = block2(&CMat::zeros(n, n), &y.adjoint(), &y, &CMat::zeros(n, n));
        let moved = &g * tangent * g.adjoint();
        let p_end = samples.last().unwrap().matrix();
        let defect =
            (&moved * p_end - (identity(2 * n) - p_end) * &moved).norm() / moved.norm();
        assert!(defect < 1e-6);
    }

    #[test]
    fn transport_smallest_step_counts() {
        // steps = 2 has too few samples for the half-resolution pass; it
        // must integrate fine and simply skip the estimate
        let mut rng = sample::rng(59);
        let a = sample::complex_matrix(&mut rng, 2, 2);
        let x = TangentVector::new(a.clone() * re(0.3 / op_norm(&a)));
        for steps in [2usize, 3, 4] {
            let times: Vec<f64> =
                (0..=2 * steps).map(|k| k as f64 / (2 * steps) as f64).collect();
            let samples: Vec<SphereProjection> =
                times.iter().map(|&t| geodesic_eval(&x, t)).collect();
            let r = parallel_transport(&times, &samples, steps).unwrap();
            assert_eq!(r.error_estimate.is_some(), steps == 4);
            assert!(cmat::unitary_defect(&r.unitary) < 1e-4);
        }
    }

    #[test]
    fn transport_rejects_coarse_paths() {
        let p = SphereProjection::base_point(1);
        let times = vec![0.0, 0.5, 1.0];
        let samples = vec![p.clone(), p.clone(), p];
        assert!(matches!(
            parallel_transport(&times, &samples, 5),
            Err(Error::PathTooCoarse { .. })
        ));
    }

    #[test]
    fn tangent_chart_examples() {
        let mut rng = sample::rng(54);
        let n = 2;
        // at p0, the codiagonal [[0, adot*], [adot, 0]] maps to adot
        let p0 = SphereProjection::base_point(n);
        let adot = sample::complex_matrix(&mut rng, n, n);
        let y = block2(&CMat::zeros(n, n), &adot.adjoint(), &adot, &CMat::zeros(n, n));
        let out = tangent_chart(&p0, &y).unwrap();
        assert!((out - &adot).norm() < TOL);

        // zero tangent maps to zero
        let p = SphereProjection::from_trusted(sample::projection_at_angle(&mut rng, n, 0.8));
        let out = tangent_chart(&p, &CMat::zeros(2 * n, 2 * n)).unwrap();
        assert!(out.norm() < TOL);

        // finite-difference oracle along a geodesic: d/dt phi0(gamma(t))
        let a = sample::complex_matrix(&mut rng, n, n);
        let x = TangentVector::new(a * re(0.4));
        let t0 = 0.3;
        let p = geodesic_eval(&x, t0);
        let h = 1e-5;
        let fd = (phi0(&geodesic_eval(&x, t0 + h)).unwrap()
            - phi0(&geodesic_eval(&x, t0 - h)).unwrap())
            * re(1.0 / (2.0 * h));
        // gamma'(t0) in the ambient algebra
        let dp = (geodesic_eval(&x, t0 + h).matrix() - geodesic_eval(&x, t0 - h).matrix())
            * re(1.0 / (2.0 * h));
        let chart_dot = tangent_chart(&p, &dp).unwrap();
        assert!((fd - chart_dot).norm() < 1e-6);
    }

    #[test]
    fn tangent_chart_inverse_pair() {
        let mut rng = sample::rng(55);
        let n = 2;
        // a = 0 collapses to the plain codiagonal embedding
        let adot = sample::complex_matrix(&mut rng, n, n);
        let y = tangent_chart_inv(&CMat::zeros(n, n), &adot);
        let expected = block2(&CMat::zeros(n, n), &adot.adjoint(), &adot, &CMat::zeros(n, n));
        assert!((&y - expected).norm() < TOL);

        // adot = 0 gives 0
        let a = sample::complex_matrix(&mut rng, n, n);
        assert!(tangent_chart_inv(&a, &CMat::zeros(n, n)).norm() < TOL);

        for _ in 0..8 {
            let a = sample::complex_matrix(&mut rng, n, n);
            let adot = sample::complex_matrix(&mut rng, n, n);
            let y = tangent_chart_inv(&a, &adot);
            let p = phi0_inv(&a);
            // Y is Hermitian, codiagonal w.r.t. p
            assert!((&y - y.adjoint()).norm() < 1e-12);
            let pm = p.matrix();
            assert!((pm * &y * pm).norm() < 1e-9);
            let round = tangent_chart(&p, &y).unwrap();
            assert!((round - &adot).norm() < 1e-9);
        }
    }

    #[test]
    fn finsler_pullback_examples() {
        let mut rng = sample::rng(56);
        let n = 3;
        let adot = sample::complex_matrix(&mut rng, n, n);
        assert!((finsler_pullback_norm(&CMat::zeros(n, n), &adot) - op_norm(&adot)).abs() < TOL);
        let a = sample::complex_matrix(&mut rng, n, n);
        assert!(finsler_pullback_norm(&a, &CMat::zeros(n, n)) < TOL);
        // unitary invariance of the underlying norm
        let y = tangent_chart_inv(&a, &adot);
        let w = sample::unitary(&mut rng, 2 * n);
        assert!((op_norm(&(&w * &y * w.adjoint())) - op_norm(&y)).abs() < 1e-9);
    }

    #[test]
    fn rsp_classical_example() {
        // M = M_2(C), p = diag(1, 0), u = swap
        let p = diag_re(&[1.0, 0.0]);
        let u = swap(1);
        let d = RspDecomposition::try_new(&p, &u, &Tolerances::default()).unwrap();
        let jp = d.apply(&p);
        assert!((jp - diag_re(&[1.0, 0.0])).norm() < TOL);
        let j1 = d.apply(&identity(2));
        assert!((j1 - identity(2)).norm() < TOL);
    }

    #[test]
    fn rsp_is_star_isomorphism() {
        let mut rng = sample::rng(57);
        let n = 3;
        // build an rsp: p = frame diag(I,0) frame*, u = frame swap frame*
        let frame = sample::unitary(&mut rng, 2 * n);
        let p = &frame * base_projector(n) * frame.adjoint();
        let u = &frame * swap(n) * frame.adjoint();
        let d = RspDecomposition::try_new(&p, &u, &Tolerances::default()).unwrap();

        let jp = d.apply(&p);
        assert!((block_of(&jp, 0, 0) - identity(n)).norm() < 1e-10);
        assert!(block_of(&jp, 0, 1).norm() < 1e-10);
        assert!(block_of(&jp, 1, 0).norm() < 1e-10);
        assert!(block_of(&jp, 1, 1).norm() < 1e-10);

        for _ in 0..6 {
            let m1 = sample::complex_matrix(&mut rng, 2 * n, 2 * n);
            let m2 = sample::complex_matrix(&mut rng, 2 * n, 2 * n);
            let lhs = d.apply(&(&m1 * &m2));
            let rhs = d.apply(&m1) * d.apply(&m2);
            assert!((lhs - rhs).norm() < 1e-9);
            // *-preservation
            assert!((d.apply(&m1.adjoint()) - d.apply(&m1).adjoint()).norm() < 1e-10);
            // norm preservation
            assert!((op_norm(&d.apply(&m1)) - op_norm(&m1)).abs() < 1e-10);
            // stated inverse recovers the element
            assert!((d.inverse(&d.apply(&m1)) - &m1).norm() < 1e-9);
        }
    }

    #[test]
    fn rsp_rejects_bad_conjugation() {
        let p = diag_re(&[1.0, 0.0]);
        let u = identity(2);
        assert!(matches!(
            RspDecomposition::try_new(&p, &u, &Tolerances::default()),
            Err(Error::NotRsp { .. })
        ));
    }

    #[test]
    fn geodesic_at_general_base() {
        let mut rng = sample::rng(58);
        let n = 2;
        let base = SphereProjection::from_trusted(sample::projection_at_angle(&mut rng, n, 0.9));
        // tangent at base: Y = p s (1-p) + h.c.
        let s = sample::complex_matrix(&mut rng, 2 * n, 2 * n);
        let pm = base.matrix();
        let q = identity(2 * n) - pm;
        let y0 = pm * &s * &q;
        let y = &y0 + y0.adjoint();
        let geo = Geodesic::at(&base, &y).unwrap();
        assert!((geo.evaluate(0.0).matrix() - base.matrix()).norm() < 1e-9);
        // initial velocity matches: finite differences
        let h = 1e-6;
        let fd = (geo.evaluate(h).matrix() - geo.evaluate(-h).matrix()) * re(1.0 / (2.0 * h));
        assert!((fd - &y).norm() < 1e-5);
        // speed is constant and equals ||Y||
        assert!((geo.speed() - op_norm(&y)).abs() < 1e-9);
    }

    #[test]
    fn chart_transition_pole() {
        // W = u* v = swap and a = 0 makes c + d a = 0
        let sw = swap(1);
        let a = CMat::zeros(1, 1);
        assert!(matches!(
            chart_transition(&sw, &identity(2), &a),
            Err(Error::MobiusPole)
        ));
    }

    #[test]
    fn log_general_rejects_opposite_corners() {
        let p0 = SphereProjection::base_point(1);
        let opp = SphereProjection::from_trusted(identity(2) - base_projector(1));
        assert!(matches!(
            log_general(&p0, &opp),
            Err(Error::ProjectionsTooFar { .. })
        ));
        assert!(matches!(
            finsler_dist(&p0, &opp),
            Err(Error::ProjectionsTooFar { .. })
        ));
    }

    #[test]
    fn projection_validation_rejects_dirt() {
        let mut m = base_projector(2);
        m[(0, 1)] = re(1e-3);
        assert!(matches!(
            SphereProjection::try_new(m, &Tolerances::default()),
            Err(Error::NotProjection { .. })
        ));
    }
}
