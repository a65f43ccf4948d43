//! Desk-scale spectral experiments: the differentiation operator compressed
//! to truncated Fourier bases, and multi-geodesic families with Jacobi
//! fields and conjugate-parameter indices for index-zero matrices.
//!
//! The differentiation operator `-i d/dx` with periodic boundary conditions
//! is diagonal on the Fourier basis `e^{i 2 pi n x}` with eigenvalues
//! `2 pi n`. Truncating at `|n| <= N` gives a large-norm diagonal matrix
//! whose graph projection, deformation schedule and norm growth reproduce
//! the unbounded picture in the limit of large `N`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cmat::{base_projector, re, CMat};
use crate::error::{Error, Result};
use crate::join::{complement_basis, conjugate_along, fix_phase, log_general_raw};
use crate::manifold::{Geodesic, SphereProjection, TangentVector};
use crate::opgraph::proj_inv_graph;
use crate::tol::Tolerances;

const TAU: f64 = 2.0 * std::f64::consts::PI;
const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// Truncated Fourier basis with frequencies `-N, ..., -1, 0, 1, ..., N`
/// (dimension `2N + 1`). Index 0 is the constant mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierTruncation {
    max_freq: usize,
}

impl FourierTruncation {
    pub fn new(max_freq: usize) -> Result<Self> {
        if max_freq == 0 {
            return Err(Error::ParameterOutOfRange { value: 0.0, range: "max_freq >= 1" });
        }
        Ok(FourierTruncation { max_freq })
    }

    pub fn max_freq(&self) -> usize {
        self.max_freq
    }

    pub fn dim(&self) -> usize {
        2 * self.max_freq + 1
    }

    /// Frequencies in storage order.
    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        let n = self.max_freq as i64;
        -n..=n
    }

    /// Storage position of frequency `n`.
    pub fn position(&self, n: i64) -> usize {
        (n + self.max_freq as i64) as usize
    }
}

/// The compression of `-i d/dx` to the truncated basis: `diag(2 pi n)`.
pub fn build_diff_op(trunc: &FourierTruncation) -> CMat {
    let mut m = CMat::zeros(trunc.dim(), trunc.dim());
    for n in trunc.indices() {
        m[(trunc.position(n), trunc.position(n))] = re(TAU * n as f64);
    }
    m
}

/// Diagonal blocks of the differentiation-graph projection over the
/// non-constant modes, in storage order with the constant mode removed.
#[derive(Debug, Clone)]
pub struct DiffGraphBlocks {
    /// `diag(1 / (1 + (2 pi n)^2))`
    pub d1: CMat,
    /// `diag(2 pi n / (1 + (2 pi n)^2))`
    pub d2: CMat,
    /// `diag((2 pi n)^2 / (1 + (2 pi n)^2))`
    pub d3: CMat,
}

pub fn diff_graph_blocks(trunc: &FourierTruncation) -> DiffGraphBlocks {
    let m = trunc.dim() - 1;
    let mut d1 = CMat::zeros(m, m);
    let mut d2 = CMat::zeros(m, m);
    let mut d3 = CMat::zeros(m, m);
    let mut j = 0usize;
    for n in trunc.indices() {
        if n == 0 {
            continue;
        }
        let w = TAU * n as f64;
        let den = 1.0 + w * w;
        d1[(j, j)] = re(1.0 / den);
        d2[(j, j)] = re(w / den);
        d3[(j, j)] = re(w * w / den);
        j += 1;
    }
    DiffGraphBlocks { d1, d2, d3 }
}

/// The full `2(2N+1)`-dimensional graph projection assembled from the
/// diagonal blocks, with the constant-mode block `diag(1, 0)`.
pub fn assembled_graph_projection(trunc: &FourierTruncation) -> SphereProjection {
    let dim = trunc.dim();
    let mut m = CMat::zeros(2 * dim, 2 * dim);
    for n in trunc.indices() {
        let i = trunc.position(n);
        let w = TAU * n as f64;
        let den = 1.0 + w * w;
        m[(i, i)] = re(1.0 / den);
        m[(i, dim + i)] = re(w / den);
        m[(dim + i, i)] = re(w / den);
        m[(dim + i, dim + i)] = re(w * w / den);
    }
    SphereProjection::from_trusted(m)
}

/// Hermitian generator `Z0` of the minimal geodesic from the base point to
/// the differentiation graph, on the non-constant modes: purely imaginary
/// couplings `+- i arctan(2 pi |n|)` between the two copies of mode `n`,
/// with the sign pattern split by the sign of the frequency; zero on the
/// constant mode. `e^{i Z0}` conjugates the base projector onto the
/// assembled graph projection.
pub fn z0_generator(trunc: &FourierTruncation) -> CMat {
    let dim = trunc.dim();
    let mut z = CMat::zeros(2 * dim, 2 * dim);
    for n in trunc.indices() {
        if n == 0 {
            continue;
        }
        let i = trunc.position(n);
        let a = (TAU * n.abs() as f64).atan();
        let s = if n > 0 { 1.0 } else { -1.0 };
        z[(i, dim + i)] = Complex64::new(0.0, s * a);
        z[(dim + i, i)] = Complex64::new(0.0, -s * a);
    }
    z
}

/// The deformation of the truncated differentiation operator at parameter
/// `t`: `diag(tan(t arctan(2 pi n)))`, zero on the constant mode.
pub fn deformation_t(trunc: &FourierTruncation, t: f64) -> Result<CMat> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange { value: t, range: "[0, 1)" });
    }
    let mut m = CMat::zeros(trunc.dim(), trunc.dim());
    for n in trunc.indices() {
        let i = trunc.position(n);
        m[(i, i)] = re((t * (TAU * n as f64).atan()).tan());
    }
    Ok(m)
}

/// Truncated vs analytic norm growth of the deformation.
#[derive(Debug, Clone, Copy)]
pub struct NormGrowth {
    /// `tan(t arctan(2 pi N))`, the exact norm at truncation `N`.
    pub truncated_norm: f64,
    /// `tan(t pi / 2)`, the norm of the untruncated deformation.
    pub analytic_limit: f64,
}

pub fn norm_growth(trunc: &FourierTruncation, t: f64) -> Result<NormGrowth> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange { value: t, range: "[0, 1)" });
    }
    Ok(NormGrowth {
        truncated_norm: (t * (TAU * trunc.max_freq as f64).atan()).tan(),
        analytic_limit: (t * HALF_PI).tan(),
    })
}

/// Kernel-side data of an index-zero matrix: orthonormal bases of
/// `ker(F)` and `ker(F*)` (phase-fixed columns of the SVD).
struct KernelBases {
    ker: CMat,
    coker: CMat,
}

fn kernel_bases(f: &CMat, rank_rel: f64) -> (usize, usize, KernelBases) {
    let svd = f.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cut = rank_rel * smax.max(1.0);
    let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
    let u = svd.u.as_ref().unwrap();
    let v = svd.v_t.as_ref().unwrap().adjoint();
    let (rows, cols) = (f.nrows(), f.ncols());
    let dim_ker = cols - rank;
    let dim_coker = rows - rank;
    // kernel basis: right singular vectors beyond the rank; for a wide SVD
    // nalgebra returns min(rows, cols) columns, so complete if needed.
    let mut ker = CMat::zeros(cols, dim_ker);
    let mut have = 0usize;
    for i in rank..v.ncols() {
        let mut col = crate::cmat::column_of(&v, i);
        fix_phase(&mut col);
        ker.view_mut((0, have), (cols, 1)).copy_from(&col);
        have += 1;
    }
    if have < dim_ker {
        let head: CMat = ker.view((0, 0), (cols, have)).into();
        let others = [&head, &v.columns(0, rank).into_owned()];
        let rest = complement_basis(&others, cols);
        ker.view_mut((0, have), (cols, dim_ker - have))
            .copy_from(&rest.view((0, 0), (cols, dim_ker - have)).into_owned());
    }
    let mut coker = CMat::zeros(rows, dim_coker);
    let mut have = 0usize;
    for i in rank..u.ncols() {
        let mut col = crate::cmat::column_of(u, i);
        fix_phase(&mut col);
        coker.view_mut((0, have), (rows, 1)).copy_from(&col);
        have += 1;
    }
    if have < dim_coker {
        let head: CMat = coker.view((0, 0), (rows, have)).into();
        let others = [&head, &u.columns(0, rank).into_owned()];
        let rest = complement_basis(&others, rows);
        coker.view_mut((0, have), (rows, dim_coker - have))
            .copy_from(&rest.view((0, 0), (rows, dim_coker - have)).into_owned());
    }
    (dim_ker, dim_coker, KernelBases { ker, coker })
}

/// Embedding bases of the rotating pair for the geodesics from the base
/// point to the inverse graph of `f`: the upper-copy coimage directions
/// `ker(F*) + {0}` and the lower-copy kernel directions `{0} + ker(F)`.
fn rotation_bases(f: &CMat, bases: &KernelBases) -> (CMat, CMat) {
    let m = f.nrows();
    let k = bases.coker.ncols();
    let mut b10 = CMat::zeros(2 * m, k);
    b10.view_mut((0, 0), (m, k)).copy_from(&bases.coker);
    let kk = bases.ker.ncols();
    let mut b01 = CMat::zeros(2 * m, kk);
    b01.view_mut((m, 0), (m, kk)).copy_from(&bases.ker);
    (b10, b01)
}

/// One geodesic of the family joining the base point to the inverse graph
/// of an index-zero matrix `f` with nontrivial kernel: a quarter-period
/// rotation with phase `u` between the coimage and kernel directions, and
/// the unique geodesic on the generic remainder. All members have length
/// pi/2 and share both endpoints.
pub fn multi_geodesics(f: &CMat, u: &CMat) -> Result<Geodesic> {
    if f.nrows() != f.ncols() {
        return Err(Error::KernelMismatch {
            reason: format!("matrix must be square, got {}x{}", f.nrows(), f.ncols()),
        });
    }
    let tol = Tolerances::default();
    let (dim_ker, dim_coker, bases) = kernel_bases(f, tol.rank_rel);
    if dim_ker != dim_coker {
        return Err(Error::IndexNonZero { dim_ker, dim_coker });
    }
    let k = dim_ker;
    if k == 0 {
        return Err(Error::KernelMismatch { reason: "kernel is trivial".into() });
    }
    if u.nrows() != k || u.ncols() != k {
        return Err(Error::KernelMismatch {
            reason: format!("phase must be {k}x{k}, got {}x{}", u.nrows(), u.ncols()),
        });
    }
    if crate::cmat::unitary_defect(u) > tol.membership * (k as f64).sqrt().max(1.0) {
        return Err(Error::KernelMismatch { reason: "phase is not unitary".into() });
    }
    let m = f.nrows();
    let (b10, b01) = rotation_bases(f, &bases);
    let mut gen = &b01 * (u.adjoint() * re(HALF_PI)) * b10.adjoint()
        - &b10 * (u * re(HALF_PI)) * b01.adjoint();
    let b0 = complement_basis(&[&b10, &b01], 2 * m);
    if b0.ncols() > 0 {
        let q = proj_inv_graph(f);
        let pc = b0.adjoint() * base_projector(m) * &b0;
        let qc = b0.adjoint() * q.matrix() * &b0;
        let x0 = log_general_raw(&pc, &qc)?;
        gen += &b0 * x0 * b0.adjoint();
    }
    let gen = (&gen - gen.adjoint()) * re(0.5);
    let x = TangentVector::try_from_tilde(&gen, &tol)?;
    Ok(Geodesic::from_base_point(x))
}

/// Jacobi field of the geodesic family at parameter `t`, for a direction
/// `udot` in the anti-Hermitian matrices: the derivative of the family at
/// the identity phase,
/// `cos(t pi/2) sin(t pi/2)` times `udot` on the rotating pair, embedded in
/// the full space. Vanishes at `t = 0` and `t = 1`.
pub fn jacobi_field(f: &CMat, udot: &CMat, t: f64) -> Result<CMat> {
    if f.nrows() != f.ncols() {
        return Err(Error::KernelMismatch {
            reason: format!("matrix must be square, got {}x{}", f.nrows(), f.ncols()),
        });
    }
    let tol = Tolerances::default();
    let (dim_ker, dim_coker, bases) = kernel_bases(f, tol.rank_rel);
    if dim_ker != dim_coker {
        return Err(Error::IndexNonZero { dim_ker, dim_coker });
    }
    let k = dim_ker;
    if udot.nrows() != k || udot.ncols() != k {
        return Err(Error::KernelMismatch {
            reason: format!("direction must be {k}x{k}, got {}x{}", udot.nrows(), udot.ncols()),
        });
    }
    if (udot + udot.adjoint()).norm() > 1e-8 * udot.norm().max(1.0) {
        return Err(Error::KernelMismatch { reason: "direction must be anti-Hermitian".into() });
    }
    let (b10, b01) = rotation_bases(f, &bases);
    let cs = (t * HALF_PI).cos() * (t * HALF_PI).sin();
    let block = &b10 * (udot * re(cs)) * b01.adjoint();
    Ok(&block + block.adjoint())
}

/// Kernel and cokernel dimensions of a (possibly rectangular) matrix, by
/// singular-value rank.
pub fn kernel_dims(f: &CMat) -> (usize, usize) {
    let (dim_ker, dim_coker, _) = kernel_bases(f, Tolerances::default().rank_rel);
    (dim_ker, dim_coker)
}

/// Conjugate-parameter index at the far end of the family: the real
/// dimension of the span of the Jacobi fields, verified constructively by a
/// Gram-matrix rank over the canonical anti-Hermitian directions. Equals
/// `k^2` for kernel dimension `k`, and 0 for invertible input.
pub fn conjugate_index(f: &CMat) -> Result<usize> {
    let tol = Tolerances::default();
    let (dim_ker, dim_coker, _) = kernel_bases(f, tol.rank_rel);
    if dim_ker != dim_coker {
        return Err(Error::IndexNonZero { dim_ker, dim_coker });
    }
    let k = dim_ker;
    if k == 0 {
        return Ok(0);
    }
    // canonical basis of the anti-Hermitian k x k matrices
    let mut dirs: Vec<CMat> = Vec::with_capacity(k * k);
    for j in 0..k {
        let mut m = CMat::zeros(k, k);
        m[(j, j)] = Complex64::new(0.0, 1.0);
        dirs.push(m);
    }
    for j in 0..k {
        for l in (j + 1)..k {
            let mut m = CMat::zeros(k, k);
            m[(j, l)] = re(1.0);
            m[(l, j)] = re(-1.0);
            dirs.push(m);
            let mut m = CMat::zeros(k, k);
            m[(j, l)] = Complex64::new(0.0, 1.0);
            m[(l, j)] = Complex64::new(0.0, 1.0);
            dirs.push(m);
        }
    }
    // fields at the midpoint, in the rotating-pair coordinates (the
    // embedding is isometric, so the Gram matrix is unchanged)
    let cs = 0.5; // cos(pi/4) sin(pi/4)
    let fields: Vec<CMat> = dirs
        .iter()
        .map(|d| {
            let scaled = d * re(cs);
            crate::cmat::block2(
                &CMat::zeros(k, k),
                &scaled,
                &scaled.adjoint(),
                &CMat::zeros(k, k),
            )
        })
        .collect();
    let dim = k * k;
    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            gram[(a, b)] = crate::cmat::frobenius_re(&fields[a], &fields[b]);
        }
    }
    let eig = gram.symmetric_eigen();
    let rank = eig.eigenvalues.iter().filter(|&&l| l > 1e-12).count();
    Ok(rank)
}

/// The geodesic curve of the differentiation model,
/// `t -> e^{i t Z0} P_Gr(0) e^{-i t Z0}`. Since `Z0` couples each frequency
/// only to its own partner in the second copy, the conjugation reduces to a
/// plane rotation per mode and is assembled in closed form; the unit tests
/// pin it against the dense exponential route.
pub fn diff_geodesic_at(trunc: &FourierTruncation, t: f64) -> SphereProjection {
    let dim = trunc.dim();
    let mut m = CMat::zeros(2 * dim, 2 * dim);
    for n in trunc.indices() {
        let i = trunc.position(n);
        if n == 0 {
            m[(i, i)] = re(1.0);
            continue;
        }
        let a = (TAU * n.abs() as f64).atan();
        let s = if n > 0 { 1.0 } else { -1.0 };
        let (sn, cs) = (t * a).sin_cos();
        m[(i, i)] = re(cs * cs);
        m[(i, dim + i)] = re(s * sn * cs);
        m[(dim + i, i)] = re(s * sn * cs);
        m[(dim + i, dim + i)] = re(sn * sn);
    }
    SphereProjection::from_trusted(m)
}

/// Dense-route evaluation of the same curve, for cross-checks.
pub fn diff_geodesic_dense(trunc: &FourierTruncation, t: f64) -> SphereProjection {
    let z = z0_generator(trunc);
    let gen = z * Complex64::new(0.0, 1.0);
    let p = base_projector(trunc.dim());
    SphereProjection::from_trusted(conjugate_along(&p, &gen, t))
}

/// Operator-norm gap between the geodesic at `t` and the graph of the
/// deformation at `t` — the subspace distance between their images.
pub fn diff_subspace_gap(trunc: &FourierTruncation, t: f64) -> Result<f64> {
    let gamma = diff_geodesic_at(trunc, t);
    let graph = crate::opgraph::proj_graph(&deformation_t(trunc, t)?);
    Ok(crate::manifold::norm_distance(&gamma, &graph))
}
