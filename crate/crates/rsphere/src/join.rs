//! Joining geodesics between arbitrary pairs of projections.
//!
//! Two projections split the ambient space into the four intersection
//! subspaces (range/range, kernel/kernel, range/kernel, kernel/range) plus a
//! generic-position remainder. On the remainder the two projections are at
//! norm distance below 1 and the principal logarithm of the product of
//! symmetries gives the unique geodesic; on the range/kernel pair every
//! unitary phase gives a distinct quarter-period rotation; the other two
//! blocks stay put. This module computes the split and assembles the
//! generator; the graph and spectral modules drive it.

use num_complex::Complex64;

use crate::cmat::{identity, re, CMat};
use crate::error::{Error, Result};
use crate::manifold::SphereProjection;
use crate::matfun::{hermitian_eigen, principal_log_unitary};

/// Orthonormal basis of the range of a Hermitian projection (eigenvectors
/// with eigenvalue above 1/2), columns phase-fixed for determinism.
pub fn range_basis(pm: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(pm);
    let dim = pm.nrows();
    let cols: Vec<usize> = (0..dim).filter(|&i| vals[i] > 0.5).collect();
    let mut b = CMat::zeros(dim, cols.len());
    for (j, &c) in cols.iter().enumerate() {
        let mut v = crate::cmat::column_of(&vecs, c);
        fix_phase(&mut v);
        b.view_mut((0, j), (dim, 1)).copy_from(&v);
    }
    b
}

pub(crate) fn fix_phase(v: &mut CMat) {
    let mut best = 0usize;
    let mut mag = 0.0f64;
    for r in 0..v.nrows() {
        let m = v[(r, 0)].norm();
        if m > mag {
            mag = m;
            best = r;
        }
    }
    if mag > 0.0 {
        let phase = v[(best, 0)] / mag;
        *v *= phase.conj();
    }
}

/// Orthonormal basis of the orthogonal complement of the given column
/// spans.
pub fn complement_basis(spans: &[&CMat], dim: usize) -> CMat {
    let mut rest = identity(dim);
    for b in spans {
        if b.ncols() > 0 {
            rest -= *b * b.adjoint();
        }
    }
    range_basis(&rest)
}

/// The five-fold decomposition induced by a pair of projections. Each field
/// is an orthonormal basis (possibly with zero columns).
#[derive(Debug, Clone)]
pub struct PairSplit {
    /// ran p and ran q.
    pub both_ranges: CMat,
    /// ker p and ker q.
    pub both_kernels: CMat,
    /// ran p and ker q: the block that rotates out.
    pub range_to_kernel: CMat,
    /// ker p and ran q: the block that rotates in.
    pub kernel_to_range: CMat,
    /// Generic-position remainder.
    pub generic: CMat,
}

impl PairSplit {
    /// Dimension of the phase freedom; geodesics exist iff the two rotating
    /// blocks match.
    pub fn rotation_dims(&self) -> (usize, usize) {
        (self.range_to_kernel.ncols(), self.kernel_to_range.ncols())
    }
}

/// Computes the split. A principal angle counts as 0 when its cosine is
/// at least `1 - angle_tol` and as a right angle when the cosine is at most
/// `angle_tol`.
pub fn pair_split(p: &CMat, q: &CMat, angle_tol: f64) -> PairSplit {
    let dim = p.nrows();
    let bp = range_basis(p);
    let bq = range_basis(q);
    let bp_perp = complement_basis(&[&bp], dim);

    let select = |left: &CMat, right: &CMat, near_one: bool| -> CMat {
        if left.ncols() == 0 || right.ncols() == 0 {
            return CMat::zeros(dim, 0);
        }
        let overlap = left.adjoint() * right;
        let svd = overlap.svd(true, false);
        let u = svd.u.as_ref().unwrap();
        let cols: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| {
                let s = svd.singular_values[i];
                if near_one {
                    s >= 1.0 - angle_tol
                } else {
                    s <= angle_tol
                }
            })
            .collect();
        let mut b = CMat::zeros(dim, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            let prod = left * crate::cmat::column_of(u, c);
            let mut v = crate::cmat::column_of(&prod, 0);
            fix_phase(&mut v);
            b.view_mut((0, j), (dim, 1)).copy_from(&v);
        }
        b
    };

    let both_ranges = select(&bp, &bq, true);
    let range_to_kernel = select(&bp, &bq, false);
    let kernel_to_range = select(&bp_perp, &bq, true);
    let both_kernels = select(&bp_perp, &bq, false);
    let generic = complement_basis(
        &[&both_ranges, &range_to_kernel, &kernel_to_range, &both_kernels],
        dim,
    );
    PairSplit { both_ranges, both_kernels, range_to_kernel, kernel_to_range, generic }
}

/// Raw general logarithm on matrices (no trace assumptions):
/// `X~ = 1/2 log((2q - 1)(2p - 1))`.
pub(crate) fn log_general_raw(pm: &CMat, qm: &CMat) -> Result<CMat> {
    let dim = pm.nrows();
    let d = crate::matfun::op_norm_hermitian(&(pm - qm));
    let margin = 1.0 - d;
    if margin <= 1e-9 {
        return Err(Error::ProjectionsTooFar { margin });
    }
    let rho_p = pm * re(2.0) - identity(dim);
    let rho_q = qm * re(2.0) - identity(dim);
    let l = principal_log_unitary(&(rho_q * rho_p), 1e-12).map_err(|e| match e {
        Error::SpectrumTouchesMinusOne { .. } => Error::ProjectionsTooFar { margin },
        other => other,
    })?;
    Ok(l * re(0.5))
}

/// Assembles the full-space anti-Hermitian generator of a geodesic from `p`
/// to `q` of length at most pi/2: a quarter-period rotation with the given
/// unitary phase on the rotating pair, the unique geodesic on the generic
/// block, zero elsewhere. `phase` defaults to the identity pairing of the
/// split's bases.
pub fn joining_generator(
    p: &SphereProjection,
    q: &SphereProjection,
    split: &PairSplit,
    phase: Option<&CMat>,
) -> Result<CMat> {
    let dim = p.matrix().nrows();
    let (k_out, k_in) = split.rotation_dims();
    if k_out != k_in {
        return Err(Error::NoGeodesicFound);
    }
    let k = k_out;
    let mut gen = CMat::zeros(dim, dim);
    if k > 0 {
        let u = match phase {
            Some(u) => {
                if u.nrows() != k || u.ncols() != k {
                    return Err(Error::KernelMismatch {
                        reason: format!("phase must be {k}x{k}, got {}x{}", u.nrows(), u.ncols()),
                    });
                }
                u.clone()
            }
            None => identity(k),
        };
        let b10 = &split.range_to_kernel;
        let b01 = &split.kernel_to_range;
        let half_pi = std::f64::consts::FRAC_PI_2;
        gen += b01 * (u.adjoint() * re(half_pi)) * b10.adjoint()
            - b10 * (&u * re(half_pi)) * b01.adjoint();
    }
    if split.generic.ncols() > 0 {
        let b0 = &split.generic;
        let pc = b0.adjoint() * p.matrix() * b0;
        let qc = b0.adjoint() * q.matrix() * b0;
        let x0 = log_general_raw(&pc, &qc)?;
        gen += b0 * x0 * b0.adjoint();
    }
    // exact anti-Hermitian part
    Ok((&gen - gen.adjoint()) * re(0.5))
}

/// Evaluate `e^{t gen} p e^{-t gen}` for an anti-Hermitian generator.
pub fn conjugate_along(p: &CMat, gen: &CMat, t: f64) -> CMat {
    let e = crate::matfun::unitary_exp(&(gen * re(t))).expect("exp of anti-Hermitian");
    let m = &e * p * e.adjoint();
    (&m + m.adjoint()) * re(0.5)
}

/// Largest rotation angle of the generator (operator norm).
pub fn generator_norm(gen: &CMat) -> f64 {
    crate::matfun::op_norm_hermitian(&(gen * Complex64::new(0.0, 1.0)))
}
