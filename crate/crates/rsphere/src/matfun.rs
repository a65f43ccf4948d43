//! Dense complex matrix kernel: Hermitian functional calculus, polar and
//! singular value decompositions, operator norms, principal logarithms of
//! unitaries.
//!
//! Matrix functions are evaluated through a full Hermitian eigendecomposition
//! `A = U diag(l) U*`, so `f(A) = U diag(f(l)) U*`. The spectra handled here
//! are small (dimension a few hundred at most) and the spectral definition is
//! the one every geometric formula in this crate is stated in.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::cmat::{identity, re, CMat};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Named scalar functions admitted by [`herm_fun`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarFn {
    Cos,
    Sin,
    /// sin(x)/x, continued by 1 at 0.
    Sinc,
    Tan,
    Arcsin,
    /// arcsin(x)/x, continued by 1 at 0.
    Asinc,
    Arctan,
    Arccos,
    Sqrt,
    Square,
    /// x -> e^{ix}; the one complex-valued entry, used to exponentiate
    /// Hermitian generators.
    ExpI,
}

impl ScalarFn {
    pub fn name(self) -> &'static str {
        match self {
            ScalarFn::Cos => "cos",
            ScalarFn::Sin => "sin",
            ScalarFn::Sinc => "sinc",
            ScalarFn::Tan => "tan",
            ScalarFn::Arcsin => "arcsin",
            ScalarFn::Asinc => "asinc",
            ScalarFn::Arctan => "arctan",
            ScalarFn::Arccos => "arccos",
            ScalarFn::Sqrt => "sqrt",
            ScalarFn::Square => "square",
            ScalarFn::ExpI => "exp_i",
        }
    }
}

/// Series switchover for sinc/asinc; below this the direct quotient loses
/// digits to cancellation.
const SERIES_CUT: f64 = 1e-4;

pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_CUT {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

pub(crate) fn asinc(x: f64) -> f64 {
    if x.abs() < SERIES_CUT {
        let x2 = x * x;
        1.0 + x2 / 6.0 + 3.0 * x2 * x2 / 40.0
    } else {
        x.asin() / x
    }
}

fn eval_scalar(f: ScalarFn, x: f64, tol: &Tolerances) -> Result<Complex64> {
    let dom = tol.fn_domain;
    let out_of = |function| Err(Error::SpectrumOutOfDomain { function, eigenvalue: x });
    let v = match f {
        ScalarFn::Cos => x.cos(),
        ScalarFn::Sin => x.sin(),
        ScalarFn::Sinc => sinc(x),
        ScalarFn::Tan => {
            let k = ((x - std::f64::consts::FRAC_PI_2) / std::f64::consts::PI).round();
            let pole = std::f64::consts::FRAC_PI_2 + k * std::f64::consts::PI;
            if (x - pole).abs() < tol.tan_pole_guard {
                return out_of("tan");
            }
            x.tan()
        }
        ScalarFn::Arcsin => {
            if x.abs() > 1.0 + dom {
                return out_of("arcsin");
            }
            x.clamp(-1.0, 1.0).asin()
        }
        ScalarFn::Asinc => {
            if x.abs() > 1.0 + dom {
                return out_of("asinc");
            }
            asinc(x.clamp(-1.0, 1.0))
        }
        ScalarFn::Arctan => x.atan(),
        ScalarFn::Arccos => {
            if x.abs() > 1.0 + dom {
                return out_of("arccos");
            }
            x.clamp(-1.0, 1.0).acos()
        }
        ScalarFn::Sqrt => {
            if x < -dom {
                return out_of("sqrt");
            }
            x.max(0.0).sqrt()
        }
        ScalarFn::Square => x * x,
        ScalarFn::ExpI => return Ok(Complex64::new(x.cos(), x.sin())),
    };
    Ok(Complex64::new(v, 0.0))
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues (real, unordered)
/// and the unitary of eigenvectors. The input is symmetrized first.
pub fn hermitian_eigen(a: &CMat) -> (DVector<f64>, CMat) {
    let h = (a + a.adjoint()) * re(0.5);
    let se = h.symmetric_eigen();
    (se.eigenvalues, se.eigenvectors)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig_hermitian(a: &CMat) -> f64 {
    let (vals, _) = hermitian_eigen(a);
    vals.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Functional calculus `f(A) = U f(L) U*` for Hermitian `A`.
///
/// Rejects non-Hermitian input and eigenvalues outside the domain of `f`
/// (naming the offending eigenvalue). For real-valued `f` the result is
/// symmetrized, so it is Hermitian exactly.
pub fn herm_fun(a: &CMat, f: ScalarFn) -> Result<CMat> {
    herm_fun_with(a, f, &Tolerances::default())
}

pub fn herm_fun_with(a: &CMat, f: ScalarFn, tol: &Tolerances) -> Result<CMat> {
    let defect = crate::cmat::hermitian_defect(a);
    if defect > tol.membership {
        return Err(Error::NotHermitian { defect, tol: tol.membership });
    }
    let (vals, vecs) = hermitian_eigen(a);
    let n = a.nrows();
    let mut fl = CMat::zeros(n, n);
    for i in 0..n {
        fl[(i, i)] = eval_scalar(f, vals[i], tol)?;
    }
    let out = &vecs * fl * vecs.adjoint();
    if f == ScalarFn::ExpI {
        Ok(out)
    } else {
        Ok((&out + out.adjoint()) * re(0.5))
    }
}

/// Singular triples `(sigma_i, u_i, v_i)` with `a v_i = sigma_i u_i`,
/// positive part only, sorted descending.
#[derive(Debug, Clone)]
pub struct SingularTriples {
    pub sigmas: Vec<f64>,
    /// Left vectors as columns (`rows x k`).
    pub left: CMat,
    /// Right vectors as columns (`cols x k`).
    pub right: CMat,
}

/// Singular triples via the Hermitian eigendecomposition of the block
/// matrix `[[0, a*], [a, 0]]`, whose positive eigenpairs are
/// `(sigma_i, (v_i, u_i)/sqrt(2))`.
///
/// The left/right pairing inherits the Hermitian solver's stability, which
/// matters for clustered singular values (the plain bidiagonal route can
/// mis-pair them and lose reconstruction accuracy). Triples with
/// `sigma <= rel_cut * max(1, sigma_max)` are dropped; every consumer here
/// applies scalar functions vanishing at 0, so dropped directions
/// contribute nothing.
pub fn singular_triples(a: &CMat, rel_cut: f64) -> SingularTriples {
    let (rows, cols) = (a.nrows(), a.ncols());
    let dim = rows + cols;
    let mut h = CMat::zeros(dim, dim);
    h.view_mut((0, cols), (cols, rows)).copy_from(&a.adjoint());
    h.view_mut((cols, 0), (rows, cols)).copy_from(a);
    let (vals, vecs) = hermitian_eigen(&h);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    let smax = vals[order[0]].max(0.0);
    let cut = rel_cut * smax.max(1.0);
    let kept: Vec<usize> =
        order.into_iter().filter(|&i| vals[i] > cut).take(rows.min(cols)).collect();
    let k = kept.len();
    let mut sigmas = Vec::with_capacity(k);
    let mut left = CMat::zeros(rows, k);
    let mut right = CMat::zeros(cols, k);
    let sqrt2 = re(std::f64::consts::SQRT_2);
    for (j, &idx) in kept.iter().enumerate() {
        sigmas.push(vals[idx]);
        for r in 0..cols {
            right[(r, j)] = vecs[(r, idx)] * sqrt2;
        }
        for r in 0..rows {
            left[(r, j)] = vecs[(cols + r, idx)] * sqrt2;
        }
    }
    SingularTriples { sigmas, left, right }
}

impl SingularTriples {
    /// `sum f(sigma_i) u_i v_i*` — the codiagonal-style assembly.
    pub fn map_outer(&self, f: impl Fn(f64) -> f64) -> CMat {
        let mut out = CMat::zeros(self.left.nrows(), self.right.nrows());
        for (j, &s) in self.sigmas.iter().enumerate() {
            let u = crate::cmat::column_of(&self.left, j);
            let v = crate::cmat::column_of(&self.right, j);
            out += &u * v.adjoint() * re(f(s));
        }
        out
    }

    /// `sum f(sigma_i) v_i v_i*` (right side), Hermitian for real `f`.
    pub fn map_right(&self, f: impl Fn(f64) -> f64) -> CMat {
        let mut out = CMat::zeros(self.right.nrows(), self.right.nrows());
        for (j, &s) in self.sigmas.iter().enumerate() {
            let v = crate::cmat::column_of(&self.right, j);
            out += &v * v.adjoint() * re(f(s));
        }
        (&out + out.adjoint()) * re(0.5)
    }

    /// `sum f(sigma_i) u_i u_i*` (left side), Hermitian for real `f`.
    pub fn map_left(&self, f: impl Fn(f64) -> f64) -> CMat {
        let mut out = CMat::zeros(self.left.nrows(), self.left.nrows());
        for (j, &s) in self.sigmas.iter().enumerate() {
            let u = crate::cmat::column_of(&self.left, j);
            out += &u * u.adjoint() * re(f(s));
        }
        (&out + out.adjoint()) * re(0.5)
    }
}

/// Like [`singular_triples`] with the numerically-zero cut: keeps
/// everything that is not a floating-point zero of the spectrum.
pub fn singular_triples_full(a: &CMat) -> SingularTriples {
    singular_triples(a, 1e-14)
}

/// Polar decomposition `a = v |a|`.
#[derive(Debug, Clone)]
pub struct PolarParts {
    /// Partial isometry `v`, vanishing on `ker |a|` (singular values below
    /// the rank tolerance are dropped).
    pub isometry: CMat,
    /// Positive semidefinite modulus `|a| = (a* a)^{1/2}`.
    pub modulus: CMat,
}

/// Polar decomposition via paired singular triples. The zero matrix yields
/// `(0, 0)`.
pub fn polar(a: &CMat) -> PolarParts {
    polar_with(a, Tolerances::default().rank_rel)
}

pub fn polar_with(a: &CMat, rank_rel: f64) -> PolarParts {
    let triples = singular_triples_full(a);
    let smax = triples.sigmas.first().copied().unwrap_or(0.0);
    let cut = rank_rel * smax.max(1.0);
    let modulus = triples.map_right(|s| s);
    let isometry = triples.map_outer(|s| if s > cut { 1.0 } else { 0.0 });
    PolarParts { isometry, modulus }
}

/// Operator norm: the largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let svd = a.clone().svd(false, false);
    svd.singular_values.iter().cloned().fold(0.0f64, f64::max)
}

/// Operator norm of a Hermitian matrix via its spectrum (cheaper than a
/// full SVD at the larger sizes the Fourier experiments use).
pub fn op_norm_hermitian(a: &CMat) -> f64 {
    let (vals, _) = hermitian_eigen(a);
    vals.iter().map(|x| x.abs()).fold(0.0f64, f64::max)
}

/// Number of singular values exceeding `tol * max(1, op_norm(a))`.
pub fn rank_eps(a: &CMat, tol: f64) -> usize {
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cut = tol * smax.max(1.0);
    svd.singular_values.iter().filter(|&&s| s > cut).count()
}

/// Principal logarithm of a unitary: the anti-Hermitian `L` with `e^L = u`
/// and spectrum of `-iL` in `(-pi, pi)`.
///
/// `gap` is the required arc distance of the spectrum from `-1`; eigenvalues
/// closer than that are rejected. Computed through the Cayley transform
/// `C = i (1 - u)(1 + u)^{-1}`, which is Hermitian with eigenvalues
/// `tan(theta/2)` on the eigenbasis of `u`.
pub fn principal_log_unitary(u: &CMat, gap: f64) -> Result<CMat> {
    principal_log_unitary_with(u, gap, &Tolerances::default())
}

pub fn principal_log_unitary_with(u: &CMat, gap: f64, tol: &Tolerances) -> Result<CMat> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", u.nrows(), u.ncols()),
        });
    }
    let defect = crate::cmat::unitary_defect(u) / (n as f64).sqrt().max(1.0);
    if defect > tol.membership.max(1e-10) * 10.0 {
        return Err(Error::NotUnitary { defect, tol: tol.membership * 10.0 });
    }
    // |1 + e^{i theta}| = 2 cos(theta/2); the gap condition |theta| <= pi - gap
    // becomes sigma_min(1 + u) >= 2 sin(gap/2).
    let one_plus = identity(n) + u;
    let svd = one_plus.clone().svd(false, false);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin < 2.0 * (gap / 2.0).sin() {
        return Err(Error::SpectrumTouchesMinusOne { gap });
    }
    let lu = one_plus.lu();
    let inv = lu.try_inverse().ok_or(Error::SpectrumTouchesMinusOne { gap })?;
    let cayley = (identity(n) - u) * inv * Complex64::new(0.0, 1.0);
    let (vals, vecs) = hermitian_eigen(&cayley);
    let mut theta = CMat::zeros(n, n);
    for i in 0..n {
        theta[(i, i)] = Complex64::new(0.0, 2.0 * vals[i].atan());
    }
    let l = &vecs * theta * vecs.adjoint();
    Ok((&l - l.adjoint()) * re(0.5))
}

/// Exponential of an anti-Hermitian matrix, via the Hermitian calculus of
/// `iA`. The result is unitary.
pub fn unitary_exp(a: &CMat) -> Result<CMat> {
    // e^A = e^{-iH} with H = iA Hermitian.
    let h = a * Complex64::new(0.0, 1.0);
    herm_fun(&(-&h), ScalarFn::ExpI)
}

/// `(1 + a* a)^{-1/2}`, the normalizing factor of graph columns.
pub fn inv_sqrt_one_plus_gram(a: &CMat) -> CMat {
    let n = a.ncols();
    let g = identity(n) + a.adjoint() * a;
    let (vals, vecs) = hermitian_eigen(&g);
    let mut d = CMat::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = re(1.0 / vals[i].max(1.0).sqrt().max(f64::MIN_POSITIVE));
    }
    let out = &vecs * d * vecs.adjoint();
    (&out + out.adjoint()) * re(0.5)
}

/// Hermitian solution of `h x = b` for positive definite `h` (Cholesky).
pub fn hpd_solve(h: &CMat, b: &CMat) -> Option<CMat> {
    let hs = (h + h.adjoint()) * re(0.5);
    hs.cholesky().map(|c| c.solve(b))
}
