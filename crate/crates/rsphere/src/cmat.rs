//! Dense complex matrices and small block-assembly helpers.
//!
//! Everything in the crate works with `CMat`, a dynamically sized matrix of
//! `Complex<f64>`. Elements of the coefficient algebra are `n x n` blocks;
//! points of the projection sphere are `2n x 2n` matrices assembled from
//! such blocks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, the scalar substrate of the whole crate.
pub type CMat = DMatrix<Complex64>;

/// Real `1.0` as a complex scalar.
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Diagonal matrix from real entries.
pub fn diag_re(entries: &[f64]) -> CMat {
    let n = entries.len();
    let mut m = CMat::zeros(n, n);
    for (i, &x) in entries.iter().enumerate() {
        m[(i, i)] = re(x);
    }
    m
}

/// Convenience constructor from row-major complex pairs.
pub fn from_rows(rows: usize, cols: usize, data: &[Complex64]) -> CMat {
    assert_eq!(data.len(), rows * cols, "entry count must be rows*cols");
    CMat::from_fn(rows, cols, |i, j| data[i * cols + j])
}

/// Frobenius inner product re tr(a* b), the real inner product used for
/// Gram-matrix rank checks.
pub fn frobenius_re(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn all_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(a: &CMat) -> Result<()> {
    if all_finite(a) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { value: f64::NAN, range: "finite entries" })
    }
}

/// Hermitian defect `||a - a*||_F / max(1, ||a||_F)`.
pub fn hermitian_defect(a: &CMat) -> f64 {
    (a - a.adjoint()).norm() / a.norm().max(1.0)
}

/// Largest-magnitude deviation of `u* u` from the identity, in Frobenius norm.
pub fn unitary_defect(u: &CMat) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    (u.adjoint() * u - identity(u.ncols())).norm()
}

/// Assemble a `2n x 2n` matrix from four `n x n` blocks.
pub fn block2(b11: &CMat, b12: &CMat, b21: &CMat, b22: &CMat) -> CMat {
    let n = b11.nrows();
    assert!(
        [b11, b12, b21, b22].iter().all(|b| b.nrows() == n && b.ncols() == n),
        "blocks must be square of equal size"
    );
    let mut m = CMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(b11);
    m.view_mut((0, n), (n, n)).copy_from(b12);
    m.view_mut((n, 0), (n, n)).copy_from(b21);
    m.view_mut((n, n), (n, n)).copy_from(b22);
    m
}

/// Extract the `(i, j)` block of a `2n x 2n` matrix, `i, j` in `{0, 1}`.
pub fn block_of(m: &CMat, i: usize, j: usize) -> CMat {
    let n = m.nrows() / 2;
    assert_eq!(m.nrows(), 2 * n);
    assert_eq!(m.ncols(), 2 * n);
    m.view((i * n, j * n), (n, n)).into()
}

/// Owned `dim x 1` copy of a column.
pub fn column_of(m: &CMat, j: usize) -> CMat {
    CMat::from_fn(m.nrows(), 1, |i, _| m[(i, j)])
}

/// Stack two `n x n` blocks into a `2n x n` column.
pub fn stack2(top: &CMat, bottom: &CMat) -> CMat {
    assert_eq!(top.ncols(), bottom.ncols());
    let n = top.ncols();
    let mut m = CMat::zeros(top.nrows() + bottom.nrows(), n);
    m.view_mut((0, 0), (top.nrows(), n)).copy_from(top);
    m.view_mut((top.nrows(), 0), (bottom.nrows(), n)).copy_from(bottom);
    m
}

/// The projector `diag(I_n, 0_n)`, base point of the sphere.
pub fn base_projector(n: usize) -> CMat {
    let mut m = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = ONE;
    }
    m
}

/// The symmetry `2 p0 - 1 = diag(I_n, -I_n)`.
pub fn base_symmetry(n: usize) -> CMat {
    let mut m = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = ONE;
        m[(n + i, n + i)] = re(-1.0);
    }
    m
}

/// The block swap `[[0, I], [I, 0]]`.
pub fn swap(n: usize) -> CMat {
    let mut m = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = ONE;
        m[(n + i, i)] = ONE;
    }
    m
}
