//! Differential geometry of the projection sphere of a matrix algebra.
//!
//! For the algebra `A = M_n(C)`, the crate works in the `2 x 2` operator
//! matrices `M_2(A) = M_{2n}(C)` and studies the unitary orbit of the
//! projector `diag(I, 0)` — rank-`n` orthogonal projections of `C^{2n}`,
//! i.e. the Grassmannian of half-dimensional subspaces. On this manifold it
//! provides:
//!
//! - charts through the top-block-invertible region and their Moebius
//!   transitions ([`manifold`]),
//! - closed-form geodesics, the exponential and logarithm of the reductive
//!   connection, the Finsler (operator-norm) distance, angle operators and
//!   parallel transport ([`manifold`]),
//! - the sphere of isometric block columns and its fibration onto the
//!   projections, with local sections and the horizontal/vertical splitting
//!   ([`hopf`]),
//! - graphs of operators as projections: perpendicular graphs, existence
//!   and uniqueness of joining geodesics, optimal bounded deformations of
//!   large-norm (truncated unbounded) operators ([`opgraph`]),
//! - a Fourier-truncated model of the differentiation operator and
//!   multi-geodesic families with Jacobi fields and conjugate-parameter
//!   indices ([`spectral`]),
//! - the Hermitian functional calculus, polar decompositions and principal
//!   unitary logarithms everything above is built on ([`matfun`]).
//!
//! The long-form guide with derivations and worked examples lives in the
//! `book/` directory of the repository; its code snippets compile as part of
//! this crate's doc-tests.

pub mod cmat;
pub mod error;
pub mod hopf;
pub mod join;
pub mod manifold;
pub mod matfun;
pub mod opgraph;
pub mod sample;
pub mod spectral;
pub mod tol;

pub use cmat::CMat;
pub use error::{Error, Result};
pub use tol::Tolerances;

// Compile the book's code snippets as doc-tests so the guide cannot drift
// from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matrix-kernel.md")]
    mod matrix_kernel {}
    #[doc = include_str!("../../../book/src/sphere-and-charts.md")]
    mod sphere_and_charts {}
    #[doc = include_str!("../../../book/src/geodesics.md")]
    mod geodesics {}
    #[doc = include_str!("../../../book/src/operator-graphs.md")]
    mod operator_graphs {}
    #[doc = include_str!("../../../book/src/fourier-model.md")]
    mod fourier_model {}
    #[doc = include_str!("../../../book/src/jacobi-fields.md")]
    mod jacobi_fields {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
