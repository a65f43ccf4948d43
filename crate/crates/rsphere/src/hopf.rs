//! The unitary sphere of isometric block columns and its fibration onto the
//! projection sphere.
//!
//! A point of the sphere is a pair `(x1, x2)` of `n x n` blocks with
//! `x1* x1 + x2* x2 = I`, i.e. an isometry `C^n -> C^{2n}`. The fibration
//! sends `x` to the rank-`n` projection `x x*`; its fibers are the right
//! unitary orbits `x u`. Over the chart where `x1` is invertible the map has
//! the section with positive-definite top block.

use crate::cmat::{self, block2, identity, re, stack2, CMat};
use crate::error::{Error, Result};
use crate::manifold::SphereProjection;
use crate::matfun::{self, hermitian_eigen};
use crate::tol::Tolerances;

/// Isometric block column `(x1, x2)`, an element of the unitary sphere.
///
/// In a matrix algebra the isometry condition alone characterizes
/// membership: any isometry `C^n -> C^{2n}` extends to a unitary of
/// `C^{2n}` because its range has an `n`-dimensional complement.
#[derive(Debug, Clone)]
pub struct SphereVector {
    x1: CMat,
    x2: CMat,
}

impl SphereVector {
    /// Validates the isometry condition before accepting the pair.
    pub fn try_new(x1: CMat, x2: CMat, tol: &Tolerances) -> Result<Self> {
        check_shapes(&x1, &x2)?;
        let defect = isometry_defect(&x1, &x2);
        if defect > tol.membership {
            return Err(Error::NotInSphere { defect, tol: tol.membership });
        }
        Ok(SphereVector { x1, x2 })
    }

    pub(crate) fn from_trusted(x1: CMat, x2: CMat) -> Self {
        SphereVector { x1, x2 }
    }

    /// The base point `e1 = (I, 0)`.
    pub fn basis_vector(n: usize) -> Self {
        SphereVector { x1: identity(n), x2: CMat::zeros(n, n) }
    }

    pub fn x1(&self) -> &CMat {
        &self.x1
    }

    pub fn x2(&self) -> &CMat {
        &self.x2
    }

    /// Block size `n` of the coefficient algebra.
    pub fn algebra_dim(&self) -> usize {
        self.x1.nrows()
    }

    /// The `2n x n` stacked column.
    pub fn column(&self) -> CMat {
        stack2(&self.x1, &self.x2)
    }

    /// Right action `x . u` of a unitary of the algebra.
    pub fn gauge(&self, u: &CMat) -> SphereVector {
        SphereVector { x1: &self.x1 * u, x2: &self.x2 * u }
    }

    /// Module inner product `<x, z> = x1* z1 + x2* z2`.
    pub fn inner(&self, z: &SphereVector) -> CMat {
        self.x1.adjoint() * &z.x1 + self.x2.adjoint() * &z.x2
    }
}

/// Tangent vector `(xi1, xi2)` at a sphere point: the pairing `<x, xi>`
/// must be anti-Hermitian.
#[derive(Debug, Clone)]
pub struct TangentAtSphere {
    pub base: SphereVector,
    pub xi1: CMat,
    pub xi2: CMat,
}

impl TangentAtSphere {
    pub fn try_new(base: SphereVector, xi1: CMat, xi2: CMat, tol: &Tolerances) -> Result<Self> {
        check_shapes(&xi1, &xi2)?;
        let t = TangentAtSphere { base, xi1, xi2 };
        let defect = t.tangency_defect();
        if defect > tol.membership * t.norm().max(1.0) {
            return Err(Error::NotTangent { defect });
        }
        Ok(t)
    }

    fn pairing(&self) -> CMat {
        self.base.x1.adjoint() * &self.xi1 + self.base.x2.adjoint() * &self.xi2
    }

    pub fn tangency_defect(&self) -> f64 {
        let w = self.pairing();
        (&w + w.adjoint()).norm() * 0.5
    }

    /// Norm as an element of the module `A^2` (largest singular value of the
    /// stacked column).
    pub fn norm(&self) -> f64 {
        matfun::op_norm(&stack2(&self.xi1, &self.xi2))
    }
}

fn check_shapes(x1: &CMat, x2: &CMat) -> Result<()> {
    let n = x1.nrows();
    if x1.ncols() != n || x2.nrows() != n || x2.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: "equal square blocks".into(),
            got: format!("{}x{} and {}x{}", x1.nrows(), x1.ncols(), x2.nrows(), x2.ncols()),
        });
    }
    Ok(())
}

fn isometry_defect(x1: &CMat, x2: &CMat) -> f64 {
    let g = x1.adjoint() * x1 + x2.adjoint() * x2;
    matfun::op_norm(&(g - identity(x1.ncols())))
}

/// Membership test: `|| x1* x1 + x2* x2 - I || <= tol`.
pub fn in_sphere(x1: &CMat, x2: &CMat, tol: f64) -> Result<bool> {
    check_shapes(x1, x2)?;
    Ok(isometry_defect(x1, x2) <= tol)
}

/// The fibration `x -> x x*`, landing in the projection sphere.
pub fn hopf(x: &SphereVector) -> SphereProjection {
    let col = x.column();
    let m = &col * col.adjoint();
    SphereProjection::from_trusted((&m + m.adjoint()) * re(0.5))
}

/// Principal chart of the sphere: `x -> (x2 x1^{-1}, u)` with `x1 = r u`
/// the polar decomposition, `r` positive definite.
pub fn psi0(x: &SphereVector) -> Result<(CMat, CMat)> {
    let tol = Tolerances::default();
    let triples = matfun::singular_triples_full(&x.x1);
    let n = x.algebra_dim();
    let smin = triples.sigmas.last().copied().unwrap_or(0.0);
    if triples.sigmas.len() < n || smin <= tol.rank_rel {
        return Err(Error::TopBlockSingular);
    }
    let u = triples.map_outer(|_| 1.0);
    // a = x2 x1^{-1} through the adjoint system x1* a* = x2*.
    let a = x.x1.adjoint().lu().solve(&x.x2.adjoint()).ok_or(Error::TopBlockSingular)?.adjoint();
    Ok((a, u))
}

/// Inverse of the principal chart: `(a, u) -> ((1+a*a)^{-1/2} u, a (1+a*a)^{-1/2} u)`.
#[allow(non_snake_case)]
pub fn Psi0(a: &CMat, u: &CMat) -> Result<SphereVector> {
    let tol = Tolerances::default();
    let defect = cmat::unitary_defect(u);
    if defect > tol.membership * (u.nrows() as f64).sqrt().max(1.0) {
        return Err(Error::NotUnitary { defect, tol: tol.membership });
    }
    let c = matfun::inv_sqrt_one_plus_gram(a);
    Ok(SphereVector { x1: &c * u, x2: a * &c * u })
}

/// Local section of the fibration over the principal chart: the unique
/// preimage with positive-definite top block.
pub fn section_sigma(p: &SphereProjection) -> Result<SphereVector> {
    let tol = Tolerances::default();
    let p11 = p.block(0, 0);
    let p21 = p.block(1, 0);
    let (vals, vecs) = hermitian_eigen(&p11);
    let n = p11.nrows();
    let vmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if vmin <= tol.rank_rel {
        return Err(Error::NotInChart);
    }
    let mut sq = CMat::zeros(n, n);
    let mut isq = CMat::zeros(n, n);
    for i in 0..n {
        let s = vals[i].max(0.0).sqrt();
        sq[(i, i)] = re(s);
        isq[(i, i)] = re(1.0 / s);
    }
    let x1 = &vecs * sq * vecs.adjoint();
    let x1 = (&x1 + x1.adjoint()) * re(0.5);
    let x2 = p21 * (&vecs * isq * vecs.adjoint());
    Ok(SphereVector { x1, x2 })
}

/// Completes a sphere point with invertible top block to a `2n x 2n`
/// unitary whose first block column is the point. The free unitary in the
/// second column is fixed to the identity; other completions are obtained
/// by right multiplication with `diag(I, v)`.
pub fn unitary_completion(x: &SphereVector) -> Result<CMat> {
    let (a, u) = psi0(x)?;
    let c = matfun::inv_sqrt_one_plus_gram(&a);
    let c_op = matfun::inv_sqrt_one_plus_gram(&a.adjoint());
    Ok(block2(
        &(&c * &u),
        &(-a.adjoint() * &c_op),
        &(&a * &c * &u),
        &c_op,
    ))
}

/// Unitary fiber coordinate between two points over the same projection:
/// `u = <x, z>`, so that `z = x . u`.
pub fn fiber_transfer(x: &SphereVector, z: &SphereVector) -> Result<CMat> {
    let px = hopf(x);
    let pz = hopf(z);
    let defect = matfun::op_norm(&(px.matrix() - pz.matrix()));
    let tol = Tolerances::default();
    if defect > tol.membership {
        return Err(Error::NotSameFiber { defect });
    }
    Ok(x.inner(z))
}

/// Splits a tangent vector into its vertical part `x . <x, xi>` (along the
/// fiber) and horizontal part (in the kernel of the projection).
pub fn tangent_split(xi: &TangentAtSphere) -> Result<(TangentAtSphere, TangentAtSphere)> {
    let tol = Tolerances::default();
    let defect = xi.tangency_defect();
    if defect > tol.membership * xi.norm().max(1.0) {
        return Err(Error::NotTangent { defect });
    }
    let w = xi.base.x1.adjoint() * &xi.xi1 + xi.base.x2.adjoint() * &xi.xi2;
    let w = (&w - w.adjoint()) * re(0.5); // anti-Hermitian part
    let v1 = &xi.base.x1 * &w;
    let v2 = &xi.base.x2 * &w;
    let vertical = TangentAtSphere { base: xi.base.clone(), xi1: v1.clone(), xi2: v2.clone() };
    let horizontal =
        TangentAtSphere { base: xi.base.clone(), xi1: &xi.xi1 - v1, xi2: &xi.xi2 - v2 };
    Ok((vertical, horizontal))
}

/// Structure morphism: a tangent vector `X` of the projection sphere at
/// `x x*` maps to the horizontal vector `X x` at `x`.
pub fn kappa(x: &SphereVector, tangent: &CMat) -> Result<TangentAtSphere> {
    let n = x.algebra_dim();
    if tangent.nrows() != 2 * n || tangent.ncols() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", 2 * n),
            got: format!("{}x{}", tangent.nrows(), tangent.ncols()),
        });
    }
    let p = hopf(x);
    let pm = p.matrix();
    let defect = ((tangent * pm) - (identity(2 * n) - pm) * tangent).norm()
        / tangent.norm().max(1.0)
        + cmat::hermitian_defect(tangent);
    if defect > Tolerances::default().membership {
        return Err(Error::NotCodiagonal { defect });
    }
    let col = tangent * x.column();
    let xi1: CMat = col.view((0, 0), (n, n)).into();
    let xi2: CMat = col.view((n, 0), (n, n)).into();
    Ok(TangentAtSphere { base: x.clone(), xi1, xi2 })
}
