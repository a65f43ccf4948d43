//! Graphs of operators as points of the projection sphere: graph and
//! inverse-graph projections, perpendicular graphs, existence of joining
//! geodesics, the unique minimal geodesic from the base point to a graph,
//! bounded-deformation schedules and their optimality, common-complement
//! witnesses, and density probes.
//!
//! Unbounded operators enter as their truncations (large-norm matrices);
//! statements about the `t -> 1` limit become convergence statements over
//! the truncation size, exercised in the spectral module.

use crate::cmat::{identity, swap, CMat};
use crate::error::{Error, Result};
use crate::join::{conjugate_along, generator_norm, joining_generator, pair_split};
use crate::manifold::{
    finsler_dist, geodesic_eval, norm_distance, phi0_inv, Geodesic, SphereProjection,
    TangentVector,
};
use crate::matfun;
use crate::tol::Tolerances;

/// Orthogonal projection onto the graph of `T`:
/// `[[c2, c2 T*], [T c2, T c2 T*]]` with `c2 = (1 + T* T)^{-1}`.
///
/// Shares the evaluation path of the inverse chart, so the two agree
/// bit for bit.
pub fn proj_graph(t: &CMat) -> SphereProjection {
    phi0_inv(t)
}

/// Projection onto the inverse graph `{(Tx, x)}`: the swap conjugate of the
/// graph projection.
pub fn proj_inv_graph(t: &CMat) -> SphereProjection {
    let n = t.nrows();
    let s = swap(n);
    let m = &s * proj_graph(t).matrix() * &s;
    SphereProjection::from_trusted(m)
}

/// Verifies that the kernel of the graph projection is the column space of
/// `(-T*, I) (1 + T T*)^{-1/2}` (the inverse graph of `-T*`).
pub fn graph_perp_check(t: &CMat, tol: f64) -> bool {
    let n = t.nrows();
    let p = proj_graph(t);
    let kernel_proj = identity(2 * n) - p.matrix();
    let c = matfun::inv_sqrt_one_plus_gram(&t.adjoint());
    let col = crate::cmat::stack2(&(-t.adjoint() * &c), &c);
    let span_proj = &col * col.adjoint();
    matfun::op_norm_hermitian(&(kernel_proj - span_proj)) <= tol
}

/// Smallest retained and largest discarded singular values of a rank
/// decision, for auditing borderline kernels.
#[derive(Debug, Clone, Copy)]
pub struct RankMargin {
    pub smallest_retained: f64,
    pub largest_discarded: f64,
}

/// Existence and uniqueness of a minimal geodesic between two graph
/// projections, by the kernel dimensions of `1 + T* S` and `1 + S* T`.
#[derive(Debug, Clone)]
pub struct GraphGeodesicExistence {
    pub exists: bool,
    pub unique: bool,
    /// dim ker(1 + S* T)
    pub dim_st: usize,
    /// dim ker(1 + T* S)
    pub dim_ts: usize,
    pub margin_st: RankMargin,
    pub margin_ts: RankMargin,
}

fn kernel_dim_with_margin(m: &CMat, tol: f64) -> (usize, RankMargin) {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cut = tol * smax.max(1.0);
    let mut smallest_retained = f64::INFINITY;
    let mut largest_discarded: f64 = 0.0;
    let mut rank = 0usize;
    for &s in svd.singular_values.iter() {
        if s > cut {
            rank += 1;
            smallest_retained = smallest_retained.min(s);
        } else {
            largest_discarded = largest_discarded.max(s);
        }
    }
    (m.nrows() - rank, RankMargin { smallest_retained, largest_discarded })
}

/// Geodesic existence between the graphs of `S` and `T`.
///
/// In finite dimension the two kernel dimensions always coincide (the
/// nonzero spectra of `T*S` and `ST*`-type products agree), so `exists` is
/// always true here; the margins report how decisively the ranks were cut.
pub fn geodesic_exists_graphs(s: &CMat, t: &CMat, tol: f64) -> GraphGeodesicExistence {
    let n = s.nrows();
    let m_ts = identity(n) + t.adjoint() * s;
    let m_st = identity(n) + s.adjoint() * t;
    let (dim_ts, margin_ts) = kernel_dim_with_margin(&m_ts, tol);
    let (dim_st, margin_st) = kernel_dim_with_margin(&m_st, tol);
    GraphGeodesicExistence {
        exists: dim_ts == dim_st,
        unique: dim_ts == 0 && dim_st == 0,
        dim_st,
        dim_ts,
        margin_st,
        margin_ts,
    }
}

/// The unique minimal geodesic from the base point to the graph of `T`:
/// generator block `a = V arctan(|T|)` for the polar decomposition
/// `T = V |T|`, so the speed is `arctan(||T||) < pi/2`.
pub fn minimal_geodesic_to_graph(t: &CMat) -> Geodesic {
    let triples = matfun::singular_triples_full(t);
    let a = triples.map_outer(|s| s.atan());
    Geodesic::from_base_point(TangentVector::new(a))
}

/// Bounded-deformation schedule `A(t) = v tan(t arctan |T|)`: the operator
/// whose graph the minimal geodesic passes through at parameter `t`.
/// `A(t) -> T` as `t -> 1` with monotone norm growth
/// `||A(t)|| = tan(t arctan ||T||)`.
pub fn deformation_schedule(t_op: &CMat, t: f64) -> Result<CMat> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange { value: t, range: "[0, 1)" });
    }
    let triples = matfun::singular_triples_full(t_op);
    Ok(triples.map_outer(|s| (t * s.atan()).tan()))
}

/// Polygonal length vs geodesic distance of the deformation path.
#[derive(Debug, Clone, Copy)]
pub struct OptimalityReport {
    /// Polygonal length of the full path `t in [0, 1]`.
    pub length: f64,
    /// Finsler distance between the endpoints.
    pub dist: f64,
    /// Largest gap `|length(t0 -> 1) - dist(t0, 1)|` over the grid of start
    /// points; for a geodesic this is the quadrature error, O(grid^{-2}).
    pub max_gap: f64,
}

/// Compares the polygonal Finsler length of the deformation path from each
/// grid point to the end against the geodesic distance.
pub fn deformation_optimality_report(t_op: &CMat, samples: usize) -> Result<OptimalityReport> {
    if samples < 2 {
        return Err(Error::ParameterOutOfRange { value: samples as f64, range: "samples >= 2" });
    }
    let geo = minimal_geodesic_to_graph(t_op);
    let grid: Vec<f64> = (0..samples).map(|k| k as f64 / (samples as f64 - 1.0)).collect();
    let points: Vec<SphereProjection> = grid.iter().map(|&t| geo.evaluate(t)).collect();
    let chords: Vec<f64> = (0..samples - 1)
        .map(|k| norm_distance(&points[k], &points[k + 1]))
        .collect();
    // suffix sums: length from grid[k] to 1
    let mut lengths = vec![0.0f64; samples];
    for k in (0..samples - 1).rev() {
        lengths[k] = lengths[k + 1] + chords[k];
    }
    let last = points.last().unwrap();
    let mut max_gap: f64 = 0.0;
    for k in 0..samples - 1 {
        let dist = if norm_distance(&points[k], last) < 1.0 - 1e-9 {
            finsler_dist(&points[k], last)?
        } else {
            // endpoint at full quarter-turn distance; fall back to the
            // analytic value of the geodesic segment
            (1.0 - grid[k]) * geo.speed()
        };
        max_gap = max_gap.max((lengths[k] - dist).abs());
    }
    let dist0 = (grid[samples - 1] - grid[0]) * geo.speed();
    Ok(OptimalityReport { length: lengths[0], dist: dist0, max_gap })
}

/// Midpoint witness for the common-complement criterion: a projection `Q`
/// with `||pS - Q|| < 1` and `||Q - pT|| < 1`, obtained as the midpoint of a
/// joining geodesic, when the two rotation blocks have equal dimension.
/// With equal traces in finite dimension a witness always exists.
pub fn common_complement_witness(
    ps: &SphereProjection,
    pt: &SphereProjection,
) -> Result<Option<SphereProjection>> {
    if ps.algebra_dim() != pt.algebra_dim() {
        return Err(Error::TraceMismatch { left: ps.algebra_dim(), right: pt.algebra_dim() });
    }
    let split = pair_split(ps.matrix(), pt.matrix(), 1e-7);
    let (k_out, k_in) = split.rotation_dims();
    if k_out != k_in {
        return Ok(None);
    }
    let gen = joining_generator(ps, pt, &split, None)?;
    let mid = conjugate_along(ps.matrix(), &gen, 0.5);
    Ok(Some(SphereProjection::from_trusted(mid)))
}

/// Moves `q` an arbitrarily small step along a geodesic towards the base
/// point: returns `q0` on a geodesic from the base point to `q` with
/// `||q0 - q|| < eps` and `||p0 - q0|| < 1` (both strict; the step backs
/// off by a relative 3e-6 so the bounds hold with margin).
pub fn densify(q: &SphereProjection, eps: f64) -> Result<SphereProjection> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::ParameterOutOfRange { value: eps, range: "eps > 0" });
    }
    let n = q.algebra_dim();
    let p0 = SphereProjection::base_point(n);
    let split = pair_split(p0.matrix(), q.matrix(), 1e-7);
    let (k_out, k_in) = split.rotation_dims();
    if k_out != k_in {
        return Err(Error::NoGeodesicFound);
    }
    let gen = joining_generator(&p0, q, &split, None)?;
    let speed = generator_norm(&gen);
    if speed < 1e-14 {
        return Ok(p0);
    }
    let x = TangentVector::try_from_tilde(&gen, &Tolerances::default())
        .map_err(|_| Error::NoGeodesicFound)?;
    let angle = (eps.min(1.0)).asin() * (1.0 - 3e-6);
    let t0 = (1.0 - angle / speed).max(0.0);
    Ok(geodesic_eval(&x, t0))
}
