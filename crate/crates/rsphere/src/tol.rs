//! Numerical tolerances used across the crate.
//!
//! Every threshold is configurable; the defaults below are what the test
//! suites pin. They fall into three groups: relative thresholds for rank
//! and membership decisions, absolute thresholds for scalar-function
//! domains, and guards that keep spectral computations away from branch
//! points.

/// Tolerance bundle threaded through the geometric operations.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative tolerance for membership checks (isometry columns,
    /// Hermitian-idempotent tests, fiber comparisons). Default `1e-8`.
    pub membership: f64,
    /// Relative singular-value threshold for rank decisions. Default `1e-8`.
    pub rank_rel: f64,
    /// Absolute tolerance for scalar-function domain checks
    /// (e.g. arcsin needs spectrum in [-1, 1]). Default `1e-10`.
    pub fn_domain: f64,
    /// Reject tan at eigenvalues within this distance of pi/2 + k pi.
    /// Default `1e-6`.
    pub tan_pole_guard: f64,
    /// Projections failing the Hermitian-idempotent check by more than this
    /// are rejected rather than re-projected. Default `1e-6`.
    pub projection_accept: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            membership: 1e-8,
            rank_rel: 1e-8,
            fn_domain: 1e-10,
            tan_pole_guard: 1e-6,
            projection_accept: 1e-6,
        }
    }
}

impl Tolerances {
    /// Uniformly scale the relative thresholds (used by the CLI `--tol` flag).
    pub fn scaled(factor: f64) -> Self {
        let d = Tolerances::default();
        Tolerances {
            membership: d.membership * factor,
            rank_rel: d.rank_rel * factor,
            projection_accept: d.projection_accept * factor,
            ..d
        }
    }
}
