//! Membership oracles for Fatou components and the boundary-distance /
//! hyperbolic-distance estimators built on them.
//!
//! An oracle answers inside / outside / unknown for a plane point. Boundary
//! distance is estimated by casting equally spaced rays from a query point
//! and bisecting each ray's first exit; hyperbolic distance along a segment
//! is bounded above by trapezoidal quadrature of `2/δ̂`, which dominates the
//! true density of any simply connected domain by the Koebe band.

use std::collections::HashMap;
use std::sync::RwLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::map::EntireMap;

/// Verdict of a membership query.
///
/// `Unknown` (budget exhausted without a decision) is treated as exterior by
/// the distance estimators: that shrinks δ̂ and enlarges distance upper
/// bounds, erring toward "not doubly parabolic".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    Unknown,
}

/// Iteration rule behind [`DomainOracle::right_escape`].
///
/// A point is inside when its orbit reaches `Re z > re_high` with the real
/// part increasing over the last `window` steps; outside when the real part
/// drops below `re_low`; unknown when the budget runs out undecided.
#[derive(Debug, Clone, Copy)]
pub struct RightEscapeParams {
    pub re_high: f64,
    pub re_low: f64,
    pub window: usize,
    pub budget: usize,
}

impl Default for RightEscapeParams {
    fn default() -> Self {
        RightEscapeParams {
            re_high: 50.0,
            re_low: -50.0,
            window: 10,
            budget: 200,
        }
    }
}

type MembershipFn = dyn Fn(Complex64) -> Membership + Send + Sync;

// Cache key: exact bit patterns of the query plus the sampling parameters,
// so differently refined estimates never alias.
type CacheKey = (u64, u64, usize, u64);

/// Membership predicate for a Fatou component plus a cache of
/// boundary-distance estimates.
///
/// The cache is guarded by an `RwLock`: concurrent reads are cheap, inserts
/// take the write lock. Estimates are deterministic functions of the query,
/// so racing duplicate computations is harmless.
pub struct DomainOracle {
    membership: Box<MembershipFn>,
    cache: RwLock<HashMap<CacheKey, f64>>,
    /// Ray probing gives up past `max_extent_factor * (1 + |z|)`.
    max_extent_factor: f64,
}

impl std::fmt::Debug for DomainOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DomainOracle")
            .field("cached", &self.cache.read().map(|c| c.len()).unwrap_or(0))
            .field("max_extent_factor", &self.max_extent_factor)
            .finish()
    }
}

impl DomainOracle {
    /// Oracle from an arbitrary membership predicate.
    pub fn from_fn<F>(membership: F) -> Self
    where
        F: Fn(Complex64) -> Membership + Send + Sync + 'static,
    {
        DomainOracle {
            membership: Box::new(membership),
            cache: RwLock::new(HashMap::new()),
            max_extent_factor: 1e6,
        }
    }

    /// The open unit disc.
    pub fn unit_disc() -> Self {
        Self::from_fn(|z| {
            if z.norm_sqr() < 1.0 {
                Membership::Inside
            } else {
                Membership::Outside
            }
        })
    }

    /// The half-plane `Re z > min_re`.
    pub fn half_plane(min_re: f64) -> Self {
        Self::from_fn(move |z| {
            if z.re > min_re {
                Membership::Inside
            } else {
                Membership::Outside
            }
        })
    }

    /// Orbit-based oracle for the invariant Baker-type component of `map`
    /// that absorbs orbits to the right.
    pub fn right_escape(map: EntireMap, params: RightEscapeParams) -> Self {
        Self::from_fn(move |z| right_escape_membership(&map, z, &params))
    }

    /// Membership verdict at `z`.
    pub fn membership(&self, z: Complex64) -> Membership {
        (self.membership)(z)
    }

    /// Overrides the probing cap (multiples of `1 + |z|`).
    pub fn with_max_extent_factor(mut self, factor: f64) -> Self {
        self.max_extent_factor = factor;
        self
    }

    fn cache_get(&self, key: &CacheKey) -> Option<f64> {
        self.cache.read().ok().and_then(|c| c.get(key).copied())
    }

    fn cache_put(&self, key: CacheKey, value: f64) {
        if let Ok(mut c) = self.cache.write() {
            c.insert(key, value);
        }
    }
}

fn right_escape_membership(
    map: &EntireMap,
    z: Complex64,
    params: &RightEscapeParams,
) -> Membership {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Membership::Unknown;
    }
    let mut current = z;
    let mut rising = 0usize;
    for _ in 0..params.budget {
        let next = map.eval_unchecked(current);
        if !next.re.is_finite() || !next.im.is_finite() {
            // One step overflowed f64; the sign of the real part still tells
            // us which way the orbit blew up.
            return if next.re == f64::INFINITY {
                Membership::Inside
            } else if next.re == f64::NEG_INFINITY {
                Membership::Outside
            } else {
                Membership::Unknown
            };
        }
        if next.re < params.re_low {
            return Membership::Outside;
        }
        rising = if next.re > current.re { rising + 1 } else { 0 };
        if next.re > params.re_high && rising >= params.window {
            return Membership::Inside;
        }
        current = next;
    }
    Membership::Unknown
}

/// Sampling options for the distance estimators.
#[derive(Debug, Clone, Copy)]
pub struct DistanceOptions {
    /// Number of equally spaced ray directions, at least 8.
    pub rays: usize,
    /// Bisection tolerance per ray, relative to `1 + |z|`.
    pub tol_rel: f64,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            rays: 64,
            tol_rel: 1e-6,
        }
    }
}

/// Estimated distance from `z` to the component boundary: the minimum over
/// `rays` directions of the bisection-located first exit, each resolved to
/// `tol`. Overestimates the true distance by at most the angular sampling gap.
pub fn boundary_distance(
    oracle: &DomainOracle,
    z: Complex64,
    rays: usize,
    tol: f64,
) -> Result<f64> {
    if rays < 8 {
        return Err(Error::InvalidParameter("need at least 8 rays".into()));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    match oracle.membership(z) {
        Membership::Inside => {}
        Membership::Outside => return Err(Error::QueryOutsideDomain),
        Membership::Unknown => return Err(Error::OracleInconclusive),
    }

    let key = (z.re.to_bits(), z.im.to_bits(), rays, tol.to_bits());
    if let Some(hit) = oracle.cache_get(&key) {
        return Ok(hit);
    }

    let max_extent = oracle.max_extent_factor * (1.0 + z.norm());
    let mut best = f64::INFINITY;
    for k in 0..rays {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / rays as f64;
        let dir = Complex64::new(phi.cos(), phi.sin());
        if let Some(exit) = first_exit(oracle, z, dir, tol, max_extent) {
            best = best.min(exit);
        }
    }
    // Every sampled direction ran off the cap: report the cap itself, the
    // deepest certified-inside radius.
    let delta = if best.is_finite() { best } else { max_extent };
    oracle.cache_put(key, delta);
    Ok(delta)
}

/// First ray exit by doubling probes then bisection; `None` when the ray
/// stays inside out to `max_extent`.
fn first_exit(
    oracle: &DomainOracle,
    z: Complex64,
    dir: Complex64,
    tol: f64,
    max_extent: f64,
) -> Option<f64> {
    let mut lo = 0.0f64;
    let mut hi = tol;
    loop {
        if hi > max_extent {
            return None;
        }
        match oracle.membership(z + hi * dir) {
            Membership::Inside => {
                lo = hi;
                hi *= 2.0;
            }
            _ => break,
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match oracle.membership(z + mid * dir) {
            Membership::Inside => lo = mid,
            _ => hi = mid,
        }
    }
    Some(0.5 * (lo + hi))
}

/// Trapezoidal quadrature of `2/δ̂` along the straight segment `[z, w]`: an
/// upper bound for the hyperbolic distance `d_U(z, w)` of a simply connected
/// domain, by the Koebe upper density bound.
///
/// The matching lower-bound proxy (quadrature of `1/(2δ̂)`) is exactly a
/// quarter of the returned value.
pub fn segment_distance_upper(
    oracle: &DomainOracle,
    z: Complex64,
    w: Complex64,
    steps: usize,
) -> Result<f64> {
    segment_distance_upper_with(oracle, z, w, steps, &DistanceOptions::default())
}

/// [`segment_distance_upper`] with explicit ray/tolerance options.
pub fn segment_distance_upper_with(
    oracle: &DomainOracle,
    z: Complex64,
    w: Complex64,
    steps: usize,
    opts: &DistanceOptions,
) -> Result<f64> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    if z == w {
        return Ok(0.0);
    }
    let length = (w - z).norm();
    let mut densities = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let t = j as f64 / steps as f64;
        let zeta = z + t * (w - z);
        if oracle.membership(zeta) != Membership::Inside {
            return Err(Error::SegmentExitsDomain);
        }
        let tol = opts.tol_rel * (1.0 + zeta.norm());
        let delta = boundary_distance(oracle, zeta, opts.rays, tol)?;
        densities.push(2.0 / delta);
    }
    let h = length / steps as f64;
    let mut acc = 0.0;
    for j in 0..steps {
        acc += 0.5 * (densities[j] + densities[j + 1]) * h;
    }
    Ok(acc)
}
