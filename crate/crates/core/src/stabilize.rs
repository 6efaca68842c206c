//! Turning a ray point into an attracting fixed point.
//!
//! Rescaling a map so that a far-out ray point becomes fixed usually makes
//! that point attracting outright. When it does not, the modulus function
//! `g(x) = |h(γ(x))|` is scanned beyond the anchor for a non-repelling
//! crossing `g(x) = x`, the map is renormalized there, and an exactly
//! neutral multiplier is pushed inside the unit circle by affine damping.

use num_complex::Complex64;

use crate::dynamics::{FixedPointRecord, Stability, CLASS_TOL};
use crate::error::{Error, Result};
use crate::map::{damp, renormalize_at, rescale_to_fix, EntireMap, RayCurve};

/// Which route produced the attracting fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilizeBranch {
    /// The rescaled anchor was already attracting.
    Direct,
    /// A secondary modulus crossing beyond the anchor was attracting.
    Secondary,
    /// A neutral multiplier was damped inside the unit circle.
    Damped,
}

impl std::fmt::Display for StabilizeBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StabilizeBranch::Direct => write!(f, "direct"),
            StabilizeBranch::Secondary => write!(f, "secondary"),
            StabilizeBranch::Damped => write!(f, "damped"),
        }
    }
}

/// Result of [`stabilize_along_curve`].
#[derive(Debug, Clone)]
pub struct Stabilized {
    pub map: EntireMap,
    pub record: FixedPointRecord,
    pub branch: StabilizeBranch,
    /// Effective scalar coefficient in front of the base map (the rescale
    /// coefficient, times the renormalizing one when that route was taken).
    pub coefficient: Complex64,
}

/// How far beyond the anchor the secondary search is willing to go,
/// in multiples of `s`.
const SEARCH_SPAN: f64 = 1e4;

/// Rescales `base` to fix `γ(s)` and returns an attracting fixed point near
/// the anchor, taking the direct, secondary, or damped route as needed.
///
/// The damping amount is `ε = s^{-2}` (clamped to 1/2 for `s ≤ √2`), so
/// `ε · s → 0` as the anchor runs off to infinity.
pub fn stabilize_along_curve(base: EntireMap, ray: &RayCurve, s: f64) -> Result<Stabilized> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter("stabilize requires s > 0".into()));
    }
    let h = rescale_to_fix(base, ray, s)?;
    let anchor = ray.point(s);
    let rho = h.deriv(anchor)?;
    let eps = (1.0 / (s * s)).min(0.5);
    let rescale_coeff = match &h {
        EntireMap::ScalarMultiple { coeff, .. } => *coeff,
        _ => unreachable!("rescale_to_fix returns a scalar multiple"),
    };

    if rho.norm() < 1.0 - CLASS_TOL {
        let record = FixedPointRecord::at(&h, anchor)?;
        return Ok(Stabilized {
            map: h,
            record,
            branch: StabilizeBranch::Direct,
            coefficient: rescale_coeff,
        });
    }
    if (rho.norm() - 1.0).abs() <= CLASS_TOL {
        // |h'(anchor)| is neutral; the renormalizing coefficient at a fixed
        // anchor is 1, so this reduces to damping in place.
        let renormed = renormalize_at(h, anchor)?;
        let total = rescale_coeff * scalar_of(&renormed);
        let damped = damp(renormed, anchor, eps)?;
        let record = FixedPointRecord::at(&damped, anchor)?;
        return finish(damped, record, StabilizeBranch::Damped, total);
    }

    // Repelling anchor: look for a later crossing of g(x) = |h(γ(x))| with
    // the diagonal. Asymptotically g(x)/x tends to |γ(s)|/|f(γ(s))| < 1, so
    // a bracket exists whenever the anchor crossing is genuinely expanding.
    let g = |x: f64| -> Option<f64> { h.eval(ray.point(x)).ok().map(|w| w.norm()) };
    let mut crossing_from = s * 1.05;
    for _ in 0..8 {
        let Some(x0) = next_down_crossing(&g, crossing_from, s * SEARCH_SPAN) else {
            return Err(Error::NoSecondaryFixedPoint);
        };
        let w = ray.point(x0);
        let renormed = renormalize_at(h.clone(), w)?;
        let total = rescale_coeff * scalar_of(&renormed);
        let rho2 = renormed.deriv(w)?;
        if rho2.norm() < 1.0 - CLASS_TOL {
            let record = FixedPointRecord::at(&renormed, w)?;
            return finish(renormed, record, StabilizeBranch::Secondary, total);
        }
        if (rho2.norm() - 1.0).abs() <= CLASS_TOL {
            let damped = damp(renormed, w, eps)?;
            let record = FixedPointRecord::at(&damped, w)?;
            return finish(damped, record, StabilizeBranch::Damped, total);
        }
        crossing_from = x0 * 1.05;
    }
    Err(Error::NoSecondaryFixedPoint)
}

fn scalar_of(map: &EntireMap) -> Complex64 {
    match map {
        EntireMap::ScalarMultiple { coeff, .. } => *coeff,
        _ => Complex64::new(1.0, 0.0),
    }
}

fn finish(
    map: EntireMap,
    record: FixedPointRecord,
    branch: StabilizeBranch,
    coefficient: Complex64,
) -> Result<Stabilized> {
    if record.stability != Stability::Attracting {
        return Err(Error::NoSecondaryFixedPoint);
    }
    Ok(Stabilized {
        map,
        record,
        branch,
        coefficient,
    })
}

/// First `x > from` with `g(x) = x` reached from above, by geometric
/// marching followed by bisection. Requires `g(from) > from` to certify the
/// bracket; evaluation failures (overflow) abort the march.
fn next_down_crossing(g: &dyn Fn(f64) -> Option<f64>, from: f64, limit: f64) -> Option<f64> {
    let mut lo = from;
    let glo = g(lo)?;
    if glo <= lo {
        return None;
    }
    let mut hi = lo;
    loop {
        hi *= 1.05;
        if hi > limit {
            return None;
        }
        match g(hi) {
            Some(v) if v < hi => break,
            Some(_) => lo = hi,
            None => return None,
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match g(mid) {
            Some(v) if v > mid => lo = mid,
            _ => hi = mid,
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::c64;

    #[test]
    fn direct_branch_on_the_real_axis() {
        let ray = RayCurve::positive_real_axis();
        let out = stabilize_along_curve(EntireMap::fatou_real(1.0), &ray, 10.0).unwrap();
        assert_eq!(out.branch, StabilizeBranch::Direct);
        assert_eq!(out.record.stability, Stability::Attracting);
        let coeff = 10.0 / ((-10.0f64).exp() + 11.0);
        let expected = coeff * (1.0 - (-10.0f64).exp());
        assert!((out.record.multiplier.norm() - expected).abs() < 1e-12);
        assert!(out.record.residual < 1e-12 * 11.0);
    }

    #[test]
    fn direct_branch_coefficient_bound_far_out() {
        let ray = RayCurve::positive_real_axis();
        let out = stabilize_along_curve(EntireMap::fatou_real(1.0), &ray, 100.0).unwrap();
        assert_eq!(out.branch, StabilizeBranch::Direct);
        assert!((1.0 - out.record.multiplier.norm()).abs() <= 0.02);
    }

    #[test]
    fn damped_branch_on_neutral_anchor() {
        // c = -(s+1)e^{-s} makes the rescaled multiplier exactly neutral at s
        let s = 2.0f64;
        let c = -(s + 1.0) * (-s).exp();
        let ray = RayCurve::positive_real_axis();
        let out = stabilize_along_curve(EntireMap::fatou_real(c), &ray, s).unwrap();
        assert_eq!(out.branch, StabilizeBranch::Damped);
        assert_eq!(out.record.stability, Stability::Attracting);
        // damping formula: modulus (1 - s^{-2}) · 1
        assert!((out.record.multiplier.norm() - (1.0 - 1.0 / (s * s))).abs() < 1e-9);
        assert!((out.record.location - c64(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn secondary_branch_on_oblique_ray() {
        // Along e^{1.26i} the anchor at s = 3.3 is repelling (|ρ| ≈ 1.27)
        // and the modulus function crosses the diagonal again near x ≈ 6.31.
        let ray = RayCurve::from_angle(c64(0.0, 0.0), 1.26);
        let out = stabilize_along_curve(EntireMap::fatou_real(1.0), &ray, 3.3).unwrap();
        assert_eq!(out.branch, StabilizeBranch::Secondary);
        assert_eq!(out.record.stability, Stability::Attracting);
        let x0 = out.record.location.norm();
        assert!((6.2..6.45).contains(&x0), "crossing at {x0}");
        assert!((0.75..0.85).contains(&out.record.multiplier.norm()));
        // renormalization pins the fixed point exactly
        assert!(out.record.residual < 1e-12 * (1.0 + x0));
    }

    #[test]
    fn no_secondary_crossing_reported() {
        // Leftward ray: |f| grows like e^{x}, so g(x) runs away above the
        // diagonal and no further crossing exists.
        let ray = RayCurve::from_angle(c64(0.0, 0.0), std::f64::consts::PI);
        let err = stabilize_along_curve(EntireMap::fatou_real(1.0), &ray, 2.0).unwrap_err();
        assert!(matches!(err, Error::NoSecondaryFixedPoint));
    }
}
