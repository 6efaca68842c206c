//! Models of the entire maps in scope, with evaluation and exact analytic
//! derivatives.
//!
//! The base family is `z ↦ e^{-z} + z + c`; everything else is built from it
//! by complex scaling, scalar rescaling, and affine damping. Those four kinds
//! are enough to express the perturbation constructions used elsewhere in the
//! crate: rescaling a map so a chosen ray point becomes fixed, renormalizing
//! at a point of equal modulus, and damping a neutral fixed point into an
//! attracting one.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Shorthand constructor for `Complex64`.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Any evaluation whose modulus exceeds this reports [`Error::NumericOverflow`];
/// callers interpret that as escape to infinity.
pub const OVERFLOW_LIMIT: f64 = 1e300;

/// An entire function assembled from the built-in kinds.
///
/// Every instance supports closed-form evaluation and an exact analytic
/// derivative. Instances are immutable after construction and all operations
/// are pure, so values can be shared freely across worker threads.
#[derive(Debug, Clone, PartialEq)]
pub enum EntireMap {
    /// `z ↦ e^{-z} + z + c`. For `c = 1` this is Fatou's function, whose
    /// Fatou set is a single invariant Baker domain.
    Fatou { c: Complex64 },
    /// `z ↦ alpha · base(z)`: the transversal family through `base`.
    Scaled { base: Box<EntireMap>, alpha: Complex64 },
    /// `z ↦ (1 - eps)(base(z) - anchor) + anchor`: fixes `anchor` whenever
    /// `base` does, shrinking the multiplier there by `1 - eps`.
    AffineDamped {
        base: Box<EntireMap>,
        anchor: Complex64,
        eps: f64,
    },
    /// `z ↦ coeff · base(z)`: the output kind of the rescaling operations.
    ScalarMultiple { base: Box<EntireMap>, coeff: Complex64 },
}

impl EntireMap {
    /// The map `z ↦ e^{-z} + z + c`.
    pub fn fatou(c: Complex64) -> Self {
        EntireMap::Fatou { c }
    }

    /// The map `z ↦ e^{-z} + z + c` with real `c`.
    pub fn fatou_real(c: f64) -> Self {
        EntireMap::Fatou { c: c64(c, 0.0) }
    }

    /// Wraps `self` in the scaling family member `alpha · self`.
    pub fn scaled(self, alpha: Complex64) -> Self {
        EntireMap::Scaled {
            base: Box::new(self),
            alpha,
        }
    }

    /// Raw evaluation; the result may be non-finite when intermediate
    /// quantities overflow `f64`.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        match self {
            EntireMap::Fatou { c } => (-z).exp() + z + c,
            EntireMap::Scaled { base, alpha } => alpha * base.eval_unchecked(z),
            EntireMap::AffineDamped { base, anchor, eps } => {
                (1.0 - eps) * (base.eval_unchecked(z) - anchor) + anchor
            }
            EntireMap::ScalarMultiple { base, coeff } => coeff * base.eval_unchecked(z),
        }
    }

    /// Evaluates `f(z)`, reporting overflow past [`OVERFLOW_LIMIT`].
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        checked(self.eval_unchecked(z))
    }

    /// Raw analytic derivative; may be non-finite on overflow.
    pub fn deriv_unchecked(&self, z: Complex64) -> Complex64 {
        match self {
            EntireMap::Fatou { .. } => 1.0 - (-z).exp(),
            EntireMap::Scaled { base, alpha } => alpha * base.deriv_unchecked(z),
            EntireMap::AffineDamped { base, eps, .. } => (1.0 - eps) * base.deriv_unchecked(z),
            EntireMap::ScalarMultiple { base, coeff } => coeff * base.deriv_unchecked(z),
        }
    }

    /// Evaluates `f'(z)` by the chain rule per kind, reporting overflow.
    pub fn deriv(&self, z: Complex64) -> Result<Complex64> {
        checked(self.deriv_unchecked(z))
    }
}

fn checked(w: Complex64) -> Result<Complex64> {
    if w.re.is_finite() && w.im.is_finite() && w.norm_sqr() <= OVERFLOW_LIMIT * OVERFLOW_LIMIT {
        Ok(w)
    } else {
        Err(Error::NumericOverflow)
    }
}

/// A ray `γ(s) = anchor + s · direction`, `s ≥ 0`, with `|direction| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayCurve {
    anchor: Complex64,
    direction: Complex64,
}

impl RayCurve {
    /// Builds a ray, normalizing `direction` to unit modulus.
    pub fn new(anchor: Complex64, direction: Complex64) -> Result<Self> {
        let n = direction.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidParameter(
                "ray direction must be nonzero and finite".into(),
            ));
        }
        Ok(RayCurve {
            anchor,
            direction: direction / n,
        })
    }

    /// Ray from `anchor` in direction `e^{i·theta}`.
    pub fn from_angle(anchor: Complex64, theta: f64) -> Self {
        RayCurve {
            anchor,
            direction: c64(theta.cos(), theta.sin()),
        }
    }

    /// The positive real axis anchored at the origin. Forward-invariant for
    /// `e^{-z} + z + 1` since `f(x) = x + 1 + e^{-x} > x`, and it avoids the
    /// origin for `s > 0`.
    pub fn positive_real_axis() -> Self {
        RayCurve {
            anchor: c64(0.0, 0.0),
            direction: c64(1.0, 0.0),
        }
    }

    /// γ(s).
    pub fn point(&self, s: f64) -> Complex64 {
        self.anchor + s * self.direction
    }

    pub fn anchor(&self) -> Complex64 {
        self.anchor
    }

    pub fn direction(&self) -> Complex64 {
        self.direction
    }
}

/// Rescales `base` by `γ(s)/base(γ(s))` so that `γ(s)` becomes an exactly
/// fixed point of the returned [`EntireMap::ScalarMultiple`].
///
/// Along a forward-invariant ray of a Baker domain the coefficient tends to
/// one in modulus as `s → ∞`, so the rescaled maps converge back to `base`.
pub fn rescale_to_fix(base: EntireMap, ray: &RayCurve, s: f64) -> Result<EntireMap> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter("rescale requires s > 0".into()));
    }
    let anchor = ray.point(s);
    let value = base.eval(anchor)?;
    if value.norm() == 0.0 {
        return Err(Error::DivisionByZeroAtAnchor);
    }
    Ok(EntireMap::ScalarMultiple {
        base: Box::new(base),
        coeff: anchor / value,
    })
}

/// Rescales `h` by `w/h(w)`, making `w` an exactly fixed point; in particular
/// `|h̃(w)| = |w|`. Useful when `w` already satisfies `|h(w)| = |w|`, in which
/// case the coefficient has unit modulus and the rescale is a rotation.
pub fn renormalize_at(h: EntireMap, w: Complex64) -> Result<EntireMap> {
    let value = h.eval(w)?;
    if value.norm() == 0.0 {
        return Err(Error::DivisionByZeroAtAnchor);
    }
    Ok(EntireMap::ScalarMultiple {
        base: Box::new(h),
        coeff: w / value,
    })
}

/// Residual tolerance for the fixed-anchor precondition of [`damp`].
pub const DAMP_ANCHOR_TOL: f64 = 1e-9;

/// Contracts `h` affinely about its fixed point `w`: the returned map fixes
/// `w` with multiplier `(1 - eps) · h'(w)`.
pub fn damp(h: EntireMap, w: Complex64, eps: f64) -> Result<EntireMap> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("damp requires 0 < eps < 1".into()));
    }
    let residual = (h.eval(w)? - w).norm();
    if residual >= DAMP_ANCHOR_TOL * (1.0 + w.norm()) {
        return Err(Error::AnchorNotFixed { residual });
    }
    Ok(EntireMap::AffineDamped {
        base: Box::new(h),
        anchor: w,
        eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fatou_eval_closed_forms() {
        let f = EntireMap::fatou_real(1.0);
        // e^0 + 0 + 1
        assert_eq!(f.eval(c64(0.0, 0.0)).unwrap(), c64(2.0, 0.0));
        // e^{-iπ} = -1, so iπ is fixed
        let z = c64(0.0, std::f64::consts::PI);
        let w = f.eval(z).unwrap();
        assert_relative_eq!(w.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.im, std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn scaled_eval_is_multiple() {
        let f = EntireMap::fatou_real(1.0).scaled(c64(0.5, 0.0));
        assert_eq!(f.eval(c64(0.0, 0.0)).unwrap(), c64(1.0, 0.0));
    }

    #[test]
    fn fatou_deriv_closed_forms() {
        let f = EntireMap::fatou_real(1.0);
        assert_eq!(f.deriv(c64(0.0, 0.0)).unwrap(), c64(0.0, 0.0));
        let d10 = f.deriv(c64(10.0, 0.0)).unwrap();
        assert_relative_eq!(d10.re, 1.0 - (-10.0f64).exp(), epsilon = 1e-15);
        let dpi = f.deriv(c64(0.0, std::f64::consts::PI)).unwrap();
        assert_relative_eq!(dpi.re, 2.0, epsilon = 1e-15);
        assert_relative_eq!(dpi.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn eval_overflow_reported() {
        let f = EntireMap::fatou_real(1.0);
        assert!(matches!(
            f.eval(c64(-800.0, 0.0)),
            Err(Error::NumericOverflow)
        ));
    }

    #[test]
    fn rescale_fixes_ray_point() {
        let ray = RayCurve::positive_real_axis();
        let h = rescale_to_fix(EntireMap::fatou_real(1.0), &ray, 10.0).unwrap();
        let coeff = match &h {
            EntireMap::ScalarMultiple { coeff, .. } => *coeff,
            _ => panic!("expected scalar multiple"),
        };
        // 10 / (e^{-10} + 11), by direct arithmetic
        let expected = 10.0 / ((-10.0f64).exp() + 11.0);
        assert_relative_eq!(coeff.re, expected, epsilon = 1e-15);
        assert_eq!(coeff.im, 0.0);
        let fixed = h.eval(c64(10.0, 0.0)).unwrap();
        assert!((fixed - c64(10.0, 0.0)).norm() < 1e-12 * 11.0);
        // multiplier there: coeff · (1 - e^{-10})
        let rho = h.deriv(c64(10.0, 0.0)).unwrap();
        assert_relative_eq!(rho.re, expected * (1.0 - (-10.0f64).exp()), epsilon = 1e-15);
    }

    #[test]
    fn rescale_coefficient_tends_to_unit_modulus() {
        let ray = RayCurve::positive_real_axis();
        let h = rescale_to_fix(EntireMap::fatou_real(1.0), &ray, 100.0).unwrap();
        let rho = h.deriv(c64(100.0, 0.0)).unwrap();
        assert!((1.0 - rho.norm()).abs() <= 2.0 / 100.0);
        assert_relative_eq!(rho.norm(), 100.0 / 101.0, epsilon = 1e-6);
    }

    #[test]
    fn rescale_rejects_zero_anchor_value() {
        // e^{-z} + z - 2 vanishes at its own fixed-point equation only for
        // complex z, but a scalar multiple with coeff 0 gives a clean zero.
        let zeroed = EntireMap::fatou_real(1.0).scaled(c64(0.0, 0.0));
        let ray = RayCurve::positive_real_axis();
        assert!(matches!(
            rescale_to_fix(zeroed, &ray, 1.0),
            Err(Error::DivisionByZeroAtAnchor)
        ));
    }

    #[test]
    fn renormalize_matches_rescale_at_fixed_point() {
        // When h(w) = w the renormalizing coefficient is exactly 1.
        let ray = RayCurve::positive_real_axis();
        let h = rescale_to_fix(EntireMap::fatou_real(1.0), &ray, 10.0).unwrap();
        let h2 = renormalize_at(h.clone(), c64(10.0, 0.0)).unwrap();
        let coeff = match &h2 {
            EntireMap::ScalarMultiple { coeff, .. } => *coeff,
            _ => panic!(),
        };
        assert!((coeff - c64(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn renormalize_pins_modulus() {
        let ray = RayCurve::positive_real_axis();
        let h = rescale_to_fix(EntireMap::fatou_real(1.0), &ray, 10.0).unwrap();
        let h2 = renormalize_at(h, c64(12.0, 0.0)).unwrap();
        let w = h2.eval(c64(12.0, 0.0)).unwrap();
        assert_relative_eq!(w.norm(), 12.0, epsilon = 1e-12);
    }

    #[test]
    fn damp_scales_multiplier() {
        let ray = RayCurve::positive_real_axis();
        let h = rescale_to_fix(EntireMap::fatou_real(1.0), &ray, 10.0).unwrap();
        let rho = h.deriv(c64(10.0, 0.0)).unwrap();
        let d = damp(h, c64(10.0, 0.0), 0.01).unwrap();
        let dr = d.deriv(c64(10.0, 0.0)).unwrap();
        assert_relative_eq!(dr.norm(), 0.99 * rho.norm(), epsilon = 1e-14);
        // the anchor stays fixed
        let w = d.eval(c64(10.0, 0.0)).unwrap();
        assert!((w - c64(10.0, 0.0)).norm() <= 1e-10 * 11.0);
    }

    #[test]
    fn damp_rejects_eps_boundary_and_loose_anchor() {
        let ray = RayCurve::positive_real_axis();
        let h = rescale_to_fix(EntireMap::fatou_real(1.0), &ray, 10.0).unwrap();
        assert!(damp(h.clone(), c64(10.0, 0.0), 0.0).is_err());
        assert!(damp(h.clone(), c64(10.0, 0.0), 1.0).is_err());
        assert!(matches!(
            damp(h, c64(11.0, 0.0), 0.1),
            Err(Error::AnchorNotFixed { .. })
        ));
    }

    #[test]
    fn ray_direction_normalized() {
        let ray = RayCurve::new(c64(1.0, 1.0), c64(3.0, 4.0)).unwrap();
        assert_relative_eq!(ray.direction().norm(), 1.0, epsilon = 1e-15);
        assert!(RayCurve::new(c64(0.0, 0.0), c64(0.0, 0.0)).is_err());
    }
}
