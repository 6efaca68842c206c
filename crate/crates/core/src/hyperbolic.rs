//! Hyperbolic metric of the unit disc and density bounds for plane domains.
//!
//! The normalization is curvature −1 with disc density `2/(1 - |z|²)`. For a
//! simply connected domain the density at a point is pinned to the band
//! `[1/(2δ), 2/δ]` by the Koebe distortion theorem, where δ is the distance
//! to the boundary; that band is what the distance estimators in
//! [`crate::domain`] integrate.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hyperbolic density `2/(1 - |z|²)` of the unit disc at `z`.
pub fn disc_density(z: Complex64) -> Result<f64> {
    let n2 = z.norm_sqr();
    if n2 >= 1.0 {
        return Err(Error::OutsideUnitDisc);
    }
    Ok(2.0 / (1.0 - n2))
}

/// Hyperbolic distance between two points of the unit disc.
///
/// Computed as `2 atanh |(z - w)/(1 - z̄w)|`, which agrees with quadrature of
/// [`disc_density`] along the geodesic.
pub fn disc_distance(z: Complex64, w: Complex64) -> Result<f64> {
    if z.norm_sqr() >= 1.0 || w.norm_sqr() >= 1.0 {
        return Err(Error::OutsideUnitDisc);
    }
    let m = ((z - w) / (1.0 - z.conj() * w)).norm();
    // 2 atanh m = ln((1+m)/(1-m)), stable via ln_1p
    Ok((2.0 * m / (1.0 - m)).ln_1p())
}

/// Two-sided bound on the hyperbolic density of a simply connected domain at
/// a point with boundary distance δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBand {
    pub lower: f64,
    pub upper: f64,
}

/// Koebe-type band `[1/(2δ), 2/δ]` for boundary distance `delta`.
pub fn density_band(delta: f64) -> Result<DensityBand> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidBoundaryDistance);
    }
    Ok(DensityBand {
        lower: 0.5 / delta,
        upper: 2.0 / delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::c64;
    use approx::assert_relative_eq;

    #[test]
    fn density_values() {
        assert_eq!(disc_density(c64(0.0, 0.0)).unwrap(), 2.0);
        assert_relative_eq!(disc_density(c64(0.5, 0.0)).unwrap(), 8.0 / 3.0);
        // rotational symmetry
        assert_relative_eq!(disc_density(c64(0.0, 0.5)).unwrap(), 8.0 / 3.0);
        assert!(matches!(
            disc_density(c64(1.0, 0.0)),
            Err(Error::OutsideUnitDisc)
        ));
    }

    #[test]
    fn distance_values() {
        assert_eq!(disc_distance(c64(0.0, 0.0), c64(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(disc_distance(c64(0.3, 0.0), c64(0.3, 0.0)).unwrap(), 0.0);
        assert_relative_eq!(
            disc_distance(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap(),
            3.0f64.ln(),
            epsilon = 1e-14
        );
        assert!(disc_distance(c64(0.0, 0.0), c64(1.0, 0.0)).is_err());
    }

    /// Independent route: composite Simpson quadrature of the density along
    /// the radial geodesic (the pair is first moved by a disc automorphism so
    /// the geodesic is a radius).
    fn distance_by_quadrature(z: Complex64, w: Complex64) -> f64 {
        let m = ((z - w) / (1.0 - z.conj() * w)).norm();
        let n = 4000;
        let h = m / n as f64;
        let g = |t: f64| 2.0 / (1.0 - t * t);
        let mut acc = g(0.0) + g(m);
        for k in 1..n {
            let t = k as f64 * h;
            acc += if k % 2 == 1 { 4.0 * g(t) } else { 2.0 * g(t) };
        }
        acc * h / 3.0
    }

    #[test]
    fn distance_agrees_with_quadrature() {
        let pairs = [
            (c64(0.0, 0.0), c64(0.5, 0.0)),
            (c64(0.3, -0.2), c64(-0.1, 0.6)),
            (c64(0.7, 0.1), c64(0.65, 0.12)),
        ];
        for (z, w) in pairs {
            let d = disc_distance(z, w).unwrap();
            let q = distance_by_quadrature(z, w);
            assert!((d - q).abs() < 1e-9, "d={d} q={q}");
        }
    }

    #[test]
    fn band_values() {
        let b = density_band(1.0).unwrap();
        assert_eq!((b.lower, b.upper), (0.5, 2.0));
        let b = density_band(0.5).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 4.0));
        // at the disc centre, δ = 1 and the density 2 sits at the upper end
        let rho = disc_density(c64(0.0, 0.0)).unwrap();
        assert!(b.lower <= rho && rho <= 2.0 * 2.0);
        assert!(matches!(
            density_band(0.0),
            Err(Error::InvalidBoundaryDistance)
        ));
    }
}
