//! Seeded random suites for the disc-metric inequalities.

use baker_lab_core::{c64, disc_density, disc_distance, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const PAIRS: usize = 1000;

fn random_disc_point(rng: &mut ChaCha8Rng) -> Complex64 {
    // rejection sampling keeps points strictly inside, away from blowup
    loop {
        let z = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() < 0.995 {
            return z;
        }
    }
}

#[test]
fn harnack_inequality_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..PAIRS {
        let z = random_disc_point(&mut rng);
        let w = random_disc_point(&mut rng);
        let d = disc_distance(z, w).unwrap();
        let ratio = disc_density(z).unwrap() / disc_density(w).unwrap();
        let bound = (2.0 * d).exp();
        assert!(
            ratio <= bound * (1.0 + 1e-12) && ratio >= (1.0 - 1e-12) / bound,
            "harnack violated: ratio={ratio} bound={bound} z={z} w={w}"
        );
    }
}

#[test]
fn displacement_bound_on_random_pairs() {
    // |z - w| <= 2 d e^{2d} δ(z) with δ(z) = 1 - |z| in the (convex) disc
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    for _ in 0..PAIRS {
        let z = random_disc_point(&mut rng);
        let w = random_disc_point(&mut rng);
        let d = disc_distance(z, w).unwrap();
        let delta = 1.0 - z.norm();
        let bound = 2.0 * d * (2.0 * d).exp() * delta;
        assert!(
            (z - w).norm() <= bound * (1.0 + 1e-12),
            "displacement bound violated: |z-w|={} bound={bound}",
            (z - w).norm()
        );
    }
}

#[test]
fn koebe_band_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    for _ in 0..PAIRS {
        let z = random_disc_point(&mut rng);
        let product = disc_density(z).unwrap() * (1.0 - z.norm());
        assert!(
            (0.5..=2.0 + 1e-12).contains(&product),
            "density·δ = {product} outside the Koebe band at {z}"
        );
    }
}

fn simpson_slice(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b))
}

fn adaptive_simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    let whole = simpson_slice(g, a, b);
    let mid = 0.5 * (a + b);
    let left = simpson_slice(g, a, mid);
    let right = simpson_slice(g, mid, b);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive_simpson(g, a, mid, eps / 2.0, depth - 1)
            + adaptive_simpson(g, mid, b, eps / 2.0, depth - 1)
    }
}

#[test]
fn distance_matches_radial_quadrature() {
    // Adaptive Simpson quadrature of the density along the radial geodesic
    // after moving the pair so one end sits at the origin; the integrand
    // steepens near the boundary, hence the adaptivity.
    let quadrature =
        |m: f64| -> f64 { adaptive_simpson(&|t| 2.0 / (1.0 - t * t), 0.0, m, 1e-12, 40) };

    let d = disc_distance(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap();
    assert!((d - quadrature(0.5)).abs() < 1e-9);
    assert!((d - 3.0f64.ln()).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    for _ in 0..50 {
        let z = random_disc_point(&mut rng);
        let w = random_disc_point(&mut rng);
        let m = ((z - w) / (1.0 - z.conj() * w)).norm();
        assert!((disc_distance(z, w).unwrap() - quadrature(m)).abs() < 1e-9);
    }
}
