use std::fmt::Write as _;
use std::path::PathBuf;

use baker_lab_core::{
    c64, disc_density, disc_distance, find_fixed_point, invariant_curve, koenigs,
    multiplier_identity_residual, stabilize_along_curve, Complex64, EntireMap, ParamFamily,
    RayCurve, StabilizeBranch, KOENIGS_MAX_STEPS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::write_output;
use crate::config::Config;
use crate::CliError;

const KEYS: [&str; 7] = [
    "command",
    "out",
    "seed",
    "pairs",
    "multiplier_tol",
    "koenigs_tol",
    "quad_tol",
];

struct Report {
    lines: Vec<String>,
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        self.lines.push(format!(
            "{} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        ));
    }
}

/// Runs the whole property battery and writes a pass/fail report. Exits
/// nonzero when any check fails.
pub fn verify(cfg: &Config) -> Result<Option<String>, CliError> {
    cfg.validate_keys(&KEYS)?;
    let seed = cfg.get_u64("seed", 42)?;
    let pairs = cfg.get_usize("pairs", 1000)?;
    let multiplier_tol = cfg.get_f64("multiplier_tol", 1e-6)?;
    let koenigs_tol = cfg.get_f64("koenigs_tol", 1e-8)?;
    let quad_tol = cfg.get_f64("quad_tol", 1e-9)?;
    let out = PathBuf::from(cfg.get_str("out", "baker-verify.txt"));

    let mut report = Report {
        lines: vec![
            "baker-lab verify report".into(),
            format!("seed = {seed}"),
            format!("pairs = {pairs}"),
        ],
        failures: 0,
    };

    check_harnack(&mut report, seed, pairs);
    check_displacement(&mut report, seed, pairs);
    check_koebe_band(&mut report, seed, pairs);
    check_disc_quadrature(&mut report, quad_tol);
    check_koenigs(&mut report, koenigs_tol);
    check_multiplier_identity(&mut report, multiplier_tol);
    check_derivative_limit(&mut report);
    check_perturbation(&mut report);

    let total = report.lines.len() - 3;
    report.lines.push(format!(
        "result: {}/{} checks passed",
        total - report.failures,
        total
    ));

    let mut text = String::new();
    for line in &report.lines {
        let _ = writeln!(text, "{line}");
    }
    write_output(&out, text.as_bytes())?;

    if report.failures > 0 {
        Err(CliError::VerifyFailed(report.failures))
    } else {
        Ok(Some(format!("all {total} checks passed")))
    }
}

fn random_disc_point(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() < 0.995 {
            return z;
        }
    }
}

fn check_harnack(report: &mut Report, seed: u64, pairs: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let z = random_disc_point(&mut rng);
        let w = random_disc_point(&mut rng);
        let d = disc_distance(z, w).unwrap();
        let ratio = disc_density(z).unwrap() / disc_density(w).unwrap();
        // violation as a multiplicative excess over the two-sided bound
        let excess = (ratio / (2.0 * d).exp()).max((-2.0 * d).exp() / ratio);
        worst = worst.max(excess);
    }
    report.check(
        "harnack-inequality",
        worst <= 1.0 + 1e-12,
        format!("{pairs} pairs, worst bound ratio {worst:.12}"),
    );
}

fn check_displacement(report: &mut Report, seed: u64, pairs: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let z = random_disc_point(&mut rng);
        let w = random_disc_point(&mut rng);
        let d = disc_distance(z, w).unwrap();
        let bound = 2.0 * d * (2.0 * d).exp() * (1.0 - z.norm());
        if bound > 0.0 {
            worst = worst.max((z - w).norm() / bound);
        }
    }
    report.check(
        "displacement-bound",
        worst <= 1.0 + 1e-12,
        format!("{pairs} pairs, worst |z-w|/bound {worst:.12}"),
    );
}

fn check_koebe_band(report: &mut Report, seed: u64, pairs: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..pairs {
        let z = random_disc_point(&mut rng);
        let product = disc_density(z).unwrap() * (1.0 - z.norm());
        lo = lo.min(product);
        hi = hi.max(product);
    }
    report.check(
        "koebe-band",
        lo >= 0.5 && hi <= 2.0 + 1e-12,
        format!("{pairs} samples, density·δ in [{lo:.6}, {hi:.6}] ⊂ [0.5, 2]"),
    );
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

fn check_disc_quadrature(report: &mut Report, tol: f64) {
    let d = disc_distance(c64(0.0, 0.0), c64(0.5, 0.0)).unwrap();
    let q = adaptive_simpson(&|t| 2.0 / (1.0 - t * t), 0.0, 0.5, 1e-13, 40);
    let err = (d - q).abs();
    report.check(
        "disc-distance-quadrature",
        err <= tol && (d - 3.0f64.ln()).abs() <= 1e-12,
        format!("disc_distance(0, 0.5) = {d:.15}, quadrature differs by {err:.3e} (tol {tol:.1e})"),
    );
}

fn check_koenigs(report: &mut Report, tol: f64) {
    let map = EntireMap::fatou_real(1.0).scaled(c64(0.9, 0.0));
    let fp = match find_fixed_point(&map, c64(9.0, 0.0), 1e-13, 80) {
        Ok(fp) => fp,
        Err(e) => {
            report.check("koenigs-relation", false, format!("fixed point failed: {e}"));
            return;
        }
    };
    let mut worst = 0.0f64;
    let mut samples = 0;
    for i in 0..5 {
        let r = 0.5 * (i + 1) as f64;
        for j in 0..20 {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / 20.0;
            let z = fp.location + r * c64(theta.cos(), theta.sin());
            let phi = koenigs(&map, &fp, z, KOENIGS_MAX_STEPS);
            let phi_f = map
                .eval(z)
                .and_then(|fz| koenigs(&map, &fp, fz, KOENIGS_MAX_STEPS));
            match (phi, phi_f) {
                (Ok(p), Ok(pf)) => {
                    worst = worst.max((pf - fp.multiplier * p).norm());
                    samples += 1;
                }
                _ => {
                    report.check("koenigs-relation", false, format!("sample {z} failed"));
                    return;
                }
            }
        }
    }
    // forward-image deviation of the traced invariant curve
    let seed_point = fp.location + c64(0.0, 2.0);
    let curve = match invariant_curve(&map, &fp, seed_point, 64) {
        Ok(c) => c,
        Err(e) => {
            report.check("koenigs-relation", false, format!("curve stalled: {e}"));
            return;
        }
    };
    let mut curve_dev = 0.0f64;
    for &z in &curve[..curve.len() - 1] {
        let fz = map.eval(z).unwrap();
        curve_dev = curve_dev.max(polyline_distance(&curve, fz));
    }
    report.check(
        "koenigs-relation",
        worst < tol && curve_dev < 1e-3,
        format!(
            "max residual {worst:.3e} at {samples} basin samples (tol {tol:.1e}); \
             curve forward-image deviation {curve_dev:.3e} (tol 1e-3)"
        ),
    );
}

fn polyline_distance(poly: &[Complex64], p: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for seg in poly.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let ab = b - a;
        let denom = ab.norm_sqr();
        let t = if denom == 0.0 {
            0.0
        } else {
            (((p - a).conj() * ab).re / denom).clamp(0.0, 1.0)
        };
        best = best.min((a + t * ab - p).norm());
    }
    best
}

fn check_multiplier_identity(report: &mut Report, tol: f64) {
    let family = ParamFamily::fatou_family();
    let mut detail = String::new();
    let mut pass = true;
    for (lam, factor) in [(0.1, 1.0), (0.05, 1.0), (0.01, 10.0)] {
        let guess = c64(-(lam as f64).ln(), -std::f64::consts::PI);
        let outcome = find_fixed_point(&family.build(lam), guess, 1e-13, 60)
            .map_err(|e| e.to_string())
            .and_then(|fp| {
                multiplier_identity_residual(&family, lam, &fp, 1e-5 * (1.0 + lam))
                    .map_err(|e| e.to_string())
            });
        match outcome {
            Ok(res) => {
                let bound = tol * factor;
                if res > bound {
                    pass = false;
                }
                let _ = write!(detail, "residual({lam}) = {res:.3e} (tol {bound:.1e}); ");
            }
            Err(e) => {
                pass = false;
                let _ = write!(detail, "λ={lam} failed: {e}; ");
            }
        }
    }
    report.check("multiplier-identity", pass, detail);
}

fn check_derivative_limit(report: &mut Report) {
    let map = EntireMap::fatou_real(1.0);
    let mut pass = true;
    let mut at_ten = 0.0;
    for s in [1.0, 5.0, 10.0, 20.0] {
        let v = (1.0 - map.deriv_unchecked(c64(s, 0.0)).norm()).abs();
        if v > (-s as f64).exp() + 1e-12 {
            pass = false;
        }
        if s == 10.0 {
            at_ten = v;
        }
    }
    report.check(
        "derivative-limit",
        pass,
        format!("|1 - |f'(s)|| <= e^-s at s in {{1,5,10,20}}; |1 - |f'(10)|| = {at_ten:.3e}"),
    );
}

fn check_perturbation(report: &mut Report) {
    let ray = RayCurve::positive_real_axis();
    let mut pass = true;
    let mut detail = String::new();
    for s in [5.0, 10.0, 20.0, 50.0, 100.0] {
        match stabilize_along_curve(EntireMap::fatou_real(1.0), &ray, s) {
            Ok(st) => {
                let abs_rho = st.record.multiplier.norm();
                let stat = baker_lab_core::horocyclic_statistic(st.record.multiplier)
                    .unwrap_or(f64::NAN);
                let ok = st.branch == StabilizeBranch::Direct
                    && st.record.residual < 1e-12 * (1.0 + s)
                    && (1.0 - abs_rho).abs() <= 2.0 / s
                    && stat >= s / 2.0;
                if !ok {
                    pass = false;
                    let _ = write!(detail, "s={s} out of contract; ");
                }
            }
            Err(e) => {
                pass = false;
                let _ = write!(detail, "s={s} failed: {e}; ");
            }
        }
    }
    if detail.is_empty() {
        detail = "s in {5,10,20,50,100}: branch=direct, residual<1e-12(1+s), \
                  |1-|rho||<=2/s, horocyclic stat >= s/2"
            .into();
    }
    report.check("perturbation-pipeline", pass, detail);
}
