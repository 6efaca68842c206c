//! Baker-domain type diagnostics from hyperbolic step distances.
//!
//! An invariant Baker domain is doubly parabolic exactly when the hyperbolic
//! distance between consecutive orbit points tends to zero. The classifier
//! estimates those step distances through the Koebe band: quadrature of
//! `2/δ̂` gives an upper bound, a quarter of the same quadrature a lower
//! proxy, and the verdict compares their tails against fixed thresholds.
//! These are diagnostics with a factor-4 slack, not proofs.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::{segment_distance_upper_with, DistanceOptions, DomainOracle, Membership};
use crate::error::{Error, Result};
use crate::map::EntireMap;

/// Classification verdict from the step-distance tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    DoublyParabolicEvidence,
    NotDoublyParabolicEvidence,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::DoublyParabolicEvidence => write!(f, "doubly-parabolic-evidence"),
            Verdict::NotDoublyParabolicEvidence => write!(f, "not-doubly-parabolic-evidence"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Tail-median upper bound below this supports the doubly parabolic verdict.
pub const TAIL_UPPER_THRESHOLD: f64 = 0.2;
/// Required decrease from the first-quartile median to the tail median.
pub const DECREASE_FACTOR: f64 = 2.0;
/// Lower-bound proxy above this on the whole tail rejects doubly parabolic.
pub const LOWER_PROXY_THRESHOLD: f64 = 0.05;

/// Per-iterate hyperbolic step-distance bounds along an orbit.
///
/// `upper[k]` bounds `d_U(f^{k+1}(z), f^k(z))` from above; `lower[k]` is the
/// Koebe lower proxy (the same quadrature of `1/(2δ̂)`, i.e. `upper[k]/4`).
/// `None` marks a step whose segment estimate failed even through the
/// polyline fallback; any such step makes the verdict inconclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistanceSequence {
    pub upper: Vec<Option<f64>>,
    pub lower: Vec<Option<f64>>,
    pub verdict: Verdict,
}

impl StepDistanceSequence {
    /// Median of the last-quartile upper bounds, when all are present.
    pub fn tail_median_upper(&self) -> Option<f64> {
        let values: Option<Vec<f64>> = self.upper.iter().copied().collect();
        let values = values?;
        if values.is_empty() {
            return None;
        }
        let tail = &values[tail_start(values.len())..];
        Some(median(tail))
    }
}

/// Sampling knobs for [`step_distance_sequence_with`].
///
/// The defaults trade the 64-step quadrature of the generic segment bound
/// for a 16-step one: orbit segments sit deep inside the domain where the
/// integrand is smooth, and the classifier evaluates thousands of
/// boundary-distance queries.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub rays: usize,
    pub quad_steps: usize,
    /// Bisection tolerance relative to `1 + |z|` per query point.
    pub tol_rel: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            rays: 64,
            quad_steps: 16,
            tol_rel: 1e-3,
        }
    }
}

/// Step-distance classifier with default sampling options.
pub fn step_distance_sequence(
    map: &EntireMap,
    z0: Complex64,
    oracle: &DomainOracle,
    n: usize,
) -> Result<StepDistanceSequence> {
    step_distance_sequence_with(map, z0, oracle, n, &ClassifyOptions::default())
}

/// Computes `n` per-iterate step-distance bounds from `z0` and classifies
/// the tail.
///
/// Segments whose straight chord exits the domain are re-routed through a
/// bent two-leg polyline; persistent failure marks the entry absent and the
/// verdict inconclusive.
pub fn step_distance_sequence_with(
    map: &EntireMap,
    z0: Complex64,
    oracle: &DomainOracle,
    n: usize,
    opts: &ClassifyOptions,
) -> Result<StepDistanceSequence> {
    if n < 10 {
        return Err(Error::InvalidParameter(
            "step-distance classification needs n >= 10".into(),
        ));
    }
    if oracle.membership(z0) != Membership::Inside {
        return Err(Error::QueryOutsideDomain);
    }

    let orbit = crate::dynamics::iterate(map, z0, n, crate::map::OVERFLOW_LIMIT);
    let dist_opts = DistanceOptions {
        rays: opts.rays,
        tol_rel: opts.tol_rel,
    };

    let segments: Vec<(Complex64, Complex64)> = orbit
        .points
        .windows(2)
        .map(|w| (w[0], w[1]))
        .collect();
    let mut upper: Vec<Option<f64>> = segments
        .par_iter()
        .map(|&(a, b)| segment_bound_with_fallback(oracle, a, b, opts.quad_steps, &dist_opts))
        .collect();
    // an orbit truncated by overflow leaves the remaining steps absent
    upper.resize(n, None);

    let lower: Vec<Option<f64>> = upper.iter().map(|u| u.map(|v| v / 4.0)).collect();
    let verdict = classify_tail(&upper, &lower);
    Ok(StepDistanceSequence {
        upper,
        lower,
        verdict,
    })
}

fn segment_bound_with_fallback(
    oracle: &DomainOracle,
    a: Complex64,
    b: Complex64,
    steps: usize,
    opts: &DistanceOptions,
) -> Option<f64> {
    match segment_distance_upper_with(oracle, a, b, steps, opts) {
        Ok(v) => Some(v),
        Err(Error::SegmentExitsDomain) => {
            // bend the chord through sideways waypoints at increasing offsets
            let mid = 0.5 * (a + b);
            let normal = (b - a) * Complex64::new(0.0, 1.0);
            for scale in [0.25, -0.25, 0.5, -0.5, 1.0, -1.0] {
                let waypoint = mid + scale * normal;
                let first = segment_distance_upper_with(oracle, a, waypoint, steps, opts);
                let second = segment_distance_upper_with(oracle, waypoint, b, steps, opts);
                if let (Ok(x), Ok(y)) = (first, second) {
                    return Some(x + y);
                }
            }
            None
        }
        Err(_) => None,
    }
}

fn tail_start(len: usize) -> usize {
    len - (len / 4).max(1)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

fn classify_tail(upper: &[Option<f64>], lower: &[Option<f64>]) -> Verdict {
    let present: Option<Vec<f64>> = upper.iter().copied().collect();
    let Some(upper_values) = present else {
        return Verdict::Inconclusive;
    };
    if upper_values.is_empty() {
        return Verdict::Inconclusive;
    }
    let start = tail_start(upper_values.len());
    let tail = &upper_values[start..];
    let head = &upper_values[..(upper_values.len() / 4).max(1)];
    let tail_median = median(tail);
    let head_median = median(head);

    if tail_median < TAIL_UPPER_THRESHOLD && head_median >= DECREASE_FACTOR * tail_median {
        return Verdict::DoublyParabolicEvidence;
    }
    let lower_tail: Vec<f64> = lower[start..].iter().map(|v| v.unwrap()).collect();
    if lower_tail.iter().all(|&v| v > LOWER_PROXY_THRESHOLD) {
        return Verdict::NotDoublyParabolicEvidence;
    }
    Verdict::Inconclusive
}
