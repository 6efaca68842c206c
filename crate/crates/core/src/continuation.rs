//! Parameter-path tracking of fixed points, escape detection, and horocyclic
//! multiplier diagnostics.
//!
//! The tracker is a secant-predictor / Newton-corrector continuation over a
//! caller-supplied parameter grid. The corrector alone determines each
//! point, so halving the grid step leaves tracked locations unchanged up to
//! the Newton tolerance.

use num_complex::Complex64;

use crate::dynamics::{find_fixed_point, FixedPointRecord, CLASS_TOL};
use crate::error::{Error, Result};
use crate::map::{c64, EntireMap};

type BuilderFn = dyn Fn(f64) -> EntireMap + Send + Sync;
type PartialFn = dyn Fn(f64, Complex64) -> Complex64 + Send + Sync;

/// A one-real-parameter family of entire maps, with an optional closed-form
/// parameter partial `∂f_λ/∂λ`.
pub struct ParamFamily {
    label: String,
    builder: Box<BuilderFn>,
    param_partial: Option<Box<PartialFn>>,
}

impl std::fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamFamily")
            .field("label", &self.label)
            .field("has_partial", &self.param_partial.is_some())
            .finish()
    }
}

impl ParamFamily {
    pub fn new<B>(label: impl Into<String>, builder: B) -> Self
    where
        B: Fn(f64) -> EntireMap + Send + Sync + 'static,
    {
        ParamFamily {
            label: label.into(),
            builder: Box::new(builder),
            param_partial: None,
        }
    }

    /// Attaches a closed-form `∂f_λ/∂λ` evaluator.
    pub fn with_partial<P>(mut self, partial: P) -> Self
    where
        P: Fn(f64, Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.param_partial = Some(Box::new(partial));
        self
    }

    /// `λ ↦ e^{-z} + z + λ`; the parameter partial is identically 1.
    pub fn fatou_family() -> Self {
        ParamFamily::new("fatou", |lam| EntireMap::fatou_real(lam))
            .with_partial(|_, _| c64(1.0, 0.0))
    }

    /// `α ↦ α·(e^{-z} + z + 1)`; the parameter partial is the base map
    /// itself, unbounded in `z`.
    pub fn scaled_fatou_family() -> Self {
        ParamFamily::new("scaled", |alpha| {
            EntireMap::fatou_real(1.0).scaled(c64(alpha, 0.0))
        })
        .with_partial(|_, z| EntireMap::fatou_real(1.0).eval_unchecked(z))
    }

    /// A family constant in the parameter (zero partial); useful as a
    /// degenerate control.
    pub fn constant_family(map: EntireMap) -> Self {
        ParamFamily::new("constant", move |_| map.clone()).with_partial(|_, _| c64(0.0, 0.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The family member at parameter `lam`.
    pub fn build(&self, lam: f64) -> EntireMap {
        (self.builder)(lam)
    }

    /// `∂f_λ/∂λ(z)`: closed form when available, otherwise central finite
    /// differences in the parameter.
    pub fn partial(&self, lam: f64, z: Complex64) -> Complex64 {
        match &self.param_partial {
            Some(p) => p(lam, z),
            None => {
                let h = 1e-6 * (1.0 + lam.abs());
                let plus = self.build(lam + h).eval_unchecked(z);
                let minus = self.build(lam - h).eval_unchecked(z);
                (plus - minus) / (2.0 * h)
            }
        }
    }
}

/// A tracked fixed-point path: one entry per visited grid parameter.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathTrace {
    pub params: Vec<f64>,
    pub locations: Vec<Complex64>,
    pub multipliers: Vec<Complex64>,
    /// `Re(1/(1-ρ))` per entry.
    pub horocyclic_stats: Vec<f64>,
    /// Index of the entry whose location left the escape radius; the trace
    /// stops there.
    pub escaped_at: Option<usize>,
}

impl PathTrace {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    fn push(&mut self, param: f64, rec: &FixedPointRecord) {
        self.params.push(param);
        self.locations.push(rec.location);
        self.multipliers.push(rec.multiplier);
        self.horocyclic_stats
            .push(horocyclic_statistic(rec.multiplier).unwrap_or(f64::INFINITY));
    }
}

/// Continuation controls; the defaults match the library-wide tolerances.
#[derive(Debug, Clone, Copy)]
pub struct TrackOptions {
    /// Newton tolerance (relative to `1 + |z|`).
    pub tol: f64,
    pub max_iter: usize,
    /// Grid-refinement levels attempted near multiplier 1 before giving up.
    pub refine_levels: usize,
    /// Subdivision factor per refinement level.
    pub refine_factor: usize,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            tol: 1e-12,
            max_iter: 60,
            refine_levels: 3,
            refine_factor: 4,
        }
    }
}

/// Tracks a fixed point across `grid`, stopping early when the location
/// escapes past `radius`.
pub fn track_fixed_point(
    family: &ParamFamily,
    grid: &[f64],
    guess: Complex64,
    radius: f64,
) -> Result<PathTrace> {
    track_fixed_point_with(family, grid, guess, radius, &TrackOptions::default())
}

/// [`track_fixed_point`] with explicit solver options.
pub fn track_fixed_point_with(
    family: &ParamFamily,
    grid: &[f64],
    guess: Complex64,
    radius: f64,
    opts: &TrackOptions,
) -> Result<PathTrace> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    if grid.len() > 1 {
        let increasing = grid[1] > grid[0];
        for w in grid.windows(2) {
            if (increasing && w[1] <= w[0]) || (!increasing && w[1] >= w[0]) {
                return Err(Error::InvalidParameter(
                    "parameter grid must be strictly monotone".into(),
                ));
            }
        }
    }

    let mut trace = PathTrace::default();
    let mut previous: Option<(f64, Complex64)> = None;
    let mut before_previous: Option<(f64, Complex64)> = None;

    for (i, &lam) in grid.iter().enumerate() {
        let prediction = match (previous, before_previous) {
            (Some((lp, zp)), Some((lpp, zpp))) => zp + (zp - zpp) * ((lam - lp) / (lp - lpp)),
            (Some((_, zp)), None) => zp,
            _ => guess,
        };
        let rec = match correct_with_refinement(family, lam, prediction, previous, 0, opts) {
            Ok(rec) => rec,
            Err(CorrectFailure::Newton) => {
                return Err(Error::BranchLost {
                    at_param: lam,
                    partial: trace,
                })
            }
            Err(CorrectFailure::Fold) => {
                return Err(Error::FoldSuspected {
                    at_param: lam,
                    partial: trace,
                })
            }
        };

        trace.push(lam, &rec);
        if rec.location.norm() > radius {
            trace.escaped_at = Some(i);
            break;
        }
        before_previous = previous;
        previous = Some((lam, rec.location));
    }
    Ok(trace)
}

enum CorrectFailure {
    Newton,
    Fold,
}

/// Newton-corrects at `lam`; a multiplier within `CLASS_TOL` of 1 triggers
/// subdivision of the incoming parameter step before a fold is declared.
fn correct_with_refinement(
    family: &ParamFamily,
    lam: f64,
    prediction: Complex64,
    previous: Option<(f64, Complex64)>,
    level: usize,
    opts: &TrackOptions,
) -> std::result::Result<FixedPointRecord, CorrectFailure> {
    let map = family.build(lam);
    let rec = find_fixed_point(&map, prediction, opts.tol, opts.max_iter)
        .map_err(|_| CorrectFailure::Newton)?;
    if (rec.multiplier - c64(1.0, 0.0)).norm() > CLASS_TOL {
        return Ok(rec);
    }
    let Some((lam_prev, z_prev)) = previous else {
        return Err(CorrectFailure::Fold);
    };
    if level >= opts.refine_levels {
        return Err(CorrectFailure::Fold);
    }
    let mut zp = z_prev;
    let mut lp = lam_prev;
    let mut last = None;
    for j in 1..=opts.refine_factor {
        let t = j as f64 / opts.refine_factor as f64;
        let lj = lam_prev + t * (lam - lam_prev);
        let rec_j = correct_with_refinement(family, lj, zp, Some((lp, zp)), level + 1, opts)?;
        zp = rec_j.location;
        lp = lj;
        last = Some(rec_j);
    }
    last.ok_or(CorrectFailure::Fold)
}

/// `Re(1/(1 - rho))`: grows without bound exactly when `rho` approaches 1
/// inside every horodisc tangent at 1.
pub fn horocyclic_statistic(rho: Complex64) -> Result<f64> {
    let denom = c64(1.0, 0.0) - rho;
    if denom.norm() == 0.0 {
        return Err(Error::StatisticUndefinedAtOne);
    }
    Ok((1.0 / denom).re)
}

/// Diagnostic returned by [`is_horocyclic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorocyclicDiagnostic {
    HorocyclicEvidence,
    TangentialEvidence,
    Inconclusive,
}

impl std::fmt::Display for HorocyclicDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HorocyclicDiagnostic::HorocyclicEvidence => write!(f, "horocyclic-evidence"),
            HorocyclicDiagnostic::TangentialEvidence => write!(f, "tangential-evidence"),
            HorocyclicDiagnostic::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Multiplier moduli within this of 1 count as "approaching the circle" for
/// the tangential diagnostic.
const TANGENTIAL_MOD_TOL: f64 = 1e-3;

/// Classifies how the multipliers of a trace approach 1.
///
/// Horocyclic evidence requires the last-quartile statistics to be
/// increasing with median above `threshold`; tangential evidence requires
/// multiplier moduli at 1 while the statistic stays bounded by `threshold`.
pub fn is_horocyclic(trace: &PathTrace, threshold: f64) -> HorocyclicDiagnostic {
    if trace.is_empty() {
        return HorocyclicDiagnostic::Inconclusive;
    }
    let n = trace.len();
    let start = n - (n / 4).max(1);
    let tail = &trace.horocyclic_stats[start..];

    let mut sorted = tail.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    let tail_median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };

    let increasing = tail.windows(2).all(|w| w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs()))
        && tail.last() > tail.first();
    if tail_median > threshold && increasing {
        return HorocyclicDiagnostic::HorocyclicEvidence;
    }

    let moduli_at_one = trace.multipliers[start..]
        .iter()
        .all(|rho| (rho.norm() - 1.0).abs() < TANGENTIAL_MOD_TOL);
    if moduli_at_one && tail_median <= threshold {
        return HorocyclicDiagnostic::TangentialEvidence;
    }
    HorocyclicDiagnostic::Inconclusive
}

/// Checks the multiplier identity for a tracked fixed point at one
/// parameter: the finite-difference derivative of the location must equal
/// `∂f_λ/∂λ(z_λ) / (1 - ρ(z_λ))`. Returns the relative residual.
pub fn multiplier_identity_residual(
    family: &ParamFamily,
    lam: f64,
    fp: &FixedPointRecord,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    if (fp.multiplier - c64(1.0, 0.0)).norm() <= 10.0 * h {
        return Err(Error::InvalidParameter(
            "multiplier too close to 1 for the finite-difference step".into(),
        ));
    }
    let solve = |param: f64| -> Result<Complex64> {
        let map = family.build(param);
        find_fixed_point(&map, fp.location, 1e-13, 80)
            .map(|r| r.location)
            .map_err(|_| Error::IdentityCheckInfeasible)
    };
    let plus = solve(lam + h)?;
    let minus = solve(lam - h)?;
    let lhs = (plus - minus) / (2.0 * h);
    let rhs = family.partial(lam, fp.location) / (c64(1.0, 0.0) - fp.multiplier);
    Ok((lhs - rhs).norm() / (1.0 + rhs.norm()))
}

/// Maximum of `|∂f_λ/∂λ|` over a sample grid; the boundedness hypothesis
/// under which escape of a fixed point forces its multiplier to 1.
pub fn bounded_partial_check(
    family: &ParamFamily,
    sample_z: &[Complex64],
    sample_lam: &[f64],
) -> f64 {
    let mut max = 0.0f64;
    for &lam in sample_lam {
        for &z in sample_z {
            max = max.max(family.partial(lam, z).norm());
        }
    }
    max
}
