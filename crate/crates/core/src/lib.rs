//! Numerical toolkit for attracting fixed points escaping to infinity and
//! the doubly parabolic Baker domains they leave behind.
//!
//! The pieces fit together like this:
//!
//! * [`map`] — evaluatable models of the entire maps in scope (the
//!   `e^{-z} + z + c` family and the scaling / rescaling / damping
//!   constructions on top of it), with exact analytic derivatives.
//! * [`hyperbolic`] — the disc metric and Koebe-type density bands.
//! * [`domain`] — membership oracles for Fatou components plus boundary- and
//!   hyperbolic-distance estimators.
//! * [`dynamics`] — orbits, Newton fixed points, multipliers, Koenigs
//!   coordinates, invariant curves.
//! * [`classify`] — the step-distance Baker-domain type diagnostic.
//! * [`stabilize`] — rescale / renormalize / damp pipeline producing
//!   attracting fixed points on a ray.
//! * [`continuation`] — parameter-path tracking, escape detection, and the
//!   horocyclic multiplier diagnostics.
//! * [`render`] — deterministic escape-time rasters.
//!
//! Everything is pure and immutable after construction; the only shared
//! mutable state is the boundary-distance cache inside [`DomainOracle`],
//! which is internally synchronized.

pub mod classify;
pub mod continuation;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod hyperbolic;
pub mod map;
pub mod render;
pub mod stabilize;

pub use classify::{
    step_distance_sequence, step_distance_sequence_with, ClassifyOptions, StepDistanceSequence,
    Verdict,
};
pub use continuation::{
    bounded_partial_check, horocyclic_statistic, is_horocyclic, multiplier_identity_residual,
    track_fixed_point, track_fixed_point_with, HorocyclicDiagnostic, ParamFamily, PathTrace,
    TrackOptions,
};
pub use domain::{
    boundary_distance, segment_distance_upper, segment_distance_upper_with, DistanceOptions,
    DomainOracle, Membership, RightEscapeParams,
};
pub use dynamics::{
    cycle_multiplier, derivative_along_curve, find_fixed_point, invariant_curve, iterate, koenigs,
    koenigs_with_deriv, FixedPointRecord, OrbitTrace, Stability, CLASS_TOL, KOENIGS_MAX_STEPS,
};
pub use error::{Error, Result};
pub use hyperbolic::{density_band, disc_density, disc_distance, DensityBand};
pub use map::{
    c64, damp, renormalize_at, rescale_to_fix, EntireMap, RayCurve, OVERFLOW_LIMIT,
};
pub use render::{render, PixelClass, RenderResult, RenderWindow};
pub use stabilize::{stabilize_along_curve, StabilizeBranch, Stabilized};

pub use num_complex::Complex64;
