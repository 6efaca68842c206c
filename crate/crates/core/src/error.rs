use num_complex::Complex64;

use crate::continuation::PathTrace;

/// Errors shared by the whole library.
///
/// Solver-type failures (`BranchLost`, `CurveTracingStalled`, `FoldSuspected`)
/// carry the partial result computed before the failure so callers can still
/// report it.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("numeric overflow")]
    NumericOverflow,

    #[error("division by zero at anchor")]
    DivisionByZeroAtAnchor,

    #[error("anchor not fixed (residual {residual:e})")]
    AnchorNotFixed { residual: f64 },

    #[error("outside unit disc")]
    OutsideUnitDisc,

    #[error("invalid boundary distance")]
    InvalidBoundaryDistance,

    #[error("query outside domain")]
    QueryOutsideDomain,

    #[error("oracle inconclusive")]
    OracleInconclusive,

    #[error("segment exits domain")]
    SegmentExitsDomain,

    #[error("no fixed point found near guess")]
    NoFixedPointNearGuess,

    #[error("degenerate Newton step")]
    DegenerateNewtonStep,

    #[error("not a cycle (worst residual {residual:e})")]
    NotACycle { residual: f64 },

    #[error("Koenigs requires attracting non-super fixed point")]
    KoenigsRequiresAttracting,

    #[error("point not in linearizable basin")]
    NotInLinearizableBasin,

    #[error("curve tracing stalled after {} points", partial.len())]
    CurveTracingStalled { partial: Vec<Complex64> },

    #[error("no secondary fixed point located")]
    NoSecondaryFixedPoint,

    #[error("statistic undefined at 1")]
    StatisticUndefinedAtOne,

    #[error("branch lost at parameter {at_param}")]
    BranchLost { at_param: f64, partial: PathTrace },

    #[error("fold suspected at parameter {at_param}")]
    FoldSuspected { at_param: f64, partial: PathTrace },

    #[error("identity check infeasible at this parameter")]
    IdentityCheckInfeasible,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
