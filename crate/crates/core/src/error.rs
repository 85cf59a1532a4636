//! Error type shared by every module of the crate.

use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, LevyError>;

/// Errors surfaced by constructors, evaluators and samplers.
#[derive(Clone, Debug, PartialEq)]
pub enum LevyError {
    /// Vector/matrix dimensions of a triplet, grid or argument disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// The Lévy-measure integrability witness `∫ min(1,|y|²) ν(dy)` failed:
    /// the quadrature did not converge or exceeded the declared bound.
    QuadratureDivergence,
    /// Stability index outside `(0, 2)`.
    InvalidAlpha(f64),
    /// Poisson/compound-Poisson rate must be strictly positive.
    InvalidRate(f64),
    /// `Q` is not symmetric positive semidefinite within tolerance.
    NotPositiveSemidefinite,
    /// Expected jump count of a truncated measure exceeds the configured budget.
    MassOverflow { expected_jumps: f64, budget: f64 },
    /// Series truncation left the tail radius unresolved.
    TailNotResolved { reached: f64, required: f64 },
    /// A jump region must keep a positive exclusion radius around the origin,
    /// and no observed jump inside the radius may satisfy the predicate.
    RegionTouchesOrigin,
    /// Estimator received an empty ensemble.
    EmptyEnsemble,
    /// Campbell check needs a step function on `[0, ∞)` with compact support.
    UnsupportedF,
    /// Interval lies outside the backend's semiring.
    OutOfSemiring,
    /// The L² error certificate of an integrand did not shrink across levels.
    NotSquareIntegrable,
    /// A simple-process coefficient was declared to read path data past the
    /// left endpoint of its stochastic interval.
    NonAdaptedCoefficient,
    /// Q-recovery limit did not stabilise within the requested tolerance.
    NoConvergence { last_diff: f64 },
    /// SDE state exceeded the blow-up guard.
    Blowup { time: f64 },
    /// Exit from the localization ball dominates the smallest probe time.
    ExitDominates { exit_fraction: f64 },
    /// Log-log slope fit residual too large to bracket an index.
    SlopeUnresolved { residual: f64 },
    /// Too many paths never left the ball before the horizon.
    Censored { fraction: f64 },
    /// Parameter combination is outside what this build implements.
    Unsupported(&'static str),
}

impl fmt::Display for LevyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevyError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LevyError::QuadratureDivergence => {
                write!(f, "quadrature diverged or integrability witness failed")
            }
            LevyError::InvalidAlpha(a) => write!(f, "alpha {a} outside (0, 2)"),
            LevyError::InvalidRate(r) => write!(f, "rate {r} must be > 0"),
            LevyError::NotPositiveSemidefinite => {
                write!(f, "Q is not symmetric positive semidefinite")
            }
            LevyError::MassOverflow {
                expected_jumps,
                budget,
            } => write!(f, "expected {expected_jumps} jumps exceeds budget {budget}"),
            LevyError::TailNotResolved { reached, required } => {
                write!(f, "series tail radius {reached} below required {required}")
            }
            LevyError::RegionTouchesOrigin => {
                write!(f, "jump region must exclude a ball around the origin")
            }
            LevyError::EmptyEnsemble => write!(f, "ensemble is empty"),
            LevyError::UnsupportedF => {
                write!(f, "functional must be a compactly supported step function")
            }
            LevyError::OutOfSemiring => write!(f, "set is outside the backend semiring"),
            LevyError::NotSquareIntegrable => {
                write!(f, "L2 error certificate does not shrink across levels")
            }
            LevyError::NonAdaptedCoefficient => {
                write!(f, "coefficient reads path data beyond its interval start")
            }
            LevyError::NoConvergence { last_diff } => {
                write!(f, "no convergence, last relative difference {last_diff}")
            }
            LevyError::Blowup { time } => write!(f, "state blew up at t = {time}"),
            LevyError::ExitDominates { exit_fraction } => write!(
                f,
                "exit before smallest probe time in {exit_fraction} of paths"
            ),
            LevyError::SlopeUnresolved { residual } => {
                write!(f, "log-log slope fit residual {residual} exceeds 0.05")
            }
            LevyError::Censored { fraction } => {
                write!(f, "{fraction} of paths never exited before the horizon")
            }
            LevyError::Unsupported(what) => write!(f, "unsupported: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LevyError {}
