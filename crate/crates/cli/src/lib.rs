//! Library surface of the `levytype` command-line tool: configuration
//! schema, command runners, output writers and the worker pool. The binary
//! in `main.rs` is a thin argument-parsing shell over [`commands`].

#![allow(clippy::type_complexity)]

pub mod commands;
pub mod config;
pub mod output;
pub mod par;

use levytype_core::LevyError;

/// Exit codes of the binary: 0 pass, 1 check failed, 2 invalid input,
/// 3 statistical precondition unmet.
pub fn exit_code_for_error(err: &config::AnyError) -> i32 {
    match err.downcast_ref::<LevyError>() {
        Some(
            LevyError::ExitDominates { .. }
            | LevyError::Censored { .. }
            | LevyError::TailNotResolved { .. },
        ) => 3,
        _ => 2,
    }
}

/// Short machine-readable kind for the JSON error payload.
pub fn error_kind(err: &config::AnyError) -> &'static str {
    if let Some(le) = err.downcast_ref::<LevyError>() {
        match le {
            LevyError::DimensionMismatch { .. } => "dimension",
            LevyError::QuadratureDivergence => "quadrature",
            LevyError::InvalidAlpha(_) | LevyError::InvalidRate(_) => "parameter",
            LevyError::NotPositiveSemidefinite => "psd",
            LevyError::MassOverflow { .. } => "mass_overflow",
            LevyError::TailNotResolved { .. } => "tail_not_resolved",
            LevyError::RegionTouchesOrigin => "region",
            LevyError::EmptyEnsemble => "empty_ensemble",
            LevyError::UnsupportedF => "unsupported_functional",
            LevyError::OutOfSemiring => "semiring",
            LevyError::NotSquareIntegrable => "not_square_integrable",
            LevyError::NonAdaptedCoefficient => "non_adapted",
            LevyError::NoConvergence { .. } => "no_convergence",
            LevyError::Blowup { .. } => "blowup",
            LevyError::ExitDominates { .. } => "exit_dominates",
            LevyError::SlopeUnresolved { .. } => "slope_unresolved",
            LevyError::Censored { .. } => "censored",
            LevyError::Unsupported(_) => "unsupported",
        }
    } else if err.is::<serde_json::Error>() {
        "schema"
    } else {
        "io"
    }
}
