//! Numerics for Lévy and Lévy-type (Feller) processes.
//!
//! The crate evaluates characteristic exponents of Lévy triplets, generates
//! càdlàg paths by explicit constructions (Poisson arrivals, compound Poisson
//! sums, dyadic midpoint refinement for Brownian motion, compensated-annulus
//! truncation for general triplets, random series), integrates against random
//! orthogonal measures, and estimates state-dependent symbols `q(x, ξ)` of
//! Lévy-driven SDEs. Every estimator ships with a quadrature or Monte Carlo
//! oracle so claims can be checked quantitatively.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature for embedded or cross-language-FFI builds. All transcendental
//! functions are routed through `libm` so results are bit-identical with and
//! without `std`.
//!
//! All randomness flows through [`rng::RandomSource`], a counter-based
//! generator keyed by `(seed, stream)`. Identical keys give identical draws;
//! distinct stream ids give independent streams, so ensembles can be
//! partitioned across workers without coordination.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::too_many_arguments)]
#![allow(clippy::type_complexity)]

extern crate alloc;

pub mod empirical;
pub mod error;
pub mod levy;
pub mod linalg;
pub mod math;
pub mod path;
pub mod quad;
pub mod rng;
pub mod rom;
pub mod sampler;
pub mod semigroup;
pub mod stats;
pub mod symbol;

pub use error::{LevyError, Result};
pub use levy::{CharacteristicExponent, LevyMeasureSpec, LevyTriplet};
pub use path::{CadlagPath, Ensemble};
pub use rng::RandomSource;
