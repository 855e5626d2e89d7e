//! Burgers equation with exponentially growing dissipation.
//!
//! - [`spectral`]: periodic grid, transforms and the dealiased product.
//! - [`dissipation`]: the dissipation symbols `rho(k)`.
//! - [`solver`]: fixed-step ETDRK4 in `f32`/`f64`.
//! - [`exact`]: exact coefficients for half-line supported data, at any
//!   precision through [`BigReal`].
//! - [`asymptotics`]: dominant-balance prediction, naive discrepancy and the
//!   Log/D/I/R/SR extrapolation pipeline.
//! - [`experiments`]: the fixed experiments reproduced by the CLI.
//!
//! The numerical core is generic over the scalar ([`Real`] for the exact
//! engine and the pipeline, `rustfft::FftNum + num_traits::Float` for the
//! solver); the aliases below fix the common choices.

pub mod asymptotics;
pub mod dissipation;
pub mod exact;
pub mod experiments;
pub mod scalar;
pub mod solver;
pub mod spectral;

pub use dissipation::{DissipationSymbol, SymbolFamily};
pub use scalar::{with_precision, working_precision, BigReal, Real, DEFAULT_PRECISION_BITS};
pub use spectral::{Grid, ProductMethod};

/// Double-precision spectral field.
pub type SpectralField64 = spectral::SpectralField<f64>;
/// Single-precision spectral field.
pub type SpectralField32 = spectral::SpectralField<f32>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
/// Exponential sum with arbitrary-precision coefficients.
pub type BigExpSum = exact::ExpSum<BigReal>;
pub type BigHalfSpaceSolution = exact::HalfSpaceSolution<BigReal>;
pub type Sequence64 = asymptotics::Sequence<f64>;
pub type BigSequence = asymptotics::Sequence<BigReal>;
pub type ExtrapolationReport64 = asymptotics::ExtrapolationReport<f64>;
pub type BigExtrapolationReport = asymptotics::ExtrapolationReport<BigReal>;
