//! The three fixed experiments: naive discrepancy of the cosh run, its
//! 5-stage extrapolation, and the extrapolation of the exact half-space
//! coefficients.

use serde::Serialize;
use thiserror::Error;

use crate::asymptotics::{
    naive_discrepancy, run_pipeline, DiscrepancyError, PipelineError, Sequence, CANONICAL_STACK,
};
use crate::dissipation::DissipationSymbol;
use crate::exact::{evaluate_at_precision, ExactError};
use crate::scalar::{with_precision, BigReal, Real};
use crate::solver::{run, SolverConfig, SolverError};
use crate::spectral::{Grid, SpectralField};
use crate::{BigExtrapolationReport, ExtrapolationReport64, Sequence64, SolverConfig64};

/// Minimum naive discrepancy relative to `1/ln 2` for the cosh run.
pub const FIG1_HEADLINE: f64 = 0.035;
/// Best `|stage 5 + ln 2|` relative to `ln 2` for the solver data.
pub const FIG2_HEADLINE: f64 = 0.007;
/// Tail value of `stage 5 + ln 2` for the exact coefficients.
pub const FIG3_HEADLINE: f64 = -2.3e-3;

pub const REFERENCE_COLLOCATION: usize = 64;
pub const REFERENCE_EXACT_K: usize = 24;
pub const REFERENCE_EXACT_BITS: u32 = 256;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Discrepancy(#[from] DiscrepancyError),
    #[error("no noise-free entries with k/k_d > 1 in the reporting band")]
    EmptyBand,
}

/// Cosh dissipation with `mu = k_d = 1`, `u0 = -sin x`, `N = 64`,
/// `dt = 1e-3`, `t = 1`.
pub fn reference_solver_config() -> SolverConfig64 {
    SolverConfig::new(
        Grid::new(REFERENCE_COLLOCATION).expect("64 is a valid grid"),
        DissipationSymbol::cosh(1.0, 1.0).expect("valid symbol"),
    )
}

/// `rho(k) = e^k`, the symbol of the half-space experiment.
pub fn reference_exact_symbol() -> DissipationSymbol {
    DissipationSymbol::exponential(1.0, 1.0).expect("valid symbol")
}

/// Reporting window on `k = 1..=k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub k_min: i64,
    /// Explicit last noise-free wavenumber; `None` uses the detected onset.
    pub k_max: Option<i64>,
}

impl Default for Band {
    fn default() -> Self {
        Band { k_min: 1, k_max: None }
    }
}

/// `|u_hat(k)|` for `k = k_min..=k_max` of the grid with noise flags.
pub fn magnitude_spectrum(field: &SpectralField<f64>, band: Band) -> Sequence64 {
    let k_hi = field.grid().k_max();
    let cutoff = band
        .k_max
        .unwrap_or_else(|| field.noise_onset().map_or(k_hi, |onset| onset - 1));
    let lo = band.k_min.max(1);
    let values = (lo..=k_hi).map(|k| field.get(k).norm()).collect();
    let noisy = (lo..=k_hi).map(|k| k > cutoff).collect();
    Sequence::new(lo, values, format!("|u_hat(k, {})|", field.time)).with_noise(noisy)
}

#[derive(Debug, Clone)]
pub struct Fig1 {
    pub spectrum: Sequence64,
    /// `Discr(k)` on the entries with `k/k_d > 1`.
    pub discrepancy: Sequence64,
    pub noise_onset: Option<i64>,
    /// `min |Discr| ln 2` over the noise-free entries and where it occurs.
    pub min_relative: f64,
    pub min_at: i64,
}

impl Fig1 {
    pub fn from_spectrum(
        spectrum: Sequence64,
        k_d: f64,
        t: f64,
        noise_onset: Option<i64>,
    ) -> Result<Self, ExperimentError> {
        let first = (k_d.floor() as i64 + 1).max(spectrum.start_index);
        let band = spectrum.band(first, spectrum.end_index());
        let discrepancy = naive_discrepancy(&band, k_d, t)?;
        let ln2 = std::f64::consts::LN_2;
        let (min_at, min_relative) = discrepancy
            .iter()
            .zip(&discrepancy.noisy)
            .filter(|(_, &noisy)| !noisy)
            .map(|((k, v), _)| (k, v.abs() * ln2))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(ExperimentError::EmptyBand)?;
        Ok(Fig1 {
            spectrum,
            discrepancy,
            noise_onset,
            min_relative,
            min_at,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Fig2 {
    pub report: ExtrapolationReport64,
    pub best_at: i64,
    /// `stage 5 + ln 2` at `best_at`.
    pub best: f64,
    /// `|best| / ln 2`.
    pub best_relative: f64,
}

impl Fig2 {
    pub fn from_spectrum(spectrum: &Sequence64) -> Result<Self, ExperimentError> {
        let report = run_pipeline(spectrum, &CANONICAL_STACK)?;
        let (best_at, best) = report.best_discrepancy().ok_or(PipelineError::TooShort {
            needed: 1,
            got: 0,
        })?;
        Ok(Fig2 {
            best_relative: best.abs() / std::f64::consts::LN_2,
            report,
            best_at,
            best,
        })
    }
}

/// Solver spectrum of `cfg` at `t_end` together with both figures drawn from it.
#[derive(Debug, Clone)]
pub struct SolverFigures {
    pub field: SpectralField<f64>,
    pub fig1: Fig1,
    pub fig2: Fig2,
}

pub fn solver_figures(cfg: &SolverConfig64, band: Band) -> Result<SolverFigures, ExperimentError> {
    let field = run(cfg)?;
    let spectrum = magnitude_spectrum(&field, band);
    let fig1 = Fig1::from_spectrum(
        spectrum.clone(),
        cfg.symbol.k_d(),
        cfg.t_end,
        field.noise_onset(),
    )?;
    let fig2 = Fig2::from_spectrum(&spectrum)?;
    Ok(SolverFigures { field, fig1, fig2 })
}

#[derive(Debug, Clone)]
pub struct Fig3 {
    pub precision_bits: u32,
    pub vhat: Vec<BigReal>,
    pub term_counts: Vec<usize>,
    pub report: BigExtrapolationReport,
    pub tail_discrepancy: f64,
    pub c_star: f64,
}

/// Exact `v_hat(k, 1)`, `k = 1..=k_max`, extrapolated at `bits` of precision.
pub fn fig3(
    symbol: &DissipationSymbol,
    k_max: usize,
    bits: u32,
    term_cap: usize,
) -> Result<Fig3, ExperimentError> {
    let (vhat, term_counts) = evaluate_at_precision(k_max, symbol, 1.0, bits, term_cap)?;
    with_precision(bits, || {
        let s = Sequence::new(1, vhat.clone(), "v_hat(k, 1)");
        let report = run_pipeline(&s, &CANONICAL_STACK)?;
        let tail_discrepancy = report.tail_discrepancy().to_f64();
        let c_star = report.c_star.as_ref().map_or(f64::NAN, Real::to_f64);
        Ok(Fig3 {
            precision_bits: bits,
            vhat,
            term_counts,
            report,
            tail_discrepancy,
            c_star,
        })
    })
}
