//! Decay-law prediction and asymptotic extrapolation of computed spectra.

pub mod balance;
pub mod discrepancy;
pub mod pipeline;
pub mod transform;

pub use balance::{closed_form, solve_balance, BalanceError, BalancePrediction, ClosedForm};
pub use discrepancy::{check_decay_bound, naive_discrepancy, DecayCheck, DiscrepancyError};
pub use pipeline::{median, run_pipeline, ExtrapolationReport, PipelineError};
pub use transform::{apply_transform, Sequence, TransformError, TransformId, CANONICAL_STACK};
