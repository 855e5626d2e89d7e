use thiserror::Error;

use super::transform::{apply_transform, Sequence, TransformError, TransformId, CANONICAL_STACK};
use crate::scalar::{total_cmp, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("empty transform stack")]
    EmptyStack,
    #[error("stage {stage}: {source}")]
    Transform {
        stage: usize,
        #[source]
        source: TransformError,
    },
    #[error("terminal stage has {got} usable entries, at least {needed} are required for a fit")]
    TooShort { needed: usize, got: usize },
}

/// Minimum number of terminal entries entering the fit.
pub const MIN_TAIL: usize = 3;
/// Fraction of the terminal stage used by the tail median.
pub const TAIL_FRACTION: f64 = 0.2;

/// Every intermediate stage plus the fitted terminal constant.
#[derive(Debug, Clone)]
pub struct ExtrapolationReport<T> {
    pub input: Sequence<T>,
    pub stages: Vec<(TransformId, Sequence<T>)>,
    /// Tail median of the terminal stage.
    pub terminal_fit: T,
    /// Number of entries the median was taken over.
    pub tail_len: usize,
    /// `-1 / terminal_fit`, filled for the canonical stack only.
    pub c_star: Option<T>,
    /// Terminal stage plus `ln 2` (canonical stack) or minus the fit
    /// (any other stack).
    pub discrepancy_trace: Sequence<T>,
}

impl<T: Real> ExtrapolationReport<T> {
    pub fn stack(&self) -> Vec<TransformId> {
        self.stages.iter().map(|(t, _)| *t).collect()
    }

    pub fn is_canonical(&self) -> bool {
        self.stack() == CANONICAL_STACK
    }

    pub fn terminal(&self) -> &Sequence<T> {
        &self.stages.last().expect("nonempty stack").1
    }

    /// `terminal_fit + ln 2`.
    pub fn tail_discrepancy(&self) -> T {
        self.terminal_fit.clone() + T::ln_2()
    }

    /// Entry of the discrepancy trace with the smallest magnitude, ignoring
    /// noisy entries.
    pub fn best_discrepancy(&self) -> Option<(i64, T)> {
        self.discrepancy_trace
            .iter()
            .zip(&self.discrepancy_trace.noisy)
            .filter(|(_, &noisy)| !noisy)
            .map(|((k, v), _)| (k, v.clone()))
            .min_by(|a, b| total_cmp(&a.1.abs(), &b.1.abs()))
    }
}

/// Median of `values`; the mean of the two central entries for even counts.
pub fn median<T: Real>(values: &[T]) -> T {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2].clone()
    } else {
        (sorted[n / 2 - 1].clone() + sorted[n / 2].clone()) / T::from_i64(2)
    }
}

/// Size of the tail fitted for a terminal stage of `len` entries.
pub fn tail_len(len: usize) -> usize {
    MIN_TAIL.max((TAIL_FRACTION * len as f64).ceil() as usize).min(len)
}

/// Applies `stack` in order and fits the terminal stage by its tail median.
pub fn run_pipeline<T: Real>(
    s: &Sequence<T>,
    stack: &[TransformId],
) -> Result<ExtrapolationReport<T>, PipelineError> {
    if stack.is_empty() {
        return Err(PipelineError::EmptyStack);
    }
    let mut stages = Vec::with_capacity(stack.len());
    let mut current = s.clone();
    for (i, &t) in stack.iter().enumerate() {
        current = apply_transform(t, &current).map_err(|source| PipelineError::Transform {
            stage: i + 1,
            source,
        })?;
        stages.push((t, current.clone()));
    }

    let usable = current.noise_free_prefix();
    if usable.len() < MIN_TAIL {
        return Err(PipelineError::TooShort {
            needed: MIN_TAIL,
            got: usable.len(),
        });
    }
    let n_tail = tail_len(usable.len());
    let terminal_fit = median(&usable.values[usable.len() - n_tail..]);

    let canonical = stack == CANONICAL_STACK;
    let c_star = if canonical && !terminal_fit.is_zero() {
        Some(-(T::one() / terminal_fit.clone()))
    } else {
        None
    };
    let discrepancy_trace = if canonical {
        let ln2 = T::ln_2();
        current.map_values(|v| v.clone() + ln2.clone(), "terminal + ln 2")
    } else {
        current.map_values(|v| v.clone() - terminal_fit.clone(), "terminal - fit")
    };

    Ok(ExtrapolationReport {
        input: s.clone(),
        stages,
        terminal_fit,
        tail_len: n_tail,
        c_star,
        discrepancy_trace,
    })
}
