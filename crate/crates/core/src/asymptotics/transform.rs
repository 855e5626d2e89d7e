use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("{transform}: logarithm of zero at k = {index}")]
    LogOfZero { transform: TransformId, index: i64 },
    #[error("{transform}: division by zero at k = {index}")]
    DivisionByZero { transform: TransformId, index: i64 },
    #[error("{transform}: needs at least {needed} entries, got {got}")]
    TooShort {
        transform: TransformId,
        needed: usize,
        got: usize,
    },
    #[error("{transform}: non-finite result at k = {index}")]
    NonFinite { transform: TransformId, index: i64 },
    #[error("unknown transform `{0}` (expected Log, D, I, R or SR)")]
    Unknown(String),
}

/// The elementary sequence transformations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformId {
    /// `v_k = ln |s_k|`
    Log,
    /// `v_k = s_{k+1} - s_k`
    D,
    /// `v_k = 1 / s_k`
    I,
    /// `v_k = s_{k+1} / s_k`
    R,
    /// `v_k = s_{k+1} s_{k-1} / s_k^2`
    SR,
}

impl TransformId {
    /// Entries lost by the stencil.
    pub fn shrink(self) -> usize {
        match self {
            TransformId::Log | TransformId::I => 0,
            TransformId::D | TransformId::R => 1,
            TransformId::SR => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TransformId::Log => "Log",
            TransformId::D => "D",
            TransformId::I => "I",
            TransformId::R => "R",
            TransformId::SR => "SR",
        }
    }

    /// Parses a comma-separated stack such as `Log,D,D,I,D`.
    pub fn parse_stack(spec: &str) -> Result<Vec<TransformId>, TransformError> {
        spec.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for TransformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformId {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "log" => Ok(TransformId::Log),
            "d" => Ok(TransformId::D),
            "i" => Ok(TransformId::I),
            "r" => Ok(TransformId::R),
            "sr" => Ok(TransformId::SR),
            _ => Err(TransformError::Unknown(s.to_string())),
        }
    }
}

/// The stack that exposes `-1/C` for `e^{-C k ln k}` decay.
pub const CANONICAL_STACK: [TransformId; 5] = [
    TransformId::Log,
    TransformId::D,
    TransformId::D,
    TransformId::I,
    TransformId::D,
];

/// A finite real sequence `s_k`, `k = start_index, start_index + 1, ...`.
///
/// `noisy[i]` marks entries known to be dominated by rounding noise; a
/// transformed entry is noisy when any entry of its stencil is.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence<T> {
    pub start_index: i64,
    pub values: Vec<T>,
    pub noisy: Vec<bool>,
    pub label: String,
}

impl<T: Real> Sequence<T> {
    pub fn new(start_index: i64, values: Vec<T>, label: impl Into<String>) -> Self {
        let noisy = vec![false; values.len()];
        Sequence {
            start_index,
            values,
            noisy,
            label: label.into(),
        }
    }

    pub fn with_noise(mut self, noisy: Vec<bool>) -> Self {
        assert_eq!(noisy.len(), self.values.len(), "one noise flag per entry");
        self.noisy = noisy;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the last entry.
    pub fn end_index(&self) -> i64 {
        self.start_index + self.values.len() as i64 - 1
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.values.len() as i64).map(move |i| self.start_index + i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        self.indices().zip(&self.values)
    }

    pub fn get(&self, k: i64) -> Option<&T> {
        let i = k - self.start_index;
        if i < 0 {
            None
        } else {
            self.values.get(i as usize)
        }
    }

    /// Entries up to (not including) the first noisy one.
    pub fn noise_free_prefix(&self) -> Sequence<T> {
        let n = self.noisy.iter().position(|&b| b).unwrap_or(self.len());
        self.slice(0, n)
    }

    /// Entries with `lo <= k <= hi`.
    pub fn band(&self, lo: i64, hi: i64) -> Sequence<T> {
        let from = (lo - self.start_index).clamp(0, self.len() as i64) as usize;
        let to = (hi - self.start_index + 1).clamp(from as i64, self.len() as i64) as usize;
        self.slice(from, to)
    }

    fn slice(&self, from: usize, to: usize) -> Sequence<T> {
        Sequence {
            start_index: self.start_index + from as i64,
            values: self.values[from..to].to_vec(),
            noisy: self.noisy[from..to].to_vec(),
            label: self.label.clone(),
        }
    }

    pub fn map_values(&self, f: impl Fn(&T) -> T, label: impl Into<String>) -> Sequence<T> {
        Sequence {
            start_index: self.start_index,
            values: self.values.iter().map(f).collect(),
            noisy: self.noisy.clone(),
            label: label.into(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Real::to_f64).collect()
    }
}

/// Applies one transformation.
///
/// Outputs are labelled by the last input index they use (`D`, `R`) or by the
/// centre of the stencil (`SR`), so the start index moves up by one for those
/// three.
pub fn apply_transform<T: Real>(t: TransformId, s: &Sequence<T>) -> Result<Sequence<T>, TransformError> {
    let needed = t.shrink() + 1;
    if s.len() < needed {
        return Err(TransformError::TooShort {
            transform: t,
            needed,
            got: s.len(),
        });
    }
    let label = format!("{}({})", t, s.label);
    let n_out = s.len() - t.shrink();
    let start = s.start_index + if t.shrink() > 0 { 1 } else { 0 };
    let mut values = Vec::with_capacity(n_out);
    let mut noisy = Vec::with_capacity(n_out);
    let v = &s.values;
    for i in 0..n_out {
        let index = start + i as i64;
        let value = match t {
            TransformId::Log => {
                if v[i].is_zero() {
                    return Err(TransformError::LogOfZero { transform: t, index });
                }
                v[i].abs().ln()
            }
            TransformId::I => {
                if v[i].is_zero() {
                    return Err(TransformError::DivisionByZero { transform: t, index });
                }
                T::one() / v[i].clone()
            }
            TransformId::D => v[i + 1].clone() - v[i].clone(),
            TransformId::R => {
                if v[i].is_zero() {
                    return Err(TransformError::DivisionByZero { transform: t, index });
                }
                v[i + 1].clone() / v[i].clone()
            }
            TransformId::SR => {
                if v[i + 1].is_zero() {
                    return Err(TransformError::DivisionByZero { transform: t, index });
                }
                v[i + 2].clone() * v[i].clone() / (v[i + 1].clone() * v[i + 1].clone())
            }
        };
        if !value.is_finite() {
            return Err(TransformError::NonFinite { transform: t, index });
        }
        values.push(value);
        noisy.push(s.noisy[i..=i + t.shrink()].iter().any(|&b| b));
    }
    Ok(Sequence {
        start_index: start,
        values,
        noisy,
        label,
    })
}
