//! Reads spectra written by `simulate` or `exact` back in.

use std::path::Path;

use expburgers::asymptotics::Sequence;
use expburgers::{with_precision, BigReal, Real, Sequence64};

use crate::error::CliError;

/// Raw spectrum rows with `k >= 1`, values kept as their decimal text.
pub struct SpectrumFile {
    pub kind: SpectrumKind,
    pub start: i64,
    pub values: Vec<String>,
    pub noisy: Vec<bool>,
    lines: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// `simulate` output: `abs_u` and `noise_flag` columns.
    Solver,
    /// `exact` output: `vhat` at the recorded `precision_bits`.
    Exact { bits: u32 },
}

fn bad(path: &Path, line: u64, reason: impl Into<String>) -> CliError {
    CliError::Input {
        path: path.display().to_string(),
        line,
        reason: reason.into(),
    }
}

pub fn read_spectrum(path: &Path) -> Result<SpectrumFile, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(path, 1, e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(path, 1, e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let k_col = column("k").ok_or_else(|| bad(path, 1, "missing column `k`"))?;
    let (value_col, exact) = match (column("vhat"), column("abs_u")) {
        (Some(c), _) => (c, true),
        (None, Some(c)) => (c, false),
        (None, None) => return Err(bad(path, 1, "expected a `vhat` or `abs_u` column")),
    };
    let noise_col = column("noise_flag");
    let bits_col = column("precision_bits");

    let mut bits = None;
    let mut start = None;
    let mut values = Vec::new();
    let mut noisy = Vec::new();
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |c: usize| record.get(c).ok_or_else(|| bad(path, line, "short row"));
        let k: i64 = field(k_col)?
            .parse()
            .map_err(|_| bad(path, line, "`k` is not an integer"))?;
        if k < 1 {
            continue;
        }
        let first = *start.get_or_insert(k);
        if k != first + values.len() as i64 {
            return Err(bad(path, line, format!("wavenumbers must be consecutive, got k = {k}")));
        }
        values.push(field(value_col)?.to_string());
        lines.push(line);
        noisy.push(match noise_col {
            Some(c) => match field(c)? {
                "0" => false,
                "1" => true,
                other => return Err(bad(path, line, format!("noise_flag must be 0 or 1, got `{other}`"))),
            },
            None => false,
        });
        if let Some(c) = bits_col {
            let b: u32 = field(c)?
                .parse()
                .map_err(|_| bad(path, line, "`precision_bits` is not an integer"))?;
            if *bits.get_or_insert(b) != b {
                return Err(bad(path, line, "mixed precisions in one file"));
            }
        }
    }
    let start = start.ok_or_else(|| bad(path, 1, "no rows with k >= 1"))?;
    let kind = if exact {
        SpectrumKind::Exact {
            bits: bits.ok_or_else(|| bad(path, 1, "exact spectrum without `precision_bits`"))?,
        }
    } else {
        SpectrumKind::Solver
    };
    Ok(SpectrumFile {
        kind,
        start,
        values,
        noisy,
        lines,
    })
}

impl SpectrumFile {
    fn parse<T: Real>(&self, path: &Path) -> Result<Sequence<T>, CliError> {
        let values = self
            .values
            .iter()
            .zip(&self.lines)
            .map(|(v, &line)| T::parse_decimal(v).ok_or_else(|| bad(path, line, format!("not a number: `{v}`"))))
            .collect::<Result<Vec<T>, _>>()?;
        let label = path.display().to_string();
        Ok(Sequence::new(self.start, values, label).with_noise(self.noisy.clone()))
    }

    pub fn to_f64(&self, path: &Path) -> Result<Sequence64, CliError> {
        self.parse(path)
    }

    /// Parses at `bits`; the caller must evaluate inside the same precision.
    pub fn to_big(&self, path: &Path, bits: u32) -> Result<Sequence<BigReal>, CliError> {
        with_precision(bits, || self.parse(path))
    }
}
