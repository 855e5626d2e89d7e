use thiserror::Error;

use super::transform::Sequence;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscrepancyError {
    #[error("spectrum entry at k = {index} is not positive")]
    NonPositive { index: i64 },
    #[error("scaled wavenumber k/k_d = {scaled} at k = {index} gives k ln k = 0")]
    DegenerateIndex { index: i64, scaled: f64 },
    #[error("reference wavenumber k_d must be positive, got {0}")]
    BadScale(f64),
}

/// `Discr(k) = -ln|s_k| / (k~ ln k~) - 1/ln 2` with `k~ = k / k_d`.
pub fn naive_discrepancy<T: Real>(
    spectrum: &Sequence<T>,
    k_d: f64,
    t_label: f64,
) -> Result<Sequence<T>, DiscrepancyError> {
    if !(k_d.is_finite() && k_d > 0.0) {
        return Err(DiscrepancyError::BadScale(k_d));
    }
    let inv_ln2 = T::one() / T::ln_2();
    let scale = T::from_f64(k_d);
    let mut values = Vec::with_capacity(spectrum.len());
    for (k, s) in spectrum.iter() {
        if *s <= T::zero() {
            return Err(DiscrepancyError::NonPositive { index: k });
        }
        let scaled = T::from_i64(k) / scale.clone();
        let denom = scaled.clone() * scaled.ln();
        if denom.is_zero() || !denom.is_finite() {
            return Err(DiscrepancyError::DegenerateIndex {
                index: k,
                scaled: scaled.to_f64(),
            });
        }
        values.push(-(s.ln()) / denom - inv_ln2.clone());
    }
    Ok(Sequence {
        start_index: spectrum.start_index,
        values,
        noisy: spectrum.noisy.clone(),
        label: format!("Discr(k) at t = {t_label}"),
    })
}

/// Outcome of comparing a spectrum with `e^{-C k~ ln k~}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCheck {
    pub holds: bool,
    pub first_violation: Option<i64>,
    /// Entries actually compared.
    pub checked: usize,
}

/// Checks `|s_k| <= e^{-C k~ ln k~}` for every noise-free `k >= k_min`.
///
/// The comparison is done on logarithms so deep spectra do not underflow.
pub fn check_decay_bound<T: Real>(spectrum: &Sequence<T>, k_d: f64, c: f64, k_min: i64) -> DecayCheck {
    let scale = T::from_f64(k_d);
    let c = T::from_f64(c);
    let mut checked = 0;
    for ((k, s), &noisy) in spectrum.iter().zip(&spectrum.noisy) {
        if k < k_min || noisy {
            continue;
        }
        checked += 1;
        let magnitude = s.abs();
        if magnitude.is_zero() {
            continue;
        }
        let scaled = T::from_i64(k) / scale.clone();
        let bound = -(c.clone() * scaled.clone() * scaled.ln());
        if magnitude.ln() > bound {
            return DecayCheck {
                holds: false,
                first_violation: Some(k),
                checked,
            };
        }
    }
    DecayCheck {
        holds: true,
        first_violation: None,
        checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(f: impl Fn(f64) -> f64, lo: i64, hi: i64) -> Sequence<f64> {
        Sequence::new(lo, (lo..=hi).map(|k| f(k as f64)).collect(), "s")
    }

    #[test]
    fn exact_law_has_zero_discrepancy() {
        let c = 1.0 / std::f64::consts::LN_2;
        let s = spectrum(|k| (-c * k * k.ln()).exp(), 2, 30);
        let d = naive_discrepancy(&s, 1.0, 1.0).unwrap();
        assert!(d.values.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn pure_exponential_never_converges() {
        let s = spectrum(|k| (-2.0 * k).exp(), 2, 60);
        let d = naive_discrepancy(&s, 1.0, 1.0).unwrap();
        for ((k, v), w) in d.iter().zip(d.values.iter().skip(1)) {
            let want = 2.0 / (k as f64).ln() - 1.0 / std::f64::consts::LN_2;
            assert!((v - want).abs() < 1e-13);
            assert!(w < v);
        }
        assert!(d.values.last().unwrap().abs() > 0.5);
    }

    #[test]
    fn discrepancy_errors() {
        let s = Sequence::new(1, vec![0.5f64, 0.25], "s");
        assert!(matches!(
            naive_discrepancy(&s, 1.0, 1.0),
            Err(DiscrepancyError::DegenerateIndex { index: 1, .. })
        ));
        let s = Sequence::new(2, vec![0.5f64, -0.25], "s");
        assert_eq!(
            naive_discrepancy(&s, 1.0, 1.0).unwrap_err(),
            DiscrepancyError::NonPositive { index: 3 }
        );
    }

    #[test]
    fn decay_bound_examples() {
        let c = 1.0 / std::f64::consts::LN_2;
        let fast = spectrum(|k| (-c * k * k.ln()).exp(), 2, 40);
        assert!(check_decay_bound(&fast, 1.0, 0.7, 3).holds);

        let slow = spectrum(|k| (-0.5 * k).exp(), 1, 30);
        let check = check_decay_bound(&slow, 1.0, 0.5, 8);
        assert!(!check.holds);
        assert_eq!(check.first_violation, Some(8));
    }

    #[test]
    fn decay_bound_skips_noise() {
        let s = spectrum(|k| (-0.5 * k).exp(), 10, 12).with_noise(vec![true, true, true]);
        let check = check_decay_bound(&s, 1.0, 0.7, 10);
        assert!(check.holds);
        assert_eq!(check.checked, 0);
    }
}
