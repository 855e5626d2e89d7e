//! Dominant-balance prediction of the decay exponent `F(k)` in
//! `|u_hat(k)| ~ e^{-F(k)}`.
//!
//! Balancing the dissipative term against a steepest-descent estimate of the
//! convolution gives `2 F(k/2) = F(k) - G(k)`, solved exactly on `k = 2^n`:
//! `F(2^n) = 2^n [F(1) + sum_{j=1}^n G(2^j) / 2^j]`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::dissipation::{DissipationError, DissipationSymbol, SymbolFamily};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BalanceError {
    #[error(
        "alpha = {alpha} < 1: k/2 is not a minimum of F(p) + F(k-p), so the balance does not apply"
    )]
    MinimumCondition { alpha: f64 },
    #[error("no leading-order closed form for the {0} family")]
    Unsupported(&'static str),
    #[error("need at least one doubling, got n_max = 0")]
    NoDoubling,
    #[error(transparent)]
    Symbol(#[from] DissipationError),
}

/// Leading-order form of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    /// `coefficient * k~ ln k~` with `k~ = k / k_d`.
    KLogK { coefficient: f64 },
    /// `coefficient * |k|^alpha`.
    PowerAlpha { coefficient: f64, alpha: f64 },
}

impl ClosedForm {
    pub fn eval(&self, symbol: &DissipationSymbol, k: f64) -> f64 {
        match *self {
            ClosedForm::KLogK { coefficient } => {
                let scaled = symbol.scaled_wavenumber(k);
                coefficient * scaled * scaled.ln()
            }
            ClosedForm::PowerAlpha { coefficient, alpha } => coefficient * k.abs().powf(alpha),
        }
    }

    pub fn coefficient(&self) -> f64 {
        match *self {
            ClosedForm::KLogK { coefficient } | ClosedForm::PowerAlpha { coefficient, .. } => {
                coefficient
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BalancePrediction<T> {
    pub symbol: DissipationSymbol,
    /// `F(2^n)` for `n = 0..=n_max`, keyed by `2^n`.
    pub f_values: BTreeMap<u64, T>,
    pub closed_form: ClosedForm,
    /// Slopes of `F` between consecutive dyadic points are nondecreasing,
    /// which is what makes `p = k/2` a minimum of `F(p) + F(k - p)`.
    pub midpoint_minimum: bool,
}

impl<T: Real> BalancePrediction<T> {
    pub fn f(&self, k: u64) -> Option<&T> {
        self.f_values.get(&k)
    }
}

/// Leading-order closed form for `symbol`.
pub fn closed_form(symbol: &DissipationSymbol) -> Result<ClosedForm, BalanceError> {
    match symbol.family {
        SymbolFamily::Exponential | SymbolFamily::Cosh => Ok(ClosedForm::KLogK {
            coefficient: 1.0 / std::f64::consts::LN_2,
        }),
        SymbolFamily::StretchedExponential => {
            if symbol.alpha < 1.0 {
                Err(BalanceError::MinimumCondition {
                    alpha: symbol.alpha,
                })
            } else if symbol.alpha == 1.0 {
                Ok(ClosedForm::KLogK {
                    coefficient: 1.0 / std::f64::consts::LN_2,
                })
            } else {
                let coefficient = 2.0 * symbol.sigma / (1.0 - 2f64.powf(1.0 - symbol.alpha));
                Ok(ClosedForm::PowerAlpha {
                    coefficient,
                    alpha: symbol.alpha,
                })
            }
        }
        SymbolFamily::PowerLaplacian => Err(BalanceError::Unsupported(symbol.family.name())),
    }
}

/// `F` on `k = 1, 2, 4, ..., 2^n_max` starting from `F(1) = f1`.
pub fn solve_balance<T: Real>(
    symbol: &DissipationSymbol,
    n_max: u32,
    f1: T,
) -> Result<BalancePrediction<T>, BalanceError> {
    if n_max == 0 {
        return Err(BalanceError::NoDoubling);
    }
    let closed_form = closed_form(symbol)?;
    let mut f_values = BTreeMap::new();
    f_values.insert(1u64, f1.clone());
    let mut partial = f1;
    let mut power = T::one();
    for n in 1..=n_max {
        power = power * T::from_i64(2);
        let k = 1u64 << n;
        let g = symbol.growth_exponent(&T::from_i64(k as i64))?;
        partial = partial + g / power.clone();
        f_values.insert(k, power.clone() * partial.clone());
    }

    let values: Vec<(u64, T)> = f_values.iter().map(|(k, v)| (*k, v.clone())).collect();
    let slopes: Vec<T> = values
        .windows(2)
        .map(|w| (w[1].1.clone() - w[0].1.clone()) / T::from_i64((w[1].0 - w[0].0) as i64))
        .collect();
    let midpoint_minimum = slopes.windows(2).all(|w| w[1] >= w[0]);

    Ok(BalancePrediction {
        symbol: *symbol,
        f_values,
        closed_form,
        midpoint_minimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_doubling_of_linear_growth() {
        let sym = DissipationSymbol::exponential(1.0, 1.0).unwrap();
        let p = solve_balance(&sym, 1, 0.0f64).unwrap();
        assert_eq!(p.f(2), Some(&2.0));
        assert!(p.midpoint_minimum);
    }

    #[test]
    fn linear_growth_approaches_k_log_k() {
        // G(k) = k gives F(2^n) = 2^n (F1 + n)
        let sym = DissipationSymbol::exponential(1.0, 1.0).unwrap();
        let p = solve_balance(&sym, 40, 0.0f64).unwrap();
        for n in [10u32, 20, 40] {
            let k = 1u64 << n;
            let ratio = p.f(k).unwrap() / (k as f64 * n as f64);
            assert!((ratio - 1.0).abs() < 1e-12);
            let cf = p.closed_form.eval(&sym, k as f64);
            assert!((p.f(k).unwrap() / cf - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stretched_coefficient() {
        let sym = DissipationSymbol::stretched_exponential(1.0, 0.5, 2.0).unwrap();
        let cf = closed_form(&sym).unwrap();
        assert_eq!(
            cf,
            ClosedForm::PowerAlpha {
                coefficient: 2.0,
                alpha: 2.0
            }
        );
    }

    #[test]
    fn sub_unit_alpha_is_rejected() {
        let sym = DissipationSymbol::stretched_exponential(1.0, 0.5, 0.5).unwrap();
        assert!(matches!(
            solve_balance(&sym, 4, 0.0f64),
            Err(BalanceError::MinimumCondition { .. })
        ));
        let lap = DissipationSymbol::power_laplacian(1.0, 1.0).unwrap();
        assert!(matches!(
            solve_balance(&lap, 4, 0.0f64),
            Err(BalanceError::Unsupported(_))
        ));
        let exp = DissipationSymbol::exponential(1.0, 1.0).unwrap();
        assert_eq!(solve_balance(&exp, 0, 0.0f64).unwrap_err(), BalanceError::NoDoubling);
    }

    #[test]
    fn cosh_balance_is_finite_far_out() {
        let sym = DissipationSymbol::cosh(1.0, 1.0).unwrap();
        let p = solve_balance(&sym, 30, 0.0f64).unwrap();
        assert!(p.f_values.values().all(|v| v.is_finite()));
        assert!(p.midpoint_minimum);
    }
}
