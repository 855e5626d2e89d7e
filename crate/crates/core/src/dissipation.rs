//! Fourier symbols of the dissipation operator.
//!
//! Every family is written as `rho(k) = mu * exp(G(k))`, except that the
//! cosh and power-law families vanish at `k = 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DissipationError {
    #[error("dissipation parameter `{name}` must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("inconsistent parameters: k_d = {k_d} but 1/(2 sigma) = {implied}")]
    InconsistentScale { k_d: f64, implied: f64 },
    #[error("growth exponent undefined at k = {k}: the rate vanishes there")]
    ZeroRate { k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolFamily {
    /// `mu * exp(2 sigma |k|)`
    Exponential,
    /// `mu * (cosh(k / k_d) - 1)`
    Cosh,
    /// `mu * exp(2 sigma |k|^alpha)`
    StretchedExponential,
    /// `mu * |k|^(2 alpha)`
    PowerLaplacian,
}

impl SymbolFamily {
    pub fn name(self) -> &'static str {
        match self {
            SymbolFamily::Exponential => "exponential",
            SymbolFamily::Cosh => "cosh",
            SymbolFamily::StretchedExponential => "stretched_exponential",
            SymbolFamily::PowerLaplacian => "power_laplacian",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Some(SymbolFamily::Exponential),
            "cosh" => Some(SymbolFamily::Cosh),
            "stretched_exponential" | "stretched" => Some(SymbolFamily::StretchedExponential),
            "power_laplacian" | "power" => Some(SymbolFamily::PowerLaplacian),
            _ => None,
        }
    }
}

/// A dissipation symbol with its parameters.
///
/// `sigma` and the reference wavenumber `k_d` are tied by `k_d = 1/(2 sigma)`;
/// only `sigma` is stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationSymbol {
    pub family: SymbolFamily,
    pub mu: f64,
    pub sigma: f64,
    pub alpha: f64,
}

fn check_positive(name: &'static str, value: f64) -> Result<(), DissipationError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(DissipationError::NonPositive { name, value })
    }
}

impl DissipationSymbol {
    pub fn new(
        family: SymbolFamily,
        mu: f64,
        sigma: f64,
        alpha: f64,
    ) -> Result<Self, DissipationError> {
        check_positive("mu", mu)?;
        check_positive("sigma", sigma)?;
        check_positive("alpha", alpha)?;
        Ok(DissipationSymbol {
            family,
            mu,
            sigma,
            alpha,
        })
    }

    /// `mu * exp(|k| / k_d)`.
    pub fn exponential(mu: f64, k_d: f64) -> Result<Self, DissipationError> {
        check_positive("k_d", k_d)?;
        Self::new(SymbolFamily::Exponential, mu, 0.5 / k_d, 1.0)
    }

    /// `mu * (cosh(k / k_d) - 1)`.
    pub fn cosh(mu: f64, k_d: f64) -> Result<Self, DissipationError> {
        check_positive("k_d", k_d)?;
        Self::new(SymbolFamily::Cosh, mu, 0.5 / k_d, 1.0)
    }

    pub fn stretched_exponential(mu: f64, sigma: f64, alpha: f64) -> Result<Self, DissipationError> {
        Self::new(SymbolFamily::StretchedExponential, mu, sigma, alpha)
    }

    pub fn power_laplacian(mu: f64, alpha: f64) -> Result<Self, DissipationError> {
        Self::new(SymbolFamily::PowerLaplacian, mu, 0.5, alpha)
    }

    /// Builds `sigma` from whichever of `sigma`/`k_d` is given, rejecting
    /// contradictory pairs.
    pub fn resolve_scale(sigma: Option<f64>, k_d: Option<f64>) -> Result<f64, DissipationError> {
        match (sigma, k_d) {
            (Some(s), Some(kd)) => {
                check_positive("sigma", s)?;
                check_positive("k_d", kd)?;
                let implied = 0.5 / s;
                if ((implied - kd) / kd).abs() > 1e-12 {
                    return Err(DissipationError::InconsistentScale { k_d: kd, implied });
                }
                Ok(s)
            }
            (Some(s), None) => {
                check_positive("sigma", s)?;
                Ok(s)
            }
            (None, Some(kd)) => {
                check_positive("k_d", kd)?;
                Ok(0.5 / kd)
            }
            (None, None) => Ok(0.5),
        }
    }

    pub fn k_d(&self) -> f64 {
        0.5 / self.sigma
    }

    /// Nondimensional wavenumber `k / k_d = 2 sigma k`.
    pub fn scaled_wavenumber(&self, k: f64) -> f64 {
        2.0 * self.sigma * k
    }

    /// `rho(k)` in the precision of `T`.
    pub fn rate<T: Real>(&self, k: i64) -> T {
        self.rate_at(&T::from_i64(k.abs()))
    }

    /// `rho` at a real wavenumber.
    pub fn rate_at<T: Real>(&self, k: &T) -> T {
        let k = k.abs();
        let mu = T::from_f64(self.mu);
        let two_sigma = T::from_f64(2.0 * self.sigma);
        match self.family {
            SymbolFamily::Exponential => mu * (two_sigma * k).exp(),
            SymbolFamily::Cosh => {
                if k.is_zero() {
                    return T::zero();
                }
                let x = two_sigma * k;
                // cosh x - 1 = 2 sinh^2(x/2), free of cancellation near zero
                let half = x / T::from_i64(2);
                let sinh = (half.exp() - (-half).exp()) / T::from_i64(2);
                mu * T::from_i64(2) * sinh.clone() * sinh
            }
            SymbolFamily::StretchedExponential => {
                mu * (two_sigma * k.powf(&T::from_f64(self.alpha))).exp()
            }
            SymbolFamily::PowerLaplacian => {
                if k.is_zero() {
                    return T::zero();
                }
                mu * k.powf(&T::from_f64(2.0 * self.alpha))
            }
        }
    }

    /// `G(k) = ln(rho(k) / mu)`, evaluated without overflow for large `k`.
    pub fn growth_exponent<T: Real>(&self, k: &T) -> Result<T, DissipationError> {
        let k = k.abs();
        let two_sigma = T::from_f64(2.0 * self.sigma);
        match self.family {
            SymbolFamily::Exponential => Ok(two_sigma * k),
            SymbolFamily::StretchedExponential => {
                Ok(two_sigma * k.powf(&T::from_f64(self.alpha)))
            }
            SymbolFamily::Cosh => {
                if k.is_zero() {
                    return Err(DissipationError::ZeroRate { k: 0.0 });
                }
                let x = two_sigma * k;
                let one = T::one();
                if x > one {
                    // ln(cosh x - 1) = x - ln 2 + 2 ln(1 - e^{-x})
                    let tail = (one.clone() - (-x.clone()).exp()).ln();
                    Ok(x - T::ln_2() + T::from_i64(2) * tail)
                } else {
                    // ln(2 sinh^2(x/2))
                    let half = x / T::from_i64(2);
                    let sinh = (half.exp() - (-half).exp()) / T::from_i64(2);
                    Ok(T::ln_2() + T::from_i64(2) * sinh.ln())
                }
            }
            SymbolFamily::PowerLaplacian => {
                if k.is_zero() {
                    return Err(DissipationError::ZeroRate { k: 0.0 });
                }
                Ok(T::from_f64(2.0 * self.alpha) * k.ln())
            }
        }
    }
}
