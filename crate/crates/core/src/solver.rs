//! ETDRK4 (Cox–Matthews) integration of the Fourier-space Burgers equation
//!
//! `d u_hat(k)/dt = -rho(k) u_hat(k) - (ik/2) sum_{p+q=k} u_hat(p) u_hat(q)`.
//!
//! The linear part is integrated exactly per mode; the weight functions are
//! evaluated by a contour mean near `z = 0` where the closed forms cancel.

use num_complex::Complex;
use num_traits::{Float, FloatConst, Zero};
use rustfft::FftNum;
use thiserror::Error;

use crate::dissipation::DissipationSymbol;
use crate::scalar::Real;
use crate::spectral::{Grid, ProductMethod, SpectralError, SpectralField, SpectralOps};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("time step must be positive and finite, got {0}")]
    BadTimeStep(f64),
    #[error("final time must be positive and finite, got {0}")]
    BadFinalTime(f64),
    #[error("final time {t_end} is not a whole number of steps of {dt}")]
    FractionalSteps { dt: f64, t_end: f64 },
    #[error("non-finite state after step {step}")]
    NonFinite { step: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Initial datum for a run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition<T> {
    /// `u0(x) = -sin x`.
    MinusSine,
    /// `u0(x) = amplitude * e^{ix}`, supported on the positive half line.
    SingleComplexMode(Complex<T>),
    Custom(SpectralField<T>),
}

#[derive(Debug, Clone)]
pub struct SolverConfig<T> {
    pub grid: Grid,
    pub symbol: DissipationSymbol,
    pub dt: T,
    pub t_end: T,
    pub initial_condition: InitialCondition<T>,
    pub product: ProductMethod,
    /// Drops the quadratic term; only the exact linear propagator remains.
    #[doc(hidden)]
    pub linear_only: bool,
}

impl<T: FftNum + Float + FloatConst> SolverConfig<T> {
    /// `dt = 1e-3`, `t_end = 1`, `u0 = -sin x`.
    pub fn new(grid: Grid, symbol: DissipationSymbol) -> Self {
        SolverConfig {
            grid,
            symbol,
            dt: T::from(1e-3).unwrap(),
            t_end: T::one(),
            initial_condition: InitialCondition::MinusSine,
            product: ProductMethod::Padded,
            linear_only: false,
        }
    }

    /// Number of whole steps from 0 to `t_end`.
    pub fn n_steps(&self) -> Result<usize, SolverError> {
        let dt = self.dt.to_f64().unwrap_or(f64::NAN);
        let t_end = self.t_end.to_f64().unwrap_or(f64::NAN);
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SolverError::BadTimeStep(dt));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(SolverError::BadFinalTime(t_end));
        }
        let ratio = t_end / dt;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * steps {
            return Err(SolverError::FractionalSteps { dt, t_end });
        }
        Ok(steps as usize)
    }

    pub fn initial_field(&self) -> SpectralField<T> {
        let grid = self.grid;
        match &self.initial_condition {
            InitialCondition::MinusSine => {
                let half = T::from(0.5).unwrap();
                SpectralField::from_modes(
                    grid,
                    true,
                    &[
                        (1, Complex::new(T::zero(), half)),
                        (-1, Complex::new(T::zero(), -half)),
                    ],
                )
            }
            InitialCondition::SingleComplexMode(a) => {
                SpectralField::from_modes(grid, false, &[(1, *a)])
            }
            InitialCondition::Custom(field) => field.clone(),
        }
    }
}

/// The three ETDRK4 weights, divided by `dt`, plus the half-step factor `Q/dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiWeights<T> {
    pub half_step: T,
    pub f1: T,
    pub f2: T,
    pub f3: T,
}

const CONTOUR_POINTS: usize = 32;
const CONTOUR_RADIUS: f64 = 1.0;
const CONTOUR_SWITCH: f64 = 0.5;

impl<T: Float + FloatConst> PhiWeights<T> {
    /// Weights for `z = L dt`; for `z = 0` these are the classical RK4 ones.
    pub fn at(z: T) -> Self {
        if !z.is_finite() {
            return PhiWeights {
                half_step: T::zero(),
                f1: T::zero(),
                f2: T::zero(),
                f3: T::zero(),
            };
        }
        if z.abs() < T::from(CONTOUR_SWITCH).unwrap() {
            Self::contour_mean(z)
        } else {
            let w = Self::closed_form(Complex::new(z, T::zero()));
            PhiWeights {
                half_step: w.half_step.re,
                f1: w.f1.re,
                f2: w.f2.re,
                f3: w.f3.re,
            }
        }
    }

    fn closed_form(z: Complex<T>) -> PhiWeights<Complex<T>> {
        let c = |x: f64| Complex::new(T::from(x).unwrap(), T::zero());
        let ez = z.exp();
        let ez2 = (z * c(0.5)).exp();
        let z3 = z * z * z;
        PhiWeights {
            half_step: (ez2 - c(1.0)) / z,
            f1: (c(-4.0) - z + ez * (c(4.0) - z * c(3.0) + z * z)) / z3,
            f2: (c(2.0) + z + ez * (c(-2.0) + z)) / z3,
            f3: (c(-4.0) - z * c(3.0) - z * z + ez * (c(4.0) - z)) / z3,
        }
    }

    fn contour_mean(z: T) -> Self {
        let mut acc = PhiWeights {
            half_step: T::zero(),
            f1: T::zero(),
            f2: T::zero(),
            f3: T::zero(),
        };
        let radius = T::from(CONTOUR_RADIUS).unwrap();
        let m = T::from(CONTOUR_POINTS).unwrap();
        for j in 0..CONTOUR_POINTS {
            let theta = T::PI() * (T::from(j).unwrap() + T::from(0.5).unwrap()) * (T::one() + T::one()) / m;
            let point = Complex::new(z, T::zero()) + Complex::from_polar(radius, theta);
            let w = Self::closed_form(point);
            acc.half_step = acc.half_step + w.half_step.re;
            acc.f1 = acc.f1 + w.f1.re;
            acc.f2 = acc.f2 + w.f2.re;
            acc.f3 = acc.f3 + w.f3.re;
        }
        PhiWeights {
            half_step: acc.half_step / m,
            f1: acc.f1 / m,
            f2: acc.f2 / m,
            f3: acc.f3 / m,
        }
    }
}

/// Per-mode ETDRK4 scalars, stored in FFT order.
#[derive(Debug, Clone)]
pub struct EtdCoefficients<T> {
    pub dt: T,
    /// `e^{-rho dt}`
    pub full: Vec<T>,
    /// `e^{-rho dt / 2}`
    pub half: Vec<T>,
    /// Weights already multiplied by `dt`.
    pub weights: Vec<PhiWeights<T>>,
}

/// Integrating factors and weights for every mode of the grid.
pub fn precompute_coefficients<T: FftNum + Float + FloatConst + Real>(
    cfg: &SolverConfig<T>,
) -> EtdCoefficients<T> {
    let n = cfg.grid.n_collocation();
    let dt = cfg.dt;
    let mut full = Vec::with_capacity(n);
    let mut half = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        let k = cfg.grid.wavenumber(j);
        let rho: T = cfg.symbol.rate(k);
        let z = -rho * dt;
        full.push(Float::exp(z));
        half.push(Float::exp(z * T::from(0.5).unwrap()));
        let w = PhiWeights::at(z);
        weights.push(PhiWeights {
            half_step: w.half_step * dt,
            f1: w.f1 * dt,
            f2: w.f2 * dt,
            f3: w.f3 * dt,
        });
    }
    EtdCoefficients {
        dt,
        full,
        half,
        weights,
    }
}

/// Fixed-step ETDRK4 integrator bound to one configuration.
pub struct Integrator<T: FftNum> {
    ops: SpectralOps<T>,
    coeffs: EtdCoefficients<T>,
    linear_only: bool,
}

impl<T: FftNum + Float + FloatConst + Real> Integrator<T> {
    pub fn new(cfg: &SolverConfig<T>) -> Self {
        Integrator {
            ops: SpectralOps::with_method(cfg.grid, cfg.product),
            coeffs: precompute_coefficients(cfg),
            linear_only: cfg.linear_only,
        }
    }

    pub fn coefficients(&self) -> &EtdCoefficients<T> {
        &self.coeffs
    }

    fn rhs(&self, u: &SpectralField<T>) -> Result<SpectralField<T>, SpectralError> {
        if self.linear_only {
            let mut z = SpectralField::zeros(*u.grid(), u.real);
            z.time = u.time;
            Ok(z)
        } else {
            self.ops.nonlinear_term(u)
        }
    }

    /// Advances `u` by one step.
    pub fn step(&self, u: &SpectralField<T>) -> Result<SpectralField<T>, SpectralError> {
        let c = &self.coeffs;
        let nv = self.rhs(u)?;

        let stage = |base: &SpectralField<T>, forcing: &[Complex<T>]| {
            let mut out = base.clone();
            for (j, x) in out.coeffs_mut().iter_mut().enumerate() {
                *x = *x * c.half[j] + forcing[j] * c.weights[j].half_step;
            }
            out
        };

        let a = stage(u, nv.coeffs());
        let na = self.rhs(&a)?;
        let b = stage(u, na.coeffs());
        let nb = self.rhs(&b)?;
        let two = T::one() + T::one();
        let forcing: Vec<Complex<T>> = nb
            .coeffs()
            .iter()
            .zip(nv.coeffs())
            .map(|(&y, &x)| y * two - x)
            .collect();
        let cc = stage(&a, &forcing);
        let nc = self.rhs(&cc)?;

        let mut out = u.clone();
        for (j, x) in out.coeffs_mut().iter_mut().enumerate() {
            let w = c.weights[j];
            *x = *x * c.full[j]
                + nv.coeffs()[j] * w.f1
                + (na.coeffs()[j] + nb.coeffs()[j]) * (two * w.f2)
                + nc.coeffs()[j] * w.f3;
        }
        if u.real {
            out.symmetrize();
        }
        if u.is_half_space() {
            let half = (u.grid().n_collocation() / 2) as i64;
            for k in -half..=0 {
                out.set(k, Complex::zero());
            }
        }
        out.truncate();
        out.time = u.time + c.dt;
        Ok(out)
    }
}

/// One ETDRK4 step of `u` under `cfg`.
pub fn step<T: FftNum + Float + FloatConst + Real>(
    u: &SpectralField<T>,
    coeffs: &EtdCoefficients<T>,
    cfg: &SolverConfig<T>,
) -> Result<SpectralField<T>, SolverError> {
    let integrator = Integrator {
        ops: SpectralOps::with_method(cfg.grid, cfg.product),
        coeffs: coeffs.clone(),
        linear_only: cfg.linear_only,
    };
    let out = integrator.step(u)?;
    if out.has_non_finite() {
        return Err(SolverError::NonFinite { step: 1 });
    }
    Ok(out)
}

/// Integrates from the configured initial condition to `t_end`.
pub fn run<T: FftNum + Float + FloatConst + Real>(
    cfg: &SolverConfig<T>,
) -> Result<SpectralField<T>, SolverError> {
    run_with(cfg, |_, _| {})
}

/// Like [`run`], calling `snapshot(step_index, &field)` after every step.
pub fn run_with<T, F>(cfg: &SolverConfig<T>, mut snapshot: F) -> Result<SpectralField<T>, SolverError>
where
    T: FftNum + Float + FloatConst + Real,
    F: FnMut(usize, &SpectralField<T>),
{
    let n_steps = cfg.n_steps()?;
    let integrator = Integrator::new(cfg);
    let mut u = cfg.initial_field();
    u.truncate();
    for index in 1..=n_steps {
        u = integrator.step(&u)?;
        if u.has_non_finite() {
            return Err(SolverError::NonFinite { step: index });
        }
        snapshot(index, &u);
    }
    Ok(u)
}
