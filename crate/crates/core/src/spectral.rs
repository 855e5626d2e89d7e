//! Periodic grid, discrete Fourier transforms and the dealiased quadratic
//! product on `[0, 2 pi)`.
//!
//! Coefficients follow the Fourier-series convention
//! `u(x) = sum_k u_hat(k) e^{ikx}`, so the forward transform carries the
//! `1/N` factor.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, FloatConst, Zero};
use rustfft::{Fft, FftNum, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("collocation count must be even and at least 8, got {0}")]
    BadCollocation(usize),
    #[error("dealias fraction {num}/{den} is not in (0, 1]")]
    BadDealiasFraction { num: u32, den: u32 },
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("fields live on different grids ({left} vs {right} collocation points)")]
    GridMismatch { left: usize, right: usize },
}

/// Uniform collocation grid on the `2 pi`-periodic line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n_collocation: usize,
    dealias_num: u32,
    dealias_den: u32,
}

impl Grid {
    /// Grid with the usual 2/3 truncation.
    pub fn new(n_collocation: usize) -> Result<Self, SpectralError> {
        Self::with_dealias(n_collocation, 2, 3)
    }

    pub fn with_dealias(n_collocation: usize, num: u32, den: u32) -> Result<Self, SpectralError> {
        if n_collocation < 8 || !n_collocation.is_multiple_of(2) {
            return Err(SpectralError::BadCollocation(n_collocation));
        }
        if num == 0 || den == 0 || num > den {
            return Err(SpectralError::BadDealiasFraction { num, den });
        }
        Ok(Grid {
            n_collocation,
            dealias_num: num,
            dealias_den: den,
        })
    }

    pub fn n_collocation(&self) -> usize {
        self.n_collocation
    }

    pub fn dealias_fraction(&self) -> (u32, u32) {
        (self.dealias_num, self.dealias_den)
    }

    /// Largest retained wavenumber, `floor(fraction * N / 2)`.
    pub fn k_max(&self) -> i64 {
        (self.dealias_num as usize * self.n_collocation / (2 * self.dealias_den as usize)) as i64
    }

    pub fn domain_length<T: Float + FloatConst>() -> T {
        T::PI() + T::PI()
    }

    /// Collocation points `x_j = 2 pi j / N`.
    pub fn points<T: Float + FloatConst>(&self) -> Vec<T> {
        let n = T::from(self.n_collocation).unwrap();
        (0..self.n_collocation)
            .map(|j| Self::domain_length::<T>() * T::from(j).unwrap() / n)
            .collect()
    }

    /// Storage slot of wavenumber `k` in FFT order.
    pub fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.n_collocation as i64) as usize
    }

    /// Wavenumber stored in slot `j`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n_collocation;
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }
}

/// Fourier coefficients `u_hat(k)` for `k` in `-N/2 .. N/2 - 1`, stored in
/// FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    grid: Grid,
    coeffs: Vec<Complex<T>>,
    /// Hermitian symmetry `u_hat(-k) = conj(u_hat(k))` is expected.
    pub real: bool,
    pub time: T,
}

impl<T: Float> SpectralField<T> {
    pub fn zeros(grid: Grid, real: bool) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex::zero(); grid.n_collocation],
            real,
            time: T::zero(),
        }
    }

    /// Field with the listed modes set and every other mode zero.
    pub fn from_modes(grid: Grid, real: bool, modes: &[(i64, Complex<T>)]) -> Self {
        let mut field = Self::zeros(grid, real);
        for &(k, c) in modes {
            field.set(k, c);
        }
        field
    }

    pub fn from_coeffs(grid: Grid, real: bool, coeffs: Vec<Complex<T>>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.n_collocation {
            return Err(SpectralError::LengthMismatch {
                expected: grid.n_collocation,
                actual: coeffs.len(),
            });
        }
        Ok(SpectralField {
            grid,
            coeffs,
            real,
            time: T::zero(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// `u_hat(k)`; wavenumbers outside the stored band read as zero.
    pub fn get(&self, k: i64) -> Complex<T> {
        let half = (self.grid.n_collocation / 2) as i64;
        if k < -half || k >= half {
            Complex::zero()
        } else {
            self.coeffs[self.grid.slot(k)]
        }
    }

    pub fn set(&mut self, k: i64, value: Complex<T>) {
        let half = (self.grid.n_collocation / 2) as i64;
        assert!(
            k >= -half && k < half,
            "wavenumber {k} outside the stored band [-{half}, {half})"
        );
        let slot = self.grid.slot(k);
        self.coeffs[slot] = value;
    }

    /// `(k, u_hat(k))` in ascending wavenumber order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        let half = (self.grid.n_collocation / 2) as i64;
        (-half..half).map(move |k| (k, self.get(k)))
    }

    pub fn max_abs(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc.max(c.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when every mode with `k <= 0` is exactly zero.
    pub fn is_half_space(&self) -> bool {
        let half = (self.grid.n_collocation / 2) as i64;
        (-half..=0).all(|k| self.get(k).is_zero())
    }

    /// Any non-finite coefficient.
    pub fn has_non_finite(&self) -> bool {
        self.coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
    }

    /// Zeroes every mode with `|k| > k_max`.
    pub fn truncate(&mut self) {
        let k_max = self.grid.k_max();
        let grid = self.grid;
        for (j, c) in self.coeffs.iter_mut().enumerate() {
            if grid.wavenumber(j).abs() > k_max {
                *c = Complex::zero();
            }
        }
    }

    /// Forces `u_hat(-k) = conj(u_hat(k))` and a real mean.
    pub fn symmetrize(&mut self) {
        let half = (self.grid.n_collocation / 2) as i64;
        let two = T::one() + T::one();
        let zero = self.get(0);
        self.set(0, Complex::new(zero.re, T::zero()));
        for k in 1..half {
            let avg = (self.get(k) + self.get(-k).conj()) / two;
            self.set(k, avg);
            self.set(-k, avg.conj());
        }
        let nyquist = self.get(-half);
        self.set(-half, Complex::new(nyquist.re, T::zero()));
    }

    /// First positive wavenumber at which `ln |u_hat(k)|` stops being
    /// concave, `|u_hat(k)| |u_hat(k-2)| > |u_hat(k-1)|^2`, or a mode
    /// vanishes. A spectrum decaying like `e^{-F(k)}` with convex `F` stays
    /// log-concave until rounding noise takes over.
    pub fn noise_onset(&self) -> Option<i64> {
        let logs: Vec<T> = (1..=self.grid.k_max())
            .map(|k| self.get(k).norm().ln())
            .collect();
        for (i, &l) in logs.iter().enumerate() {
            if !l.is_finite() {
                return Some(i as i64 + 1);
            }
            if i >= 2 && l + logs[i - 2] > logs[i - 1] + logs[i - 1] {
                return Some(i as i64 + 1);
            }
        }
        None
    }

    /// `(k, noisy)` for `k = 1..=k_max`; every mode from
    /// [`noise_onset`](Self::noise_onset) on is flagged.
    pub fn noise_flags(&self) -> Vec<(i64, bool)> {
        let onset = self.noise_onset().unwrap_or(i64::MAX);
        (1..=self.grid.k_max()).map(|k| (k, k >= onset)).collect()
    }

    /// `a * self + b * other`, modewise.
    pub fn axpby(&self, a: Complex<T>, other: &Self, b: Complex<T>) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
            real: self.real && other.real,
            time: self.time,
        }
    }
}

/// How the truncated quadratic product is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductMethod {
    /// Pseudo-spectral product on a grid of at least `3 k_max + 1` points.
    #[default]
    Padded,
    /// `O(k_max^2)` sum over retained mode pairs.
    Direct,
}

/// FFT plans for one grid, reused across transforms.
#[derive(Clone)]
pub struct SpectralOps<T: FftNum> {
    grid: Grid,
    method: ProductMethod,
    padded_len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    padded_forward: Arc<dyn Fft<T>>,
    padded_inverse: Arc<dyn Fft<T>>,
}

impl<T: FftNum + Float> SpectralOps<T> {
    pub fn new(grid: Grid) -> Self {
        Self::with_method(grid, ProductMethod::Padded)
    }

    pub fn with_method(grid: Grid, method: ProductMethod) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n_collocation;
        let padded_len = n.max(3 * grid.k_max() as usize + 1);
        SpectralOps {
            grid,
            method,
            padded_len,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            padded_forward: planner.plan_fft_forward(padded_len),
            padded_inverse: planner.plan_fft_inverse(padded_len),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn method(&self) -> ProductMethod {
        self.method
    }

    /// `u_hat(k) = (1/N) sum_j u(x_j) e^{-i k x_j}`.
    pub fn forward(&self, values: &[Complex<T>], real: bool) -> Result<SpectralField<T>, SpectralError> {
        let n = self.grid.n_collocation;
        if values.len() != n {
            return Err(SpectralError::LengthMismatch {
                expected: n,
                actual: values.len(),
            });
        }
        let mut buffer = values.to_vec();
        self.forward.process(&mut buffer);
        let scale = T::one() / T::from(n).unwrap();
        for c in &mut buffer {
            *c = *c * scale;
        }
        SpectralField::from_coeffs(self.grid, real, buffer)
    }

    /// `u(x_j) = sum_k u_hat(k) e^{i k x_j}`.
    pub fn inverse(&self, field: &SpectralField<T>) -> Result<Vec<Complex<T>>, SpectralError> {
        self.check_grid(field)?;
        let mut buffer = field.coeffs.clone();
        self.inverse.process(&mut buffer);
        Ok(buffer)
    }

    fn check_grid(&self, field: &SpectralField<T>) -> Result<(), SpectralError> {
        if field.grid != self.grid {
            return Err(SpectralError::GridMismatch {
                left: self.grid.n_collocation,
                right: field.grid.n_collocation,
            });
        }
        Ok(())
    }

    /// Fourier coefficients of `a * b` with every mode `|k| > k_max` dropped,
    /// inputs truncated to the same band first.
    pub fn dealiased_product(
        &self,
        a: &SpectralField<T>,
        b: &SpectralField<T>,
    ) -> Result<SpectralField<T>, SpectralError> {
        self.check_grid(a)?;
        self.check_grid(b)?;
        let mut out = match self.method {
            ProductMethod::Padded => self.padded_product(a, b),
            ProductMethod::Direct => self.direct_product(a, b),
        };
        out.real = a.real && b.real;
        out.time = a.time;
        if out.real {
            out.symmetrize();
        }
        if a.is_half_space() && b.is_half_space() {
            let half = (self.grid.n_collocation / 2) as i64;
            for k in -half..=0 {
                out.set(k, Complex::zero());
            }
        }
        out.truncate();
        Ok(out)
    }

    fn padded_product(&self, a: &SpectralField<T>, b: &SpectralField<T>) -> SpectralField<T> {
        let m = self.padded_len;
        let k_max = self.grid.k_max();
        let embed = |field: &SpectralField<T>| {
            let mut buf = vec![Complex::<T>::zero(); m];
            for k in -k_max..=k_max {
                buf[k.rem_euclid(m as i64) as usize] = field.get(k);
            }
            self.padded_inverse.process(&mut buf);
            buf
        };
        let mut physical = embed(a);
        let other = embed(b);
        for (x, y) in physical.iter_mut().zip(&other) {
            *x = *x * *y;
        }
        self.padded_forward.process(&mut physical);
        let scale = T::one() / T::from(m).unwrap();
        let mut out = SpectralField::zeros(self.grid, false);
        for k in -k_max..=k_max {
            out.set(k, physical[k.rem_euclid(m as i64) as usize] * scale);
        }
        out
    }

    fn direct_product(&self, a: &SpectralField<T>, b: &SpectralField<T>) -> SpectralField<T> {
        let k_max = self.grid.k_max();
        let support = |field: &SpectralField<T>| -> Vec<(i64, Complex<T>)> {
            (-k_max..=k_max)
                .map(|k| (k, field.get(k)))
                .filter(|(_, c)| !c.is_zero())
                .collect()
        };
        let (sa, sb) = (support(a), support(b));
        let mut out = SpectralField::zeros(self.grid, false);
        for &(p, x) in &sa {
            for &(q, y) in &sb {
                let k = p + q;
                if k.abs() <= k_max {
                    out.set(k, out.get(k) + x * y);
                }
            }
        }
        out
    }

    /// Spectral form of `-u u_x`: `-(ik/2) (u*u)_hat(k)`, the right-hand side
    /// contribution of the quadratic term.
    pub fn nonlinear_term(&self, u: &SpectralField<T>) -> Result<SpectralField<T>, SpectralError> {
        let mut out = self.dealiased_product(u, u)?;
        let half = T::from(0.5).unwrap();
        for (j, c) in out.coeffs.iter_mut().enumerate() {
            let k = T::from(self.grid.wavenumber(j)).unwrap();
            *c = *c * Complex::new(T::zero(), -k * half);
        }
        Ok(out)
    }
}

/// One-shot forward transform.
pub fn forward_transform<T: FftNum + Float>(
    values: &[Complex<T>],
    grid: &Grid,
) -> Result<SpectralField<T>, SpectralError> {
    let real = values.iter().all(|v| v.im.is_zero());
    SpectralOps::new(*grid).forward(values, real)
}

/// One-shot inverse transform.
pub fn inverse_transform<T: FftNum + Float>(
    field: &SpectralField<T>,
) -> Result<Vec<Complex<T>>, SpectralError> {
    SpectralOps::new(*field.grid()).inverse(field)
}

/// One-shot dealiased product.
pub fn dealiased_product<T: FftNum + Float>(
    a: &SpectralField<T>,
    b: &SpectralField<T>,
    grid: &Grid,
) -> Result<SpectralField<T>, SpectralError> {
    SpectralOps::new(*grid).dealiased_product(a, b)
}

/// One-shot nonlinear term.
pub fn nonlinear_term<T: FftNum + Float>(
    u: &SpectralField<T>,
    grid: &Grid,
) -> Result<SpectralField<T>, SpectralError> {
    SpectralOps::new(*grid).nonlinear_term(u)
}
