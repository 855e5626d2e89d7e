//! Exact Fourier coefficients for data supported on the positive half line.
//!
//! With `u0(x) = i A e^{ix}` every coefficient factors as
//! `u_hat(k, t) = i A^k v_hat(k, t)`, where `v_hat` does not depend on `A` and
//! obeys the real recursion
//!
//! ```text
//! v_hat(1, t) = e^{-rho(1) t}
//! v_hat(k, t) = (k/2) int_0^t e^{-(t-s) rho(k)} sum_{p=1}^{k-1} v_hat(p, s) v_hat(k-p, s) ds
//! ```
//!
//! Each `v_hat(k, .)` is a finite sum `sum c t^m e^{-lambda t}` whose rates are
//! integer combinations `lambda = sum_p n_p rho(p)` with `sum_p p n_p = k`.
//! Rates are keyed by the multiplicity vector, so merging like terms is exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dissipation::DissipationSymbol;
use crate::scalar::{total_cmp, with_precision, BigReal, Real};

/// Default bound on the number of terms of one coefficient.
pub const DEFAULT_TERM_CAP: usize = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("the highest wavenumber must be at least 1")]
    EmptyRange,
    #[error("coefficient k = {k} needs {terms} terms, above the cap of {cap}")]
    TermCap { k: usize, terms: usize, cap: usize },
}

/// Multiplicities `(n_1, n_2, ...)` of the rate `sum_p n_p rho(p)`.
///
/// Stored without trailing zeros so equal rates compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RateKey(Vec<u32>);

impl RateKey {
    /// The zero rate.
    pub fn zero() -> Self {
        RateKey(Vec::new())
    }

    /// The rate `rho(k)`.
    pub fn singleton(k: usize) -> Self {
        assert!(k >= 1, "wavenumbers start at 1");
        let mut m = vec![0; k];
        m[k - 1] = 1;
        RateKey(m)
    }

    pub fn from_multiplicities(mut m: Vec<u32>) -> Self {
        while m.last() == Some(&0) {
            m.pop();
        }
        RateKey(m)
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.0
    }

    pub fn multiplicity(&self, p: usize) -> u32 {
        self.0.get(p.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &RateKey) -> RateKey {
        let (long, short) = if self.0.len() >= other.0.len() {
            (&self.0, &other.0)
        } else {
            (&other.0, &self.0)
        };
        let mut m = long.clone();
        for (a, b) in m.iter_mut().zip(short) {
            *a += b;
        }
        RateKey(m)
    }

    /// `sum_p p n_p`.
    pub fn wavenumber(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &n)| (i + 1) * n as usize)
            .sum()
    }

    /// `sum_p n_p rho(p)` with `rates[p - 1] = rho(p)`.
    pub fn rate<T: Real>(&self, rates: &[T]) -> T {
        self.0
            .iter()
            .zip(rates)
            .filter(|(&n, _)| n != 0)
            .fold(T::zero(), |acc, (&n, r)| acc + T::from_i64(n as i64) * r.clone())
    }
}

/// One exponential-polynomial term `coeff * t^degree * e^{-rate t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<'a, T> {
    pub key: &'a RateKey,
    pub degree: u32,
    pub coeff: &'a T,
}

/// `sum c t^m e^{-lambda t}` with exact rate keys; zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum<T> {
    terms: BTreeMap<(RateKey, u32), T>,
}

impl<T: Real> Default for ExpSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> ExpSum<T> {
    pub fn new() -> Self {
        ExpSum {
            terms: BTreeMap::new(),
        }
    }

    pub fn single(key: RateKey, degree: u32, coeff: T) -> Self {
        let mut s = Self::new();
        s.add_term(key, degree, coeff);
        s
    }

    /// Adds `coeff t^degree e^{-rate(key) t}`, merging with a like term.
    pub fn add_term(&mut self, key: RateKey, degree: u32, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((key, degree)) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                let merged = slot.get().clone() + coeff;
                if merged.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = merged;
                }
            }
        }
    }

    pub fn merge(&mut self, other: ExpSum<T>) {
        for ((key, degree), coeff) in other.terms {
            self.add_term(key, degree, coeff);
        }
    }

    pub fn scale(&mut self, factor: &T) {
        for c in self.terms.values_mut() {
            *c = c.clone() * factor.clone();
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = Term<'_, T>> {
        self.terms.iter().map(|((key, degree), coeff)| Term {
            key,
            degree: *degree,
            coeff,
        })
    }

    /// Highest power of `t` present.
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|(_, m)| *m).max().unwrap_or(0)
    }

    /// True when every key satisfies `sum_p p n_p = k`.
    pub fn conserves_wavenumber(&self, k: usize) -> bool {
        self.terms.keys().all(|(key, _)| key.wavenumber() == k)
    }

    /// `sum c t^m e^{-lambda t}`, largest terms first.
    pub fn evaluate(&self, t: &T, rates: &[T]) -> T {
        let mut values: Vec<T> = self
            .terms()
            .map(|term| {
                let lambda = term.key.rate(rates);
                let power = if term.degree == 0 {
                    T::one()
                } else {
                    t.powi(term.degree as i32)
                };
                term.coeff.clone() * power * (-(lambda * t.clone())).exp()
            })
            .collect();
        values.sort_by(|a, b| total_cmp(&b.abs(), &a.abs()));
        values.into_iter().fold(T::zero(), |acc, v| acc + v)
    }
}

/// Termwise product: rates add, degrees add, coefficients multiply.
pub fn convolve<T: Real>(a: &ExpSum<T>, b: &ExpSum<T>) -> ExpSum<T> {
    let mut out = ExpSum::new();
    for x in a.terms() {
        for y in b.terms() {
            out.add_term(
                x.key.add(y.key),
                x.degree + y.degree,
                x.coeff.clone() * y.coeff.clone(),
            );
        }
    }
    out
}

/// Relative distance below which a rate counts as resonant with `rho(k)`.
pub fn resonance_tolerance<T: Real>() -> T {
    T::from_f64(2.0).powi(-(T::mantissa_bits() as i32) / 2)
}

/// `int_0^t e^{-(t-s) rho(k)} s(s) ds` in closed form.
///
/// Non-resonant terms use the antiderivative of `s^m e^{(rho - lambda) s}`;
/// a rate equal to `rho(k)` gives `t^{m+1}/(m+1) e^{-rho(k) t}`, and a rate
/// within [`resonance_tolerance`] of it uses four terms of the Taylor series
/// in `rho(k) - lambda`.
pub fn integrate_against_kernel<T: Real>(s: &ExpSum<T>, k: usize, rates: &[T]) -> ExpSum<T> {
    let target = RateKey::singleton(k);
    let rho = rates[k - 1].clone();
    let tolerance = resonance_tolerance::<T>() * rho.abs();
    let mut out = ExpSum::new();
    for term in s.terms() {
        let m = term.degree;
        let c = term.coeff.clone();
        let delta = if *term.key == target {
            T::zero()
        } else {
            rho.clone() - term.key.rate(rates)
        };
        if delta.abs() <= tolerance {
            // e^{-rho t} sum_j delta^j / j! * t^{m+j+1} / (m+j+1)
            let taylor_terms = if delta.is_zero() { 1 } else { 4 };
            let mut factor = T::one();
            for j in 0..taylor_terms {
                if j > 0 {
                    factor = factor * delta.clone() / T::from_i64(j as i64);
                }
                let degree = m + j + 1;
                out.add_term(
                    target.clone(),
                    degree,
                    c.clone() * factor.clone() / T::from_i64(degree as i64),
                );
            }
        } else {
            // J_m = t^m e^{-lambda t}/delta - (m/delta) J_{m-1},
            // J_0 = (e^{-lambda t} - e^{-rho t})/delta
            let inv = T::one() / delta;
            let mut scale = c;
            for j in (0..=m).rev() {
                out.add_term(term.key.clone(), j, scale.clone() * inv.clone());
                if j == 0 {
                    out.add_term(target.clone(), 0, -(scale.clone() * inv.clone()));
                } else {
                    scale = -(scale * T::from_i64(j as i64) * inv.clone());
                }
            }
        }
    }
    out
}

/// `v_hat(k, .)` for `k = 1..=k_max`, with the rates they were built from.
#[derive(Debug, Clone)]
pub struct HalfSpaceSolution<T> {
    pub symbol: DissipationSymbol,
    pub amplitude: Complex<T>,
    /// `rates[p - 1] = rho(p)`
    pub rates: Vec<T>,
    coefficients: Vec<ExpSum<T>>,
}

impl<T: Real> HalfSpaceSolution<T> {
    pub fn k_max(&self) -> usize {
        self.coefficients.len()
    }

    /// `v_hat(k, .)`, `1 <= k <= k_max`.
    pub fn vhat(&self, k: usize) -> &ExpSum<T> {
        &self.coefficients[k - 1]
    }

    pub fn evaluate(&self, k: usize, t: &T) -> T {
        self.vhat(k).evaluate(t, &self.rates)
    }

    /// `v_hat(k, t)` for every `k`.
    pub fn evaluate_all(&self, t: &T) -> Vec<T> {
        (1..=self.k_max()).map(|k| self.evaluate(k, t)).collect()
    }

    /// `u_hat(k, t) = i A^k v_hat(k, t)`.
    pub fn u_hat(&self, k: usize, t: &T) -> Complex<T> {
        let mut power = Complex::new(T::one(), T::zero());
        for _ in 0..k {
            power = power * self.amplitude.clone();
        }
        Complex::new(T::zero(), T::one()) * power * self.evaluate(k, t)
    }

    /// Wavenumbers whose `v_hat(k, t)` is not strictly positive.
    pub fn sign_flips(&self, t: &T) -> Vec<usize> {
        (1..=self.k_max())
            .filter(|&k| self.evaluate(k, t) <= T::zero())
            .collect()
    }

    pub fn term_counts(&self) -> Vec<usize> {
        self.coefficients.iter().map(ExpSum::len).collect()
    }
}

/// Builds `v_hat(k, .)` for `k = 1..=k_max` by the half-space recursion.
pub fn compute_coefficients<T: Real>(
    k_max: usize,
    symbol: &DissipationSymbol,
    amplitude: Complex<T>,
    term_cap: usize,
) -> Result<HalfSpaceSolution<T>, ExactError> {
    if k_max == 0 {
        return Err(ExactError::EmptyRange);
    }
    let rates: Vec<T> = (1..=k_max as i64).map(|p| symbol.rate(p)).collect();
    let mut coefficients: Vec<ExpSum<T>> = Vec::with_capacity(k_max);
    coefficients.push(ExpSum::single(RateKey::singleton(1), 0, T::one()));

    for k in 2..=k_max {
        // sum_{p=1}^{k-1} v(p) v(k-p) = 2 sum_{p < k/2} v(p) v(k-p) + [k even] v(k/2)^2
        let mut forcing = ExpSum::new();
        for p in 1..=(k - 1) / 2 {
            let mut pair = convolve(&coefficients[p - 1], &coefficients[k - p - 1]);
            pair.scale(&T::from_i64(2));
            forcing.merge(pair);
            check_cap(k, forcing.len(), term_cap)?;
        }
        if k % 2 == 0 {
            let half = &coefficients[k / 2 - 1];
            forcing.merge(convolve(half, half));
            check_cap(k, forcing.len(), term_cap)?;
        }
        let mut next = integrate_against_kernel(&forcing, k, &rates);
        next.scale(&(T::from_i64(k as i64) / T::from_i64(2)));
        check_cap(k, next.len(), term_cap)?;
        debug_assert!(next.conserves_wavenumber(k));
        coefficients.push(next);
    }

    Ok(HalfSpaceSolution {
        symbol: *symbol,
        amplitude,
        rates,
        coefficients,
    })
}

fn check_cap(k: usize, terms: usize, cap: usize) -> Result<(), ExactError> {
    if terms > cap {
        Err(ExactError::TermCap { k, terms, cap })
    } else {
        Ok(())
    }
}

/// `v_hat(k, t)` for `k = 1..=k_max` at `bits` of working precision.
pub fn evaluate_at_precision(
    k_max: usize,
    symbol: &DissipationSymbol,
    t: f64,
    bits: u32,
    term_cap: usize,
) -> Result<(Vec<BigReal>, Vec<usize>), ExactError> {
    with_precision(bits, || {
        let sol = compute_coefficients::<BigReal>(
            k_max,
            symbol,
            Complex::new(BigReal::one(), BigReal::zero()),
            term_cap,
        )?;
        let t = BigReal::from_f64(t);
        Ok((sol.evaluate_all(&t), sol.term_counts()))
    })
}

/// Agreement between two working precisions on the last coefficient.
#[derive(Debug, Clone)]
pub struct ConsistencyCheck {
    pub k: usize,
    pub low_bits: u32,
    pub high_bits: u32,
    pub low: BigReal,
    pub high: BigReal,
    /// `-log10 |low - high| / |high|`, capped at the low precision's digits.
    pub digits_agreed: f64,
}

impl ConsistencyCheck {
    pub fn passes(&self, required_digits: f64) -> bool {
        self.digits_agreed >= required_digits
    }
}

/// Digits to which `a` and `b` agree relative to `b`.
pub fn agreeing_digits(a: &BigReal, b: &BigReal) -> f64 {
    with_precision(a.precision().max(b.precision()), || {
        let diff = (a.clone() - b.clone()).abs();
        if diff.is_zero() {
            return f64::INFINITY;
        }
        let scale = b.abs();
        if scale.is_zero() {
            return f64::NEG_INFINITY;
        }
        let rel = diff / scale;
        -(rel.ln() / BigReal::from_i64(10).ln()).to_f64()
    })
}

/// Recomputes `v_hat(k_max, t)` at `high_bits` and compares with the value
/// obtained at `low_bits`.
pub fn precision_consistency(
    k_max: usize,
    symbol: &DissipationSymbol,
    t: f64,
    low: &BigReal,
    low_bits: u32,
    high_bits: u32,
    term_cap: usize,
) -> Result<ConsistencyCheck, ExactError> {
    let (values, _) = evaluate_at_precision(k_max, symbol, t, high_bits, term_cap)?;
    let high = values.last().cloned().expect("k_max >= 1");
    let cap = low_bits as f64 * std::f64::consts::LOG10_2;
    let digits = agreeing_digits(low, &high).min(cap);
    Ok(ConsistencyCheck {
        k: k_max,
        low_bits,
        high_bits,
        low: low.clone(),
        high,
        digits_agreed: digits,
    })
}

/// Orders terms by magnitude at `t`; used for diagnostics.
pub fn dominant_terms<T: Real>(s: &ExpSum<T>, t: &T, rates: &[T], count: usize) -> Vec<(RateKey, u32, T)> {
    let mut out: Vec<(RateKey, u32, T)> = s
        .terms()
        .map(|term| {
            let value = term.coeff.clone()
                * t.powi(term.degree as i32)
                * (-(term.key.rate(rates) * t.clone())).exp();
            (term.key.clone(), term.degree, value)
        })
        .collect();
    out.sort_by(|a, b| match total_cmp(&b.2.abs(), &a.2.abs()) {
        Ordering::Equal => a.0.cmp(&b.0),
        other => other,
    });
    out.truncate(count);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_symbol() -> DissipationSymbol {
        DissipationSymbol::exponential(1.0, 1.0).unwrap()
    }

    #[test]
    fn rate_key_algebra() {
        let a = RateKey::singleton(1);
        let b = RateKey::singleton(3);
        let c = a.add(&a).add(&b);
        assert_eq!(c.multiplicities(), &[2, 0, 1]);
        assert_eq!(c.wavenumber(), 5);
        assert_eq!(RateKey::from_multiplicities(vec![1, 0, 0]), a);
        assert_eq!(c.rate(&[1.0, 10.0, 100.0]), 102.0);
    }

    #[test]
    fn convolve_of_first_mode_doubles_rate() {
        let v1 = ExpSum::single(RateKey::singleton(1), 0, 1.0f64);
        let sq = convolve(&v1, &v1);
        assert_eq!(sq.len(), 1);
        let term = sq.terms().next().unwrap();
        assert_eq!(term.key.multiplicities(), &[2]);
        assert_eq!(*term.coeff, 1.0);
        assert!(convolve(&ExpSum::<f64>::new(), &v1).is_empty());
    }

    #[test]
    fn integrate_constant_forcing() {
        // rates chosen so rho(1) = r
        let r = 3.0f64;
        let s = ExpSum::single(RateKey::zero(), 0, 1.0);
        let out = integrate_against_kernel(&s, 1, &[r]);
        for &t in &[0.0, 0.3, 1.0, 2.5] {
            let want = (1.0 - (-r * t).exp()) / r;
            assert!((out.evaluate(&t, &[r]) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn integrate_resonant_term() {
        let rates = [2.0f64, 5.0];
        let s = ExpSum::single(RateKey::singleton(2), 0, 1.0);
        let out = integrate_against_kernel(&s, 2, &rates);
        assert_eq!(out.len(), 1);
        for &t in &[0.5, 1.0, 2.0] {
            assert!((out.evaluate(&t, &rates) - t * (-5.0 * t).exp()).abs() < 1e-15);
        }
        // the non-resonant closed form approaches the resonant one
        let near = [2.5f64 - 1e-6, 5.0];
        let s = ExpSum::single(RateKey::from_multiplicities(vec![2]), 0, 1.0);
        let out = integrate_against_kernel(&s, 2, &near);
        let t = 1.0;
        assert!((out.evaluate(&t, &near) - t * (-5.0 * t).exp()).abs() < 1e-8);
    }

    #[test]
    fn integrate_higher_degree_matches_quadrature() {
        // int_0^t e^{-(t-s) 4} s^2 e^{-1.5 s} ds against Simpson's rule
        let rates = [1.5f64, 4.0];
        let s = ExpSum::single(RateKey::singleton(1), 2, 1.0);
        let out = integrate_against_kernel(&s, 2, &rates);
        let t = 0.8;
        let n = 2000;
        let h = t / n as f64;
        let f = |x: f64| (-(t - x) * 4.0).exp() * x * x * (-1.5 * x).exp();
        let mut simpson = f(0.0) + f(t);
        for i in 1..n {
            simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        simpson *= h / 3.0;
        assert!((out.evaluate(&t, &rates) - simpson).abs() < 1e-12);
    }

    #[test]
    fn near_resonance_uses_taylor_branch() {
        let rho2 = 5.0f64;
        let lambda = rho2 - 1e-10;
        let rates = [lambda / 2.0, rho2];
        let s = ExpSum::single(RateKey::from_multiplicities(vec![2]), 0, 1.0);
        let out = integrate_against_kernel(&s, 2, &rates);
        assert!(out.terms().all(|t| *t.key == RateKey::singleton(2)));
        let t = 1.0;
        let exact = (-rho2 * t).exp() * ((rho2 - lambda) * t).exp_m1() / (rho2 - lambda);
        assert!((out.evaluate(&t, &rates) - exact).abs() < 1e-15);
    }

    #[test]
    fn first_two_coefficients_closed_form() {
        let sol =
            compute_coefficients::<f64>(2, &exp_symbol(), Complex::new(1.0, 0.0), DEFAULT_TERM_CAP)
                .unwrap();
        assert_eq!(sol.vhat(1).len(), 1);
        let e = std::f64::consts::E;
        let want = ((-2.0 * e).exp() - (-e * e).exp()) / (e * e - 2.0 * e);
        assert!((sol.evaluate(2, &1.0) - want).abs() < 1e-17);
        assert!((want - 1.913_678_027_629_017e-3).abs() < 1e-17);
        assert!((sol.evaluate(1, &1.0) - 0.065_988_035_845_312_53).abs() < 1e-16);
    }

    #[test]
    fn initial_values() {
        let sol =
            compute_coefficients::<f64>(6, &exp_symbol(), Complex::new(1.0, 0.0), DEFAULT_TERM_CAP)
                .unwrap();
        assert_eq!(sol.evaluate(1, &0.0), 1.0);
        for k in 2..=6 {
            assert!(sol.evaluate(k, &0.0).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn support_is_conserved() {
        let sol = with_precision(128, || {
            compute_coefficients::<BigReal>(
                12,
                &DissipationSymbol::cosh(1.0, 1.0).unwrap(),
                Complex::new(BigReal::one(), BigReal::zero()),
                DEFAULT_TERM_CAP,
            )
            .unwrap()
        });
        for k in 1..=12 {
            assert!(sol.vhat(k).conserves_wavenumber(k));
        }
    }

    #[test]
    fn resonant_symbol_produces_polynomial_terms() {
        // rho(k) = |k| makes rho(2) = 2 rho(1)
        let sym = DissipationSymbol::power_laplacian(1.0, 0.5).unwrap();
        let sol = compute_coefficients::<f64>(3, &sym, Complex::new(1.0, 0.0), DEFAULT_TERM_CAP)
            .unwrap();
        assert!(sol.vhat(2).max_degree() >= 1);
        // v(2, t) = t e^{-2t}
        let t = 0.7;
        assert!((sol.evaluate(2, &t) - t * (-2.0 * t).exp()).abs() < 1e-15);
    }

    #[test]
    fn term_cap_names_offending_wavenumber() {
        let err = compute_coefficients::<f64>(8, &exp_symbol(), Complex::new(1.0, 0.0), 5)
            .unwrap_err();
        match err {
            ExactError::TermCap { k, cap, .. } => {
                assert!(k <= 8);
                assert_eq!(cap, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            compute_coefficients::<f64>(0, &exp_symbol(), Complex::new(1.0, 0.0), 5).unwrap_err(),
            ExactError::EmptyRange
        );
    }

    #[test]
    fn amplitude_factorization() {
        let a = Complex::new(0.5, 0.25);
        let sol = compute_coefficients::<f64>(4, &exp_symbol(), a, DEFAULT_TERM_CAP).unwrap();
        let u3 = sol.u_hat(3, &1.0);
        let want = Complex::new(0.0, 1.0) * a * a * a * sol.evaluate(3, &1.0);
        assert!((u3 - want).norm() < 1e-18);
    }
}
