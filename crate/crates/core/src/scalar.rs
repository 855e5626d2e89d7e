//! Scalar abstraction shared by the solver, the exact engine and the
//! extrapolation pipeline.
//!
//! [`Real`] is implemented for `f32`, `f64` and the MPFR-backed [`BigReal`].
//! Everything downstream of this module is written once against the trait.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{Num, One, Zero};
use rug::float::ParseFloatError;
use rug::Float;

/// Real scalar with the transcendental functions the crate needs.
pub trait Real:
    Clone + Debug + Display + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn to_f64(&self) -> f64;

    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn cosh(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn powf(&self, exponent: &Self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn is_finite(&self) -> bool;

    fn ln_2() -> Self;
    fn pi() -> Self;

    /// Significand width in bits at the current working precision.
    fn mantissa_bits() -> u32;

    /// Distance from one to the next representable value.
    fn epsilon() -> Self {
        Self::from_f64(2.0).powi(1 - Self::mantissa_bits() as i32)
    }

    /// Decimal rendering that parses back to the identical value.
    fn to_decimal(&self) -> String;
    fn parse_decimal(s: &str) -> Option<Self>;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

macro_rules! impl_real_for_primitive {
    ($t:ident) => {
        impl Real for $t {
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn from_i64(n: i64) -> Self {
                n as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn exp(&self) -> Self {
                $t::exp(*self)
            }
            fn ln(&self) -> Self {
                $t::ln(*self)
            }
            fn cosh(&self) -> Self {
                $t::cosh(*self)
            }
            fn sqrt(&self) -> Self {
                $t::sqrt(*self)
            }
            fn abs(&self) -> Self {
                $t::abs(*self)
            }
            fn powf(&self, exponent: &Self) -> Self {
                $t::powf(*self, *exponent)
            }
            fn powi(&self, n: i32) -> Self {
                $t::powi(*self, n)
            }
            fn is_finite(&self) -> bool {
                $t::is_finite(*self)
            }
            fn ln_2() -> Self {
                std::$t::consts::LN_2
            }
            fn pi() -> Self {
                std::$t::consts::PI
            }
            fn mantissa_bits() -> u32 {
                $t::MANTISSA_DIGITS
            }
            fn epsilon() -> Self {
                $t::EPSILON
            }
            fn to_decimal(&self) -> String {
                format!("{:e}", self)
            }
            fn parse_decimal(s: &str) -> Option<Self> {
                s.trim().parse().ok()
            }
        }
    };
}

impl_real_for_primitive!(f32);
impl_real_for_primitive!(f64);

/// Default working precision of [`BigReal`] arithmetic (about 77 decimal digits).
pub const DEFAULT_PRECISION_BITS: u32 = 256;

thread_local! {
    static WORKING_PRECISION: Cell<u32> = const { Cell::new(DEFAULT_PRECISION_BITS) };
}

/// Precision, in bits, given to every newly created [`BigReal`] on this thread.
pub fn working_precision() -> u32 {
    WORKING_PRECISION.with(Cell::get)
}

struct PrecisionGuard(u32);

impl Drop for PrecisionGuard {
    fn drop(&mut self) {
        WORKING_PRECISION.with(|p| p.set(self.0));
    }
}

/// Runs `f` with the thread's working precision set to `bits`, restoring the
/// previous value afterwards (also on unwind).
pub fn with_precision<R>(bits: u32, f: impl FnOnce() -> R) -> R {
    assert!(bits >= 2, "precision must be at least 2 bits");
    let previous = WORKING_PRECISION.with(|p| p.replace(bits));
    let _guard = PrecisionGuard(previous);
    f()
}

/// Number of decimal digits needed for a lossless round trip of a `bits`-bit
/// significand.
pub fn round_trip_digits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
}

/// Arbitrary-precision binary floating-point number.
///
/// Values are created at the thread's [`working_precision`]; arithmetic keeps
/// the precision of the left operand, so a computation run inside a single
/// [`with_precision`] scope is uniform.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(Float);

impl BigReal {
    pub fn new(value: Float) -> Self {
        BigReal(Float::with_val(working_precision(), value))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }

    pub fn from_decimal_str(s: &str) -> Result<Self, ParseFloatError> {
        let parsed = Float::parse(s.trim())?;
        Ok(BigReal(Float::with_val(working_precision(), parsed)))
    }
}

impl Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({})", self.to_decimal())
    }
}

impl Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(digits) => write!(f, "{}", self.0.to_string_radix(10, Some(digits.max(1)))),
            None => f.write_str(&self.to_decimal()),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                BigReal($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                BigReal($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);
forward_binop!(Rem, rem);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal(Float::with_val(working_precision(), 0))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal(Float::with_val(working_precision(), 1))
    }
}

impl Num for BigReal {
    type FromStrRadixErr = ParseFloatError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(s, radix as i32)?;
        Ok(BigReal(Float::with_val(working_precision(), parsed)))
    }
}

impl Real for BigReal {
    fn from_f64(x: f64) -> Self {
        BigReal(Float::with_val(working_precision(), x))
    }
    fn from_i64(n: i64) -> Self {
        BigReal(Float::with_val(working_precision(), n))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn exp(&self) -> Self {
        BigReal(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        BigReal(self.0.clone().ln())
    }
    fn cosh(&self) -> Self {
        BigReal(self.0.clone().cosh())
    }
    fn sqrt(&self) -> Self {
        BigReal(self.0.clone().sqrt())
    }
    fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }
    fn powf(&self, exponent: &Self) -> Self {
        BigReal(Float::with_val(self.0.prec(), rug::ops::Pow::pow(&self.0, &exponent.0)))
    }
    fn powi(&self, n: i32) -> Self {
        BigReal(Float::with_val(self.0.prec(), rug::ops::Pow::pow(&self.0, n)))
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn ln_2() -> Self {
        BigReal(Float::with_val(working_precision(), rug::float::Constant::Log2))
    }
    fn pi() -> Self {
        BigReal(Float::with_val(working_precision(), rug::float::Constant::Pi))
    }
    fn mantissa_bits() -> u32 {
        working_precision()
    }
    fn to_decimal(&self) -> String {
        self.0
            .to_string_radix(10, Some(round_trip_digits(self.0.prec())))
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        BigReal::from_decimal_str(s).ok()
    }
}

/// Total order on reals that places NaN last; used for medians and sorting.
pub fn total_cmp<T: Real>(a: &T, b: &T) -> Ordering {
    let nan = |x: &T| x.partial_cmp(x).is_none();
    a.partial_cmp(b).unwrap_or_else(|| match (nan(a), nan(b)) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        _ => Ordering::Less,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_scope_is_restored() {
        assert_eq!(working_precision(), DEFAULT_PRECISION_BITS);
        let inner = with_precision(384, || BigReal::one().precision());
        assert_eq!(inner, 384);
        assert_eq!(working_precision(), DEFAULT_PRECISION_BITS);
    }

    #[test]
    fn big_decimal_round_trip_is_lossless() {
        let x = BigReal::from_i64(-1).exp() / BigReal::from_i64(3);
        let back = BigReal::parse_decimal(&x.to_decimal()).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn primitive_decimal_round_trip() {
        let x = 0.1f64 / 3.0;
        assert_eq!(f64::parse_decimal(&x.to_decimal()), Some(x));
    }

    #[test]
    fn epsilon_tracks_precision() {
        let eps = with_precision(100, BigReal::epsilon);
        assert_eq!(eps.to_f64(), 2f64.powi(-99));
        assert_eq!(<f64 as Real>::epsilon(), f64::EPSILON);
    }

    #[test]
    fn big_exp_of_minus_e() {
        let e = BigReal::one().exp();
        let v = (-e).exp();
        assert!((v.to_f64() - 0.065_988_035_845_312_53).abs() < 1e-16);
    }
}
