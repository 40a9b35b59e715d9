//! Scalar abstraction shared by the numerical kernels.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use f256::f256;
use num_traits::Num;

/// Real scalar usable by the quadrature, special-function, linear-algebra and
/// series code. Implemented for `f32`, `f64` and the 256-bit `f256`.
pub trait Real:
    Num
    + Copy
    + PartialOrd
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn of(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Machine epsilon.
    fn eps() -> Self;
    fn pi() -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powf(self, e: Self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan(self) -> Self;
    fn abs(self) -> Self;
    fn floor(self) -> Self;
    fn is_finite(self) -> bool;

    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }
    fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }
    fn min(self, o: Self) -> Self {
        if o < self {
            o
        } else {
            self
        }
    }
    fn two() -> Self {
        Self::one() + Self::one()
    }
    fn half() -> Self {
        Self::one() / Self::two()
    }
}

macro_rules! impl_native {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn of(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            #[inline]
            fn eps() -> Self {
                <$t>::EPSILON
            }
            #[inline]
            fn pi() -> Self {
                <$t as num_traits::FloatConst>::PI()
            }
            #[inline]
            fn sqrt(self) -> Self {
                num_traits::Float::sqrt(self)
            }
            #[inline]
            fn exp(self) -> Self {
                num_traits::Float::exp(self)
            }
            #[inline]
            fn ln(self) -> Self {
                num_traits::Float::ln(self)
            }
            #[inline]
            fn powf(self, e: Self) -> Self {
                num_traits::Float::powf(self, e)
            }
            #[inline]
            fn powi(self, n: i32) -> Self {
                num_traits::Float::powi(self, n)
            }
            #[inline]
            fn sin(self) -> Self {
                num_traits::Float::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                num_traits::Float::cos(self)
            }
            #[inline]
            fn atan(self) -> Self {
                num_traits::Float::atan(self)
            }
            #[inline]
            fn abs(self) -> Self {
                num_traits::Float::abs(self)
            }
            #[inline]
            fn floor(self) -> Self {
                num_traits::Float::floor(self)
            }
            #[inline]
            fn is_finite(self) -> bool {
                num_traits::Float::is_finite(self)
            }
        }
    };
}

impl_native!(f32);
impl_native!(f64);

impl Real for f256 {
    fn of(x: f64) -> Self {
        f256::from(x)
    }
    fn to_f64(self) -> f64 {
        // f256 has no direct narrowing conversion; its shortest round-trip
        // decimal rendering parses to the correctly rounded f64.
        if self.is_nan() {
            return f64::NAN;
        }
        if self.is_infinite() {
            return if self.is_sign_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        format!("{:e}", self).parse().unwrap_or(f64::NAN)
    }
    fn eps() -> Self {
        f256::EPSILON
    }
    fn pi() -> Self {
        ::f256::consts::PI
    }
    fn sqrt(self) -> Self {
        f256::sqrt(self)
    }
    fn exp(self) -> Self {
        f256::exp(&self)
    }
    fn ln(self) -> Self {
        f256::ln(&self)
    }
    fn powf(self, e: Self) -> Self {
        f256::powf(&self, &e)
    }
    fn powi(self, n: i32) -> Self {
        f256::powi(&self, n)
    }
    fn sin(self) -> Self {
        f256::sin(&self)
    }
    fn cos(self) -> Self {
        f256::cos(&self)
    }
    fn atan(self) -> Self {
        f256::atan(&self)
    }
    fn abs(self) -> Self {
        f256::abs(&self)
    }
    fn floor(self) -> Self {
        f256::floor(&self)
    }
    fn is_finite(self) -> bool {
        f256::is_finite(self)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }
}

impl<T: Real> KahanSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn f256_round_trip() {
        for x in [1.0, -2.5e-300, 3.141592653589793, 1e300, 0.1] {
            assert_eq!(f256::of(x).to_f64(), x);
        }
        let third = f256::one() / f256::of(3.0);
        assert_eq!(third.to_f64(), 1.0 / 3.0);
    }

    #[test]
    fn f256_elementary() {
        let x = f256::of(0.7);
        assert!((x.exp().ln() - x).abs() < f256::of(1e-60));
        assert!((f256::pi().to_f64() - std::f64::consts::PI).abs() < 1e-16);
        assert!((f256::of(2.0).sqrt().to_f64() - std::f64::consts::SQRT_2).abs() < 1e-16);
    }

    #[test]
    fn kahan_recovers_small_terms() {
        let mut s = KahanSum::<f64>::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-13)).abs() < 1e-16);
    }
}
