//! Scalar abstractions.
//!
//! Geometry is written against [`Real`] (`f32` or `f64`); exact linear-space
//! probability recursions are written against [`Weight`], which is implemented
//! for `f64` and for the exact [`BigRational`].

use std::fmt::Debug;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Floating point scalar used by the hyperbolic-plane backend.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A probability weight that can be added and multiplied exactly or
/// approximately.
pub trait Weight: Clone + Debug + Zero + One + Add<Output = Self> + Mul<Output = Self> {
    /// The weight `num / den`.
    fn ratio(num: u64, den: u64) -> Self;

    /// Nearest `f64`, used when comparing exact and floating results.
    fn approx(&self) -> f64;
}

impl Weight for f64 {
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn approx(&self) -> f64 {
        *self
    }
}

impl Weight for BigRational {
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// `ln(e^a + e^b)` without overflow; `-inf` is the additive identity.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}` over a slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_handles_neg_infinity() {
        assert_eq!(log_add(f64::NEG_INFINITY, 1.5), 1.5);
        assert_eq!(log_add(-2.0, f64::NEG_INFINITY), -2.0);
        let v = log_add(0.0, 0.0);
        assert!((v - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let xs = [-1.0, -2.0, -3.5];
        let direct: f64 = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn rational_weight_is_exact() {
        let a = BigRational::ratio(1, 3);
        let b = BigRational::ratio(2, 3);
        assert_eq!(a + b, BigRational::one());
    }
}
