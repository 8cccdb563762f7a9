//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the physics is written against: `f32` or `f64`.
///
/// Tolerances quoted in the docs assume `f64`; the `f32` instantiation works
/// but its residuals are bounded by [`Real::tolerance`] instead.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Display + LowerExp + Debug + Send + Sync
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon.
    fn eps() -> Self;

    /// `max(target, 100·eps)`: tightest residual bound this precision can honour.
    #[inline]
    fn tolerance(target: f64) -> Self {
        let floor = Self::eps() * Self::lit(100.0);
        let t = Self::lit(target);
        if t > floor {
            t
        } else {
            floor
        }
    }
}

impl Real for f32 {
    #[inline]
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    #[inline]
    fn eps() -> Self {
        f64::EPSILON
    }
}

/// `re + i·im`.
#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Purely imaginary `i·im`.
#[inline]
pub fn ci<T: Real>(im: T) -> Complex<T> {
    Complex::new(T::zero(), im)
}

/// Purely real complex number.
#[inline]
pub fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Modulus `|z|` without overflow.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// `r·e^{i·theta}`.
#[inline]
pub fn polar<T: Real>(r: T, theta: T) -> Complex<T> {
    Complex::new(r * theta.cos(), r * theta.sin())
}

/// Principal square root.
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = cabs(z);
    if r == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let half = T::lit(0.5);
    let re = (half * (r + z.re)).sqrt();
    let im = (half * (r - z.re)).sqrt();
    if z.im < T::zero() {
        Complex::new(re, -im)
    } else {
        Complex::new(re, im)
    }
}
