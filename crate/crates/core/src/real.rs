//! Scalar abstraction used throughout the crate.
//!
//! All numerics are written against [`Real`] so that the same code runs in
//! `f32` and `f64`. Eigen-decompositions additionally need
//! [`nalgebra::RealField`]; the combined bound appears where required.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar for all physics computations.
pub trait Real:
    Float + FromPrimitive + Sum + fmt::Debug + fmt::Display + fmt::LowerExp + Send + Sync + 'static
{
    /// Pull an `f64` literal into the working scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    /// `std::f64::consts::PI` in the working scalar type.
    #[inline]
    fn pi() -> Self {
        Self::lit(std::f64::consts::PI)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Compensated (Kahan) accumulator; keeps long mode sums near machine accuracy.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<R> {
    sum: R,
    carry: R,
}

impl<R: Real> Default for KahanSum<R> {
    fn default() -> Self {
        Self {
            sum: R::zero(),
            carry: R::zero(),
        }
    }
}

impl<R: Real> KahanSum<R> {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, term: R) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> R {
        self.sum
    }
}
