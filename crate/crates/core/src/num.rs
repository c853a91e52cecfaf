//! Scalar abstractions shared by the queue estimator and the window arithmetic.
//!
//! The congestion-level estimator only needs field operations and ordering, so it
//! is generic over [`Scalar`] and can be evaluated with exact rationals as well as
//! with `f32`/`f64`. Window updates need `exp`, so they require [`Real`].

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num};

/// Ordered field element usable by the congestion-level estimator.
pub trait Scalar: Num + PartialOrd + Copy + FromPrimitive + Debug {
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }

    fn ten() -> Self {
        Self::from_u8(10).expect("10 representable in scalar type")
    }

    fn clamp_unit(self) -> Self {
        if self < Self::zero() {
            Self::zero()
        } else if self > Self::one() {
            Self::one()
        } else {
            self
        }
    }
}

impl<T> Scalar for T where T: Num + PartialOrd + Copy + FromPrimitive + Debug {}

/// Floating-point scalar for the window arithmetic (needs `exp`).
pub trait Real: Scalar + Float {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in float type")
    }
}

impl<T> Real for T where T: Scalar + Float {}
