//! Scalar abstraction for the numeric core.

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numeric core is generic over.
pub trait Real: Float + FromPrimitive + ToPrimitive + std::fmt::Debug + std::iter::Sum {}

impl<T> Real for T where T: Float + FromPrimitive + ToPrimitive + std::fmt::Debug + std::iter::Sum {}
