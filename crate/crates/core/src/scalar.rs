//! Scalar abstraction for the numerical kernels.
//!
//! Everything that touches matrix values (mesh construction, assembly,
//! factorization, substitution, profiles) is generic over [`Scalar`], which is
//! `num_traits::Float` plus the two IEEE-754 boundaries this crate cares
//! about: the smallest positive normal number and the smallest positive
//! subnormal number. The analysis-side count formulas stay in `f64`/integer
//! arithmetic regardless of the matrix scalar.

use num_traits::{Float, FromPrimitive, NumAssignOps};
use std::fmt::{Debug, Display, LowerExp};

/// Floating-point scalar usable for matrix values: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumAssignOps + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Smallest positive value represented with full precision
    /// (`2^-1022` for `f64`, `2^-126` for `f32`).
    fn min_positive_normal() -> Self;

    /// Smallest positive representable value
    /// (`2^-1074` for `f64`, `2^-149` for `f32`).
    fn min_positive_subnormal() -> Self;

    /// Parse the decimal form produced by `Display`/`LowerExp`; both are
    /// shortest-round-trip in Rust, so `parse_decimal` recovers values
    /// bit-exactly.
    fn parse_decimal(s: &str) -> Option<Self>;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn min_positive_normal() -> Self {
                <$t>::MIN_POSITIVE
            }

            fn min_positive_subnormal() -> Self {
                <$t>::from_bits(1)
            }

            fn parse_decimal(s: &str) -> Option<Self> {
                s.parse().ok()
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
