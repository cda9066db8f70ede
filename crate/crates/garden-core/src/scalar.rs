//! Scalar abstraction shared by the exact and floating-point backends.
//!
//! The residual and verification machinery is written once over [`Scalar`]
//! and instantiated with `i64` (signed-permutation enumeration), `f64`/`f32`
//! (solver iterates) and [`Rational64`](num_rational::Rational64) (reduction
//! arithmetic). Tolerances are expressed in the same scalar, so exact
//! backends verify with a tolerance of zero.

use std::fmt::Debug;

use num_traits::{Num, Signed};

/// A signed commutative-ring scalar with a total-enough order for
/// tolerance comparisons.
pub trait Scalar: Num + Signed + PartialOrd + Clone + Debug {}

impl<T> Scalar for T where T: Num + Signed + PartialOrd + Clone + Debug {}

#[cfg(test)]
mod tests {
    use super::*;

    fn takes_scalar<T: Scalar>(x: T) -> T {
        x.abs()
    }

    #[test]
    fn backends_qualify() {
        assert_eq!(takes_scalar(-3i64), 3);
        assert_eq!(takes_scalar(-0.5f64), 0.5);
        assert_eq!(takes_scalar(-0.5f32), 0.5);
        let r = num_rational::Rational64::new(-2, 4);
        assert_eq!(takes_scalar(r), num_rational::Rational64::new(1, 2));
    }
}
