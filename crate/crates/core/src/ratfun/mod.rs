//! Real polynomials and rational functions in the Laplace variable.

mod poly;
mod rational;

pub use poly::{even_part, nonneg_on_halfline, poly_roots, HalfLineCheck, Polynomial, NONNEG_REL_EPS};
pub use rational::{coefficient_mismatch, normalize_with, RationalFunction, CANCEL_RHO};

/// Normalized copy of `z`: common factors cancelled, denominator monic.
pub fn normalize(z: &RationalFunction) -> RationalFunction {
    z.normalize()
}
