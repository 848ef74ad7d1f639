//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Exp1, Gamma, Open01, StandardNormal};

/// Real scalar type the estimators are generic over (`f32` or `f64`).
///
/// Besides the arithmetic supertraits this carries the handful of sampling
/// primitives the models need, so generic code never has to spell out
/// `StandardNormal: Distribution<T>` style bounds.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for non-representable input,
    /// which cannot happen for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// Relative tolerance that replaces `1e-10` style constants for types
    /// too coarse to reach them.
    #[inline]
    fn tol(target: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(100.0);
        Self::lit(target).max(floor)
    }

    fn sample_standard_normal(rng: &mut dyn RngCore) -> Self;
    fn sample_standard_exp(rng: &mut dyn RngCore) -> Self;
    /// Gamma(shape, 1).
    fn sample_gamma(shape: Self, rng: &mut dyn RngCore) -> Self;
    /// Uniform on the open interval (0, 1).
    fn sample_open01(rng: &mut dyn RngCore) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn sample_standard_normal(rng: &mut dyn RngCore) -> Self {
                StandardNormal.sample(rng)
            }
            #[inline]
            fn sample_standard_exp(rng: &mut dyn RngCore) -> Self {
                Exp1.sample(rng)
            }
            #[inline]
            fn sample_gamma(shape: Self, rng: &mut dyn RngCore) -> Self {
                Gamma::new(shape, 1.0).expect("positive gamma shape").sample(rng)
            }
            #[inline]
            fn sample_open01(rng: &mut dyn RngCore) -> Self {
                rng.sample(Open01)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
