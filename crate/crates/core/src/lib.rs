//! Saddle-point importance sampling (SP-IS) for rare events of sample
//! means of light-tailed random vectors.
//!
//! The estimators write the target (a density of X̄ₙ, a tail probability,
//! or an expected overshoot) as the exact-asymptotic saddle-point
//! approximation times a Fourier integral that tends to 1, and estimate
//! that integral by importance sampling with a normal-core, power-law-tail
//! density. Baselines based on path simulation are included for
//! comparison.
//!
//! Everything numeric is generic over [`Real`]; the aliases below fix the
//! scalar to `f64`.
//!
//! ```
//! use spis_core::{estimate_tail, choose_parameters, Family, ISOverrides, SimulationSettings, TailSet};
//!
//! let model = Family::exponential(1.0_f64).unwrap();
//! let set = TailSet::full_orthant(vec![1.5]);
//! let (params, _) = choose_parameters(50, 1, &ISOverrides::default()).unwrap();
//! let settings = SimulationSettings::new(2_000, 42, "doc");
//! let report = estimate_tail(&model, &set, 50, &params, &settings).unwrap();
//! assert!((report.estimate / 9.039e-4 - 1.0).abs() < 0.05);
//! ```

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cgf;
pub mod error;
pub mod estimators;
pub mod is_density;
pub mod linalg;
pub mod real;
pub mod rng;
pub mod saddlepoint;
pub mod special;
pub mod tail_sets;

pub use baselines::{
    bgl_tail_1d, cmc_density, naive_mc, oet_tail, run_baseline, BaselineConfig, BaselineKind, BaselineTarget,
};
pub use cgf::{phi_tilted, tilted_sample, CumulantModel, Family, Integrability, Marginal};
pub use error::{Error, Result};
pub use estimators::{
    aggregate, combine_signed, estimate_density, estimate_overshoot, estimate_signed, estimate_tail, tail_asymptotic,
    tail_saddle_point, EstimateReport, OvershootReport, SignedEstimate, SimulationSettings,
};
pub use is_density::{choose_parameters, ISDensityParams, ISOverrides, PsiContext};
pub use linalg::Matrix;
pub use real::Real;
pub use saddlepoint::{
    exact_asymptotic_density, exact_asymptotic_overshoot, exact_asymptotic_tail, overshoot_ratio_limit,
    solve_saddle_point, solve_scalar_tilt, SaddlePoint,
};
pub use tail_sets::{Sign, TailSet};

pub type Family64 = Family<f64>;
pub type Matrix64 = Matrix<f64>;
pub type SaddlePoint64 = SaddlePoint<f64>;
pub type TailSet64 = TailSet<f64>;
pub type ISDensityParams64 = ISDensityParams<f64>;
pub type ISOverrides64 = ISOverrides<f64>;
pub type EstimateReport64 = EstimateReport<f64>;
pub type OvershootReport64 = OvershootReport<f64>;
pub type SignedEstimate64 = SignedEstimate<f64>;
pub type BaselineConfig64 = BaselineConfig<f64>;
