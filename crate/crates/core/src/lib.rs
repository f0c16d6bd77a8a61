//! Kernel-type estimators for the uniform deconvolution model `X = Y + Z`,
//! `Z ~ Uniform[0, 1)`.
//!
//! The observation density is `g(x) = F(x) - F(x - 1)`, which can be inverted
//! in two ways (a left-shift and a right-shift series). Plugging a direct
//! kernel estimate of `g` (or `g'`) into either series gives the one-sided
//! estimators `f⁻`, `f⁺`, `F⁻`, `F⁺`. Each one is accurate in one tail and
//! periodic in the other; weighting them by a preliminary (pivot) estimate of
//! `F` gives combined estimators whose asymptotic variance is proportional to
//! `F(x)(1 - F(x))`.
//!
//! Module map:
//!
//! * [`kernels`] - compactly supported smoothing kernels and their moment functionals.
//! * [`kde`] - the direct kernel estimate of `g` and `g'`.
//! * [`deconv`] - the inversion estimators, pivots, combined estimators and curves.
//! * [`theory`] - ground-truth models and closed-form asymptotic constants.
//! * [`montecarlo`] - seeded sampling and replication studies.
//! * [`io`] / [`cli`] - CSV artifacts and the `unidecon` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod cli;
pub mod deconv;
pub mod error;
pub mod io;
pub mod kde;
pub mod kernels;
pub mod montecarlo;
pub mod quad;
pub mod rng;
pub mod special;
pub mod theory;

pub use deconv::{Curve, CurveMeta, Estimator, InversionEstimator, WeightSpec};
pub use error::{Error, Result};
pub use kde::{Bandwidth, Sample};
pub use kernels::Kernel;
pub use montecarlo::{McConfig, McReport};
pub use theory::TrueModel;

/// Version string embedded in every CSV artifact.
pub const TOOL_VERSION: &str = concat!("unidecon ", env!("CARGO_PKG_VERSION"));
