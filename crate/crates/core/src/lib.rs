//! Bayesian dynamic latent space model for symmetric binary relational data.
//!
//! Edge probabilities at time `t` are `logistic(mu(t) + x_i(t)' x_j(t))`, where the
//! baseline `mu` and every latent coordinate trajectory carry squared-exponential
//! Gaussian-process priors and the coordinate scales follow a multiplicative gamma
//! process. Posterior computation is an exact Polya-Gamma augmented block Gibbs
//! sampler that also imputes missing entries and forecasts unobserved time points.
//!
//! The crate is `no_std` (it needs `alloc`). Enabling `parallel` distributes the
//! slot-wise sampling steps over a rayon pool without changing any draw.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod diagnostics;
pub mod error;
pub mod gibbs;
pub mod gp;
pub mod linalg;
pub mod model;
pub mod net;
pub mod polya_gamma;
pub mod shrinkage;
pub mod synth;

pub use error::{Error, Result};
pub use gibbs::{ChainOutput, GibbsConfig};
pub use gp::{CovarianceFactor, KernelConfig};
pub use model::{LatentState, ProbabilitySeries};
pub use net::{DynamicNetwork, ReturnsTable, TieRule, TimeGrid};
pub use shrinkage::ShrinkageState;
