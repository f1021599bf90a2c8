//! Randomized greedy sampling for weighted least-squares approximation.
//!
//! Two samplers build a point set `x_1, …, x_m` and weights `s_1, …, s_m` one
//! point at a time while keeping a lower barrier `ℓ` strictly below the
//! smallest eigenvalue of the Gram matrix `A = Σ s_i φ(x_i) φ(x_i)ᵀ`:
//!
//! - [`alg1`] raises the barrier by a random, potential-dependent amount and
//!   samples from an effective-resistance density; it reaches `λ_min(A_m) ≥ α`
//!   with high probability.
//! - [`alg2`] raises the barrier by a fixed `δ` and samples from a thresholded
//!   density; it reaches `λ_min(A_m) ≥ mδ - n + 1` on every run.
//!
//! The test bed is the tensor Legendre basis on `[-1, 1]^d` ([`index_basis`]),
//! with candidates proposed from the Christoffel measure ([`christoffel`]).
//! [`discrete`] runs both samplers on a finite frame, [`least_squares`] fits
//! and scores the resulting estimator and [`experiment`] drives batches of runs.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alg1;
pub mod alg2;
pub mod barrier;
pub mod christoffel;
pub mod discrete;
pub mod error;
pub mod experiment;
pub mod index_basis;
pub mod least_squares;
pub mod numerics;
pub mod quadrature;
pub mod sampling;

pub use alg1::{conditional_sample, run_algorithm1, Alg1Params};
pub use alg2::{run_algorithm2, Alg2Params};
pub use barrier::{BarrierState, DensityKind, DensityMatrix};
pub use christoffel::ChristoffelSampler;
pub use discrete::{frame_from_points, subsample, Algo, DiscreteFrame};
pub use error::{Error, Result};
pub use index_basis::{AnisotropyParams, BasisSpec, LowerSet, MultiIndex};
pub use least_squares::{fit, FitResult};
pub use sampling::WeightedSample;
