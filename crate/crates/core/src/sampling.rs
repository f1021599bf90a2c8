//! Shared sampler plumbing: the unnormalized target densities used by both
//! algorithms, the [`PointSource`] abstraction over continuous and finite
//! domains, and the [`WeightedSample`] output.

use nalgebra::DVector;
use rand::Rng;

use crate::barrier::{BarrierState, DensityMatrix};
use crate::christoffel::ChristoffelSampler;
use crate::error::{Error, Result};
use crate::index_basis::BasisSpec;

/// Default per-iteration cap on rejected candidates.
pub const DEFAULT_REJECTION_CAP: u64 = 1_000_000;

/// Unnormalized density `x ↦ value(φ(x))` to draw the next point from.
#[derive(Debug, Clone, Copy)]
pub enum TargetDensity<'a> {
    /// `ρ(x) = φᵀ M φ + γ_∞` with `M = Z + γ I / n`.
    EffectiveResistance {
        density: &'a DensityMatrix,
        gamma_inf: f64,
    },
    /// `R(x) = w(x) 1{w(x) ≥ threshold}` with `w(x) = φᵀ W φ`.
    Thresholded {
        density: &'a DensityMatrix,
        threshold: f64,
    },
}

impl TargetDensity<'_> {
    pub fn eval(&self, phi: &DVector<f64>) -> f64 {
        match *self {
            TargetDensity::EffectiveResistance { density, gamma_inf } => {
                density.quadratic_form(phi) + gamma_inf
            }
            TargetDensity::Thresholded { density, threshold } => {
                let w = density.quadratic_form(phi);
                if w >= threshold {
                    w
                } else {
                    0.0
                }
            }
        }
    }
}

/// An accepted point with its feature vector, its target density value and
/// the number of candidates rejected before it.
#[derive(Debug, Clone)]
pub struct Draw<P> {
    pub point: P,
    pub phi: DVector<f64>,
    pub density: f64,
    pub rejections: u64,
}

/// A domain with an orthonormal feature map that can draw from target densities.
pub trait PointSource {
    type Point: Clone + Send;

    /// Dimension `n` of the feature space.
    fn n(&self) -> usize;

    fn draw<R: Rng + ?Sized>(
        &self,
        target: &TargetDensity<'_>,
        rng: &mut R,
        cap: u64,
        iteration: usize,
    ) -> Result<Draw<Self::Point>>;
}

/// The cube `[-1, 1]^d` with a tensor Legendre basis; candidates come from the
/// Christoffel measure and are accepted with probability `target / (λ_max |φ|²)`.
#[derive(Debug, Clone, Copy)]
pub struct ContinuousSource<'a> {
    basis: &'a BasisSpec,
    christoffel: ChristoffelSampler<'a>,
}

impl<'a> ContinuousSource<'a> {
    pub fn new(basis: &'a BasisSpec) -> Self {
        Self {
            basis,
            christoffel: ChristoffelSampler::new(basis),
        }
    }

    pub fn basis(&self) -> &'a BasisSpec {
        self.basis
    }

    fn phi(&self, x: &[f64]) -> DVector<f64> {
        let mut phi = DVector::zeros(self.basis.len());
        self.basis.phi_into(x, phi.as_mut_slice());
        phi
    }

    /// Rejection from the Christoffel measure; `quad` returns the accepted
    /// part of the density (zero outside the support).
    fn reject_from_christoffel<R, F>(
        &self,
        lambda_max: f64,
        quad: F,
        rng: &mut R,
        cap: u64,
        iteration: usize,
    ) -> Result<(Vec<f64>, DVector<f64>, u64)>
    where
        R: Rng + ?Sized,
        F: Fn(&DVector<f64>) -> f64,
    {
        let mut rejections = 0u64;
        loop {
            let (x, _) = self.christoffel.sample(rng);
            let phi = self.phi(&x);
            let value = quad(&phi);
            let u: f64 = rng.gen();
            if value > 0.0 && u * lambda_max * phi.norm_squared() < value {
                return Ok((x, phi, rejections));
            }
            rejections += 1;
            if rejections > cap {
                return Err(Error::RejectionOverflow { iteration, cap });
            }
        }
    }
}

impl PointSource for ContinuousSource<'_> {
    type Point = Vec<f64>;

    fn n(&self) -> usize {
        self.basis.len()
    }

    fn draw<R: Rng + ?Sized>(
        &self,
        target: &TargetDensity<'_>,
        rng: &mut R,
        cap: u64,
        iteration: usize,
    ) -> Result<Draw<Vec<f64>>> {
        let (x, phi, rejections) = match *target {
            TargetDensity::EffectiveResistance { density, gamma_inf } => {
                // uniform branch with probability γ_∞ / Ξ
                let xi = density.trace + gamma_inf;
                if gamma_inf > 0.0 && rng.gen::<f64>() * xi < gamma_inf {
                    let x: Vec<f64> = (0..self.basis.dim())
                        .map(|_| rng.gen_range(-1.0..=1.0))
                        .collect();
                    let phi = self.phi(&x);
                    (x, phi, 0)
                } else {
                    self.reject_from_christoffel(
                        density.lambda_max,
                        |phi| density.quadratic_form(phi),
                        rng,
                        cap,
                        iteration,
                    )?
                }
            }
            TargetDensity::Thresholded { density, threshold } => self.reject_from_christoffel(
                density.lambda_max,
                |phi| {
                    let w = density.quadratic_form(phi);
                    if w >= threshold {
                        w
                    } else {
                        0.0
                    }
                },
                rng,
                cap,
                iteration,
            )?,
        };
        let value = target.eval(&phi);
        Ok(Draw {
            point: x,
            phi,
            density: value,
            rejections,
        })
    }
}

/// Per-iteration quantities recorded by the samplers.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Lower potential `Tr(Y_i)`.
    pub trace_y: f64,
    /// Barrier `ℓ_i` after this iteration's increment.
    pub barrier: f64,
    /// Increment `ℓ_i - ℓ_{i-1}`.
    pub delta: f64,
    /// `λ_max` of the density matrix (`Z + γI/n` or `W`).
    pub density_lambda_max: f64,
    /// Trace of the density matrix.
    pub density_trace: f64,
    /// Target density value at the accepted point.
    pub density_at_point: f64,
}

/// Points, weights and the final Gram state of one sampler run.
#[derive(Debug, Clone)]
pub struct WeightedSample<P = Vec<f64>> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    pub rejections: Vec<u64>,
    pub final_state: BarrierState,
    /// Barrier one step past the last iteration; `λ_min(A_m) > ell_final`.
    pub ell_final: f64,
    /// `Tr(Y_{m+1})`, the potential after the last update.
    pub final_trace_y: f64,
    pub rng_seed: u64,
    pub iterations: Vec<IterationRecord>,
}

impl<P> WeightedSample<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lambda_min(&self) -> f64 {
        self.final_state.lambda_min()
    }

    pub fn lambda_max(&self) -> f64 {
        self.final_state.lambda_max()
    }

    pub fn condition_number(&self) -> f64 {
        self.final_state.condition_number()
    }

    /// `Tr(Y_1), …, Tr(Y_{m+1})`.
    pub fn trace_y_sequence(&self) -> Vec<f64> {
        self.iterations
            .iter()
            .map(|r| r.trace_y)
            .chain(std::iter::once(self.final_trace_y))
            .collect()
    }
}
