//! Random sampling by effective resistance.
//!
//! Each iteration raises the lower barrier by `δ_i = ε / (Tr Y_i + γ)`, draws
//! `x_i` with density proportional to `ρ_i(x) = φᵀ(Z_i + γI/n)φ + γ_∞` and
//! weights it by `s_i = η / ρ_i(x_i)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::barrier::{BarrierState, DensityMatrix};
use crate::error::{Error, Result};
use crate::index_basis::BasisSpec;
use crate::numerics::run_seed;
use crate::sampling::{
    ContinuousSource, IterationRecord, PointSource, TargetDensity, WeightedSample,
    DEFAULT_REJECTION_CAP,
};

/// Inputs of the effective-resistance sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct Alg1Params {
    pub m: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub gamma_inf: f64,
    /// `ε / (1 - ε)`.
    pub eta: f64,
    pub rejection_cap: u64,
}

impl Alg1Params {
    pub fn new(m: usize, epsilon: f64, gamma: f64, gamma_inf: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be >= 1".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
        }
        if !(gamma_inf >= 0.0 && gamma_inf.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma_inf must be >= 0, got {gamma_inf}"
            )));
        }
        Ok(Self {
            m,
            epsilon,
            gamma,
            gamma_inf,
            eta: epsilon / (1.0 - epsilon),
            rejection_cap: DEFAULT_REJECTION_CAP,
        })
    }

    /// `ε = r^{-1/4}`, `γ = r^{1/2} - r^{1/4}` with `r = (m+1)/n`.
    pub fn theorem_defaults(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m < n {
            return Err(Error::InvalidParameter(format!(
                "defaults need m >= n >= 1, got n = {n}, m = {m}"
            )));
        }
        let r = oversampling(n, m);
        Self::new(m, r.powf(-0.25), r.sqrt() - r.powf(0.25), 0.0)
    }

    pub fn with_gamma_inf(mut self, gamma_inf: f64) -> Result<Self> {
        if !(gamma_inf >= 0.0 && gamma_inf.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma_inf must be >= 0, got {gamma_inf}"
            )));
        }
        self.gamma_inf = gamma_inf;
        Ok(self)
    }

    pub fn with_rejection_cap(mut self, cap: u64) -> Self {
        self.rejection_cap = cap;
        self
    }

    /// `α = n (ε r / (1/p + γ) - 1)`, reached with probability at least `1 - p`.
    pub fn spectral_floor(&self, n: usize, p: f64) -> f64 {
        let r = oversampling(n, self.m);
        n as f64 * (self.epsilon * r / (1.0 / p + self.gamma) - 1.0)
    }

    /// Floor for the failure probability `p = r^{-1/4}`.
    pub fn default_floor(&self, n: usize) -> f64 {
        self.spectral_floor(n, oversampling(n, self.m).powf(-0.25))
    }
}

/// `r = (m+1)/n`.
pub fn oversampling(n: usize, m: usize) -> f64 {
    (m + 1) as f64 / n as f64
}

/// `ρ(x) = φᵀZφ + (γ/n)|φ|² + γ_∞`.
pub fn density_alg1(
    z: &nalgebra::DMatrix<f64>,
    gamma: f64,
    gamma_inf: f64,
    basis: &BasisSpec,
    x: &[f64],
) -> Result<f64> {
    let phi = basis.phi_eval(x)?;
    if z.nrows() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: phi.len(),
            got: z.nrows(),
        });
    }
    let n = phi.len() as f64;
    Ok(phi.dot(&(z * &phi)) + gamma / n * phi.norm_squared() + gamma_inf)
}

/// Normalizer `Ξ = Tr Z + γ + γ_∞` of [`density_alg1`].
pub fn normalizer_alg1(density: &DensityMatrix, gamma_inf: f64) -> f64 {
    density.trace + gamma_inf
}

pub fn run_algorithm1(basis: &BasisSpec, params: &Alg1Params, seed: u64) -> Result<WeightedSample> {
    run_algorithm1_with(&ContinuousSource::new(basis), params, seed)
}

/// Runs the sampler on any point source (continuous cube or finite frame).
pub fn run_algorithm1_with<S: PointSource>(
    source: &S,
    params: &Alg1Params,
    seed: u64,
) -> Result<WeightedSample<S::Point>> {
    let n = source.n();
    if params.m < n {
        return Err(Error::InvalidParameter(format!(
            "need m >= n, got m = {}, n = {n}",
            params.m
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = BarrierState::new(n, -(n as f64));
    let mut points = Vec::with_capacity(params.m);
    let mut weights = Vec::with_capacity(params.m);
    let mut rejections = Vec::with_capacity(params.m);
    let mut iterations = Vec::with_capacity(params.m);

    for i in 1..=params.m {
        let prev = state.barrier();
        let trace_y = state.trace_shifted_inverse(prev)?;
        let delta = params.epsilon / (trace_y + params.gamma);
        let ell = prev + delta;
        let density = state.effective_resistance_density(ell, params.gamma)?;
        state.set_barrier(ell);

        let target = TargetDensity::EffectiveResistance {
            density: &density,
            gamma_inf: params.gamma_inf,
        };
        let draw = source.draw(&target, &mut rng, params.rejection_cap, i)?;
        let s = params.eta / draw.density;
        state.rank_one_update(&draw.phi, s);

        iterations.push(IterationRecord {
            trace_y,
            barrier: ell,
            delta,
            density_lambda_max: density.lambda_max,
            density_trace: density.trace,
            density_at_point: draw.density,
        });
        points.push(draw.point);
        weights.push(s);
        rejections.push(draw.rejections);
    }

    // the barrier step iteration m+1 would take
    let prev = state.barrier();
    let final_trace_y = state.trace_shifted_inverse(prev)?;
    let ell_final = prev + params.epsilon / (final_trace_y + params.gamma);
    state.set_barrier(ell_final);
    if state.barrier_gap() <= 0.0 {
        return Err(Error::BarrierViolation {
            iteration: params.m + 1,
            shift: ell_final,
            lambda_min: state.lambda_min(),
        });
    }

    Ok(WeightedSample {
        points,
        weights,
        rejections,
        final_state: state,
        ell_final,
        final_trace_y,
        rng_seed: seed,
        iterations,
    })
}

/// A sample conditioned on `λ_min(A_m) ≥ α`, and the number of restarts it took.
#[derive(Debug, Clone)]
pub struct ConditionalSample<P = Vec<f64>> {
    pub sample: WeightedSample<P>,
    pub restarts: usize,
    pub floor: f64,
}

/// Relaunches the sampler until `λ_min(A_m) ≥ α` with `α` from
/// [`Alg1Params::default_floor`]. Attempt `j ≥ 1` uses `run_seed(seed, j)`.
pub fn conditional_sample(
    basis: &BasisSpec,
    params: &Alg1Params,
    seed: u64,
    max_restarts: usize,
) -> Result<ConditionalSample> {
    conditional_sample_with(&ContinuousSource::new(basis), params, seed, max_restarts)
}

pub fn conditional_sample_with<S: PointSource>(
    source: &S,
    params: &Alg1Params,
    seed: u64,
    max_restarts: usize,
) -> Result<ConditionalSample<S::Point>> {
    let floor = params.default_floor(source.n());
    for attempt in 0..=max_restarts {
        let s = if attempt == 0 {
            seed
        } else {
            run_seed(seed, attempt as u64)
        };
        let sample = run_algorithm1_with(source, params, s)?;
        if sample.lambda_min() >= floor {
            return Ok(ConditionalSample {
                sample,
                restarts: attempt,
                floor,
            });
        }
    }
    Err(Error::RestartOverflow {
        restarts: max_restarts,
    })
}
