//! Random sampling with fixed increments of the barrier.
//!
//! The barrier moves by a fixed `δ` per iteration. Points are drawn from the
//! thresholded density `R_i(x) = w_i(x) 1{w_i(x) ≥ κ(1-δ)/δ}` with
//! `w_i(x) = φᵀ W_i φ` and weighted by `s_i = 1 / w_i(x_i)`. The potential
//! `Tr(Y_i)` stays equal to one, which pins `λ_min(A_m) ≥ mδ - n + 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::barrier::{BarrierState, DensityMatrix};
use crate::error::{Error, Result};
use crate::index_basis::BasisSpec;
use crate::sampling::{
    ContinuousSource, IterationRecord, PointSource, TargetDensity, WeightedSample,
    DEFAULT_REJECTION_CAP,
};

/// Rejection cap used when `κ > 0.9`, where the accepted region can be small.
pub const HIGH_KAPPA_REJECTION_CAP: u64 = 10_000_000;

/// Drift of `Tr(Y_i)` above which a run is flagged as numerically unhealthy.
pub const TRACE_DRIFT_WARNING: f64 = 1e-6;

/// Inputs of the fixed-increment sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct Alg2Params {
    pub m: usize,
    pub delta: f64,
    pub kappa: f64,
    /// `κ (1 - δ) / δ`.
    pub threshold: f64,
    pub rejection_cap: u64,
}

impl Alg2Params {
    pub fn new(m: usize, delta: f64, kappa: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be >= 1".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        if !(0.0..=1.0).contains(&kappa) {
            return Err(Error::InvalidParameter(format!(
                "kappa must lie in [0, 1], got {kappa}"
            )));
        }
        Ok(Self {
            m,
            delta,
            kappa,
            threshold: kappa * (1.0 - delta) / delta,
            rejection_cap: if kappa > 0.9 {
                HIGH_KAPPA_REJECTION_CAP
            } else {
                DEFAULT_REJECTION_CAP
            },
        })
    }

    /// `δ = r^{-1/2}` with `r = m / (n-1)`; at `m = n` this is `sqrt(1 - 1/n)`.
    pub fn theorem_defaults(n: usize, m: usize, kappa: f64) -> Result<Self> {
        if n < 2 || m < n {
            return Err(Error::InvalidParameter(format!(
                "defaults need m >= n >= 2, got n = {n}, m = {m}"
            )));
        }
        Self::new(m, oversampling(n, m).powf(-0.5), kappa)
    }

    /// Interpolation setting `m = n`, `δ = sqrt(1 - 1/n)`.
    pub fn interpolation(n: usize, kappa: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("interpolation needs n >= 2".into()));
        }
        Self::new(n, (1.0 - 1.0 / n as f64).sqrt(), kappa)
    }

    pub fn with_rejection_cap(mut self, cap: u64) -> Self {
        self.rejection_cap = cap;
        self
    }

    /// Almost-sure floor `λ_min(A_m) ≥ (n-1)(δr - 1) = mδ - n + 1`.
    pub fn spectral_floor(&self, n: usize) -> f64 {
        self.m as f64 * self.delta - n as f64 + 1.0
    }

    /// Upper bound `δ / (κ(1-δ))` on every weight, when `κ > 0`.
    pub fn weight_cap(&self) -> Option<f64> {
        (self.kappa > 0.0).then(|| self.delta / (self.kappa * (1.0 - self.delta)))
    }

    /// Bound `1 / (δ(1-δ))` on `λ_max(W_i)`.
    pub fn w_lambda_max_bound(&self) -> f64 {
        1.0 / (self.delta * (1.0 - self.delta))
    }

    /// Lower bound `(1-δ)/δ` on `Tr(W_i)`.
    pub fn w_trace_bound(&self) -> f64 {
        (1.0 - self.delta) / self.delta
    }

    /// Bound `n (1-κ)^{-1} (1-δ)^{-2}` on the mean number of candidates per
    /// iteration, finite only for `κ < 1`.
    pub fn mean_candidates_bound(&self, n: usize) -> f64 {
        n as f64 / ((1.0 - self.kappa) * (1.0 - self.delta).powi(2))
    }
}

/// `r = m / (n-1)`.
pub fn oversampling(n: usize, m: usize) -> f64 {
    m as f64 / (n as f64 - 1.0)
}

/// `R(x) = w(x) 1{w(x) ≥ threshold}`.
pub fn density_alg2(w: &DensityMatrix, threshold: f64, basis: &BasisSpec, x: &[f64]) -> Result<f64> {
    let phi = basis.phi_eval(x)?;
    if w.matrix.nrows() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: phi.len(),
            got: w.matrix.nrows(),
        });
    }
    Ok(TargetDensity::Thresholded {
        density: w,
        threshold,
    }
    .eval(&phi))
}

/// One draw from `R / Γ` by rejection from the Christoffel measure.
pub fn rejection_sample_alg2<R: Rng + ?Sized>(
    w: &DensityMatrix,
    threshold: f64,
    basis: &BasisSpec,
    rng: &mut R,
    cap: u64,
) -> Result<(Vec<f64>, u64)> {
    if !(w.lambda_max > 0.0) {
        return Err(Error::EmptySupport { iteration: 0 });
    }
    let target = TargetDensity::Thresholded {
        density: w,
        threshold,
    };
    let draw = ContinuousSource::new(basis).draw(&target, rng, cap, 0)?;
    Ok((draw.point, draw.rejections))
}

pub fn run_algorithm2(basis: &BasisSpec, params: &Alg2Params, seed: u64) -> Result<WeightedSample> {
    run_algorithm2_with(&ContinuousSource::new(basis), params, seed)
}

/// Runs the sampler on any point source (continuous cube or finite frame).
pub fn run_algorithm2_with<S: PointSource>(
    source: &S,
    params: &Alg2Params,
    seed: u64,
) -> Result<WeightedSample<S::Point>> {
    let n = source.n();
    if params.m < n {
        return Err(Error::InvalidParameter(format!(
            "need m >= n, got m = {}, n = {n}",
            params.m
        )));
    }
    let nf = n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = BarrierState::new(n, -nf);
    let mut points = Vec::with_capacity(params.m);
    let mut weights = Vec::with_capacity(params.m);
    let mut rejections = Vec::with_capacity(params.m);
    let mut iterations = Vec::with_capacity(params.m);

    for i in 1..=params.m {
        let prev = state.barrier();
        let ell = i as f64 * params.delta - nf;
        let trace_y = state.trace_shifted_inverse(prev)?;
        let density = state.w_density(prev, ell)?;
        if !(density.lambda_max > 0.0) {
            return Err(Error::EmptySupport { iteration: i });
        }
        state.set_barrier(ell);

        let target = TargetDensity::Thresholded {
            density: &density,
            threshold: params.threshold,
        };
        let draw = source.draw(&target, &mut rng, params.rejection_cap, i)?;
        let s = 1.0 / draw.density;
        state.rank_one_update(&draw.phi, s);

        iterations.push(IterationRecord {
            trace_y,
            barrier: ell,
            delta: params.delta,
            density_lambda_max: density.lambda_max,
            density_trace: density.trace,
            density_at_point: draw.density,
        });
        points.push(draw.point);
        weights.push(s);
        rejections.push(draw.rejections);
    }

    let final_trace_y = state.trace_shifted_inverse(state.barrier())?;
    let ell_final = (params.m + 1) as f64 * params.delta - nf;
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

/// `max_i |Tr(Y_i) - 1|` over `i = 1..m+1`.
pub fn trace_drift<P>(sample: &WeightedSample<P>) -> f64 {
    sample
        .trace_y_sequence()
        .into_iter()
        .map(|t| (t - 1.0).abs())
        .fold(0.0, f64::max)
}
