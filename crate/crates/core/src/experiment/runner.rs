use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::alg1::run_algorithm1;
use crate::alg2::{run_algorithm2, trace_drift};
use crate::barrier::BarrierState;
use crate::christoffel::{sample_arcsine_coordinate, ChristoffelSampler};
use crate::discrete::{subsample, Algo, DiscreteFrame};
use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, Strategy};
use crate::index_basis::BasisSpec;
use crate::least_squares::{fit, fit_with_weights, gram_matrix, FitResult, GeneratingFunction};
use crate::numerics::run_seed;
use crate::sampling::WeightedSample;

/// Slack allowed below the almost-sure floor before a run is rejected.
const FLOOR_SLACK: f64 = 1e-9;

/// Per-run summary shared by all strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_index: usize,
    pub m: usize,
    pub seed: u64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub condition_number: f64,
    pub rejections: Vec<u64>,
    /// `‖g_y - P_n^m g_y‖_{L²}`; absent when the Gram matrix is singular.
    pub l2_error: Option<f64>,
    pub error_ratio: Option<f64>,
    /// Spectral floor of the sampler: almost sure for `alg2`, with high
    /// probability for `alg1`.
    pub floor: Option<f64>,
    /// `max |Tr(Y_i) - 1|` for `alg2`.
    pub trace_drift: Option<f64>,
    pub wall_time: f64,
}

impl RunRecord {
    pub fn mean_rejections(&self) -> f64 {
        if self.rejections.is_empty() {
            return 0.0;
        }
        self.rejections.iter().sum::<u64>() as f64 / self.rejections.len() as f64
    }
}

/// One run with its points, weights and fit.
#[derive(Debug, Clone)]
pub struct RunData {
    pub record: RunRecord,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub fit: Option<FitResult>,
}

/// Basis of the `n` largest Legendre coefficients of `g_y`.
pub fn basis_for(cfg: &ExperimentConfig) -> Result<BasisSpec> {
    BasisSpec::for_generating_function(&cfg.y, cfg.n)
}

/// `m` i.i.d. points of an i.i.d. strategy with weights `w(x_i) / m`, where
/// `w` is the inverse density with respect to the uniform measure.
pub fn iid_sample<R: Rng + ?Sized>(
    strategy: Strategy,
    basis: &BasisSpec,
    m: usize,
    rng: &mut R,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let d = basis.dim();
    let n = basis.len() as f64;
    let christoffel = ChristoffelSampler::new(basis);
    let mut points = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for _ in 0..m {
        let (x, w) = match strategy {
            Strategy::UniformIid => ((0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect(), 1.0),
            Strategy::ArcsineIid => {
                let x: Vec<f64> = (0..d).map(|_| sample_arcsine_coordinate(rng)).collect();
                let w = x
                    .iter()
                    .map(|&t| std::f64::consts::PI * (1.0 - t * t).sqrt() / 2.0)
                    .product();
                (x, w)
            }
            Strategy::ChristoffelIid => {
                let (x, _) = christoffel.sample(rng);
                let w = n / basis.christoffel(&x)?;
                (x, w)
            }
            Strategy::Alg1 | Strategy::Alg2 => {
                return Err(Error::InvalidParameter(format!(
                    "{strategy} is not an i.i.d. strategy"
                )))
            }
        };
        points.push(x);
        weights.push(w / m as f64);
    }
    Ok((points, weights))
}

fn fit_or_singular(result: Result<FitResult>) -> Result<Option<FitResult>> {
    match result {
        Ok(f) => Ok(Some(f)),
        Err(Error::SingularGram { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn check_floor(run_index: usize, lambda_min: f64, floor: f64) -> Result<()> {
    if lambda_min < floor - FLOOR_SLACK * floor.abs().max(1.0) {
        return Err(Error::FloorViolation {
            run: run_index,
            lambda_min,
            floor,
        });
    }
    Ok(())
}

/// Runs one sample of size `m` with the configured strategy and fits `g_y`.
pub fn run_single(
    basis: &BasisSpec,
    cfg: &ExperimentConfig,
    m: usize,
    run_index: usize,
    seed: u64,
) -> Result<RunData> {
    let start = Instant::now();
    let g = GeneratingFunction::new(cfg.y.clone());
    let n = basis.len();
    let (state, points, weights, rejections, fitted, floor, drift) = match cfg.strategy {
        Strategy::Alg1 => {
            let params = cfg.alg1_params(n, m)?;
            let sample = run_algorithm1(basis, &params, seed)?;
            let fitted = fit_or_singular(fit(basis, &sample, &g))?;
            let floor = params.default_floor(n);
            unpack(sample, fitted, Some(floor), None)
        }
        Strategy::Alg2 => {
            let params = cfg.alg2_params(n, m)?;
            let sample = run_algorithm2(basis, &params, seed)?;
            let floor = params.spectral_floor(n);
            check_floor(run_index, sample.lambda_min(), floor)?;
            let drift = trace_drift(&sample);
            let fitted = fit_or_singular(fit(basis, &sample, &g))?;
            unpack(sample, fitted, Some(floor), Some(drift))
        }
        iid => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (points, weights) = iid_sample(iid, basis, m, &mut rng)?;
            let state = BarrierState::from_gram(
                gram_matrix(basis, &points, &weights)?,
                f64::NEG_INFINITY,
            )?;
            let fitted = fit_or_singular(fit_with_weights(basis, &points, &weights, &g))?;
            (state, points, weights, vec![0; m], fitted, None, None)
        }
    };
    let record = RunRecord {
        run_index,
        m,
        seed,
        lambda_min: state.lambda_min(),
        lambda_max: state.lambda_max(),
        condition_number: state.condition_number(),
        rejections,
        l2_error: fitted.as_ref().and_then(|f| f.l2_error),
        error_ratio: fitted.as_ref().and_then(|f| f.error_ratio),
        floor,
        trace_drift: drift,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok(RunData {
        record,
        points,
        weights,
        fit: fitted,
    })
}

type Unpacked = (
    BarrierState,
    Vec<Vec<f64>>,
    Vec<f64>,
    Vec<u64>,
    Option<FitResult>,
    Option<f64>,
    Option<f64>,
);

fn unpack(
    sample: WeightedSample,
    fitted: Option<FitResult>,
    floor: Option<f64>,
    drift: Option<f64>,
) -> Unpacked {
    (
        sample.final_state,
        sample.points,
        sample.weights,
        sample.rejections,
        fitted,
        floor,
        drift,
    )
}

/// Evaluates `f` on a dedicated pool when a thread count is configured.
pub fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// `cfg.runs` runs at sample size `m`; run `k` uses `run_seed(master, offset + k)`.
/// Results are in run order and the first failing run (in that order) is reported.
pub fn run_batch(
    basis: &BasisSpec,
    cfg: &ExperimentConfig,
    m: usize,
    offset: usize,
) -> Result<Vec<RunData>> {
    let results: Vec<Result<RunData>> = in_pool(cfg.threads, || {
        (0..cfg.runs)
            .into_par_iter()
            .map(|k| {
                let global = offset + k;
                run_single(basis, cfg, m, global, run_seed(cfg.master_seed, global as u64))
            })
            .collect()
    })?;
    results.into_iter().collect()
}

/// Per-run spectra and errors at the first configured `m`.
pub fn run_condition_histogram(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let basis = basis_for(cfg)?;
    Ok(run_batch(&basis, cfg, cfg.m(), 0)?
        .into_iter()
        .map(|r| r.record)
        .collect())
}

/// Mean rejection counts per iteration over the runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionProfile {
    pub m: usize,
    pub runs: usize,
    /// Entry `i - 1` is the mean over runs of the rejections at iteration `i`.
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
}

pub fn run_rejection_profile(cfg: &ExperimentConfig) -> Result<RejectionProfile> {
    if cfg.strategy.is_iid() {
        return Err(Error::InvalidParameter(
            "rejection profiles need strategy alg1 or alg2".into(),
        ));
    }
    let basis = basis_for(cfg)?;
    let m = cfg.m();
    let records: Vec<RunRecord> = run_batch(&basis, cfg, m, 0)?
        .into_iter()
        .map(|r| r.record)
        .collect();
    Ok(profile_from_records(m, &records))
}

pub fn profile_from_records(m: usize, records: &[RunRecord]) -> RejectionProfile {
    let runs = records.len() as f64;
    let mut mean = vec![0.0; m];
    let mut std_error = vec![0.0; m];
    for i in 0..m {
        let vals: Vec<f64> = records.iter().map(|r| r.rejections[i] as f64).collect();
        let mu = vals.iter().sum::<f64>() / runs;
        let var = if records.len() > 1 {
            vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (runs - 1.0)
        } else {
            0.0
        };
        mean[i] = mu;
        std_error[i] = (var / runs).sqrt();
    }
    RejectionProfile {
        m,
        runs: records.len(),
        mean,
        std_error,
    }
}

/// Error statistics at one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurvePoint {
    pub m: usize,
    pub runs: usize,
    /// Runs whose Gram matrix was invertible.
    pub fits: usize,
    pub mean_ratio: f64,
    pub ratio_std_error: f64,
    /// Mean of `‖g_y - P_n^m g_y‖² / E²`.
    pub mean_sq_ratio: f64,
    pub sq_ratio_std_error: f64,
    pub median_condition_number: f64,
}

fn mean_and_se(vals: &[f64]) -> (f64, f64) {
    let k = vals.len() as f64;
    if vals.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mu = vals.iter().sum::<f64>() / k;
    if vals.len() < 2 {
        return (mu, f64::NAN);
    }
    let var = vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (k - 1.0);
    (mu, (var / k).sqrt())
}

/// Median of a nonempty slice.
pub fn median(vals: &[f64]) -> f64 {
    let mut v = vals.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

pub fn curve_point(m: usize, records: &[RunRecord]) -> ErrorCurvePoint {
    let ratios: Vec<f64> = records.iter().filter_map(|r| r.error_ratio).collect();
    let sq: Vec<f64> = ratios.iter().map(|r| r * r).collect();
    let (mean_ratio, ratio_std_error) = mean_and_se(&ratios);
    let (mean_sq_ratio, sq_ratio_std_error) = mean_and_se(&sq);
    let conds: Vec<f64> = records.iter().map(|r| r.condition_number).collect();
    ErrorCurvePoint {
        m,
        runs: records.len(),
        fits: ratios.len(),
        mean_ratio,
        ratio_std_error,
        mean_sq_ratio,
        sq_ratio_std_error,
        median_condition_number: median(&conds),
    }
}

/// Error ratios for every configured `m`. The `j`-th sample size uses the
/// run indices `j·runs, …, (j+1)·runs - 1`.
pub fn run_error_curve(cfg: &ExperimentConfig) -> Result<Vec<ErrorCurvePoint>> {
    let basis = basis_for(cfg)?;
    cfg.m_values
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let records: Vec<RunRecord> = run_batch(&basis, cfg, m, j * cfg.runs)?
                .into_iter()
                .map(|r| r.record)
                .collect();
            Ok(curve_point(m, &records))
        })
        .collect()
}

/// Frame subsampling runs; run `k` uses `run_seed(master, k)`.
pub fn run_subsample(cfg: &ExperimentConfig, frame: &DiscreteFrame) -> Result<Vec<WeightedSample<usize>>> {
    let n = frame.n();
    let m = cfg.m_values.first().copied().unwrap_or(2 * n);
    let algo = match cfg.strategy {
        Strategy::Alg1 => Algo::Alg1(cfg.alg1_params(n, m)?),
        Strategy::Alg2 => Algo::Alg2(cfg.alg2_params(n, m)?),
        other => {
            return Err(Error::InvalidParameter(format!(
                "subsampling needs alg1 or alg2, got {other}"
            )))
        }
    };
    let results: Vec<Result<WeightedSample<usize>>> = in_pool(cfg.threads, || {
        (0..cfg.runs)
            .into_par_iter()
            .map(|k| {
                let sample = subsample(frame, &algo, run_seed(cfg.master_seed, k as u64))?;
                if let Algo::Alg2(p) = &algo {
                    check_floor(k, sample.lambda_min(), p.spectral_floor(n))?;
                }
                Ok(sample)
            })
            .collect()
    })?;
    results.into_iter().collect()
}
