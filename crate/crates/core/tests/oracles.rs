//! Checks against independent oracles: brute-force enumeration, quadrature,
//! closed forms and Monte Carlo estimates with explicit standard errors.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use barrier_sampling::alg1::{conditional_sample, run_algorithm1};
use barrier_sampling::barrier::{DensityKind, DensityMatrix};
use barrier_sampling::christoffel::sample_coordinate_legendre_sq;
use barrier_sampling::discrete::{DiscreteFrame, DiscreteSource};
use barrier_sampling::experiment::runner::iid_sample;
use barrier_sampling::experiment::Strategy;
use barrier_sampling::index_basis::{
    best_error, build_lower_set, captured_energy, coefficient, g_y_norm_sq, legendre_eval,
    truncated_sup_error, LowerSet, MultiIndex,
};
use barrier_sampling::least_squares::gram_matrix;
use barrier_sampling::numerics::run_seed;
use barrier_sampling::quadrature::TensorRule;
use barrier_sampling::sampling::{ContinuousSource, PointSource, TargetDensity};
use barrier_sampling::{Alg1Params, AnisotropyParams, BarrierState, BasisSpec, Error};

fn y(v: &[f64]) -> AnisotropyParams {
    AnisotropyParams::new(v.to_vec()).unwrap()
}

fn basis_1d(n: usize) -> BasisSpec {
    let set = LowerSet::new(1, (0..n).map(|k| MultiIndex::new(vec![k]).unwrap()).collect()).unwrap();
    BasisSpec::new(set).unwrap()
}

fn mean_se(vals: &[f64]) -> (f64, f64) {
    let k = vals.len() as f64;
    let mu = vals.iter().sum::<f64>() / k;
    let var = vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (k - 1.0);
    (mu, (var / k).sqrt())
}

fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * total as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    1.0 - ChiSquared::new((counts.len() - 1) as f64).unwrap().cdf(stat)
}

/// All multi-indices in `[0, bound)^d`.
fn box_indices(d: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..bound).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

#[test]
fn lower_set_captures_the_largest_coefficients() {
    for (yv, n) in [
        (vec![0.9, 0.8], 25),
        (vec![0.5, 0.5, 0.5], 20),
        (vec![0.9, 0.8, 0.7, 0.6], 40),
        (vec![0.3], 7),
    ] {
        let yy = y(&yv);
        let mut all: Vec<f64> = box_indices(yv.len(), n + 1)
            .into_iter()
            .map(|k| coefficient(&yy, &MultiIndex::new(k).unwrap()).unwrap().powi(2))
            .collect();
        all.sort_by(|a, b| b.total_cmp(a));
        let top: f64 = all[..n].iter().sum();
        let set = build_lower_set(&yy, n).unwrap();
        assert!((captured_energy(&yy, &set).unwrap() - top).abs() <= 1e-12 * top);
        let best = (g_y_norm_sq(&yy) - top).sqrt();
        assert!((best_error(&yy, &set).unwrap() - best).abs() <= 1e-10);
    }
}

#[test]
fn generating_function_norm_by_quadrature() {
    for yv in [vec![0.5], vec![0.7, 0.3], vec![0.6, 0.5, 0.4]] {
        let yy = y(&yv);
        let rule = TensorRule::new(80, yv.len());
        let q = rule.integrate(|x| barrier_sampling::index_basis::g_y_eval(&yy, x).unwrap().powi(2));
        assert!((q - g_y_norm_sq(&yy)).abs() <= 1e-10 * q);
    }
}

#[test]
fn tensor_basis_is_orthonormal_and_christoffel_averages_to_n() {
    let b = BasisSpec::for_generating_function(&y(&[0.9, 0.8, 0.7]), 30).unwrap();
    let deg = b.lower_set().max_degrees().into_iter().max().unwrap();
    let n = b.len();
    let weighted = TensorRule::new(deg + 1, 3);
    let christoffel = weighted.integrate(|x| b.christoffel(x).unwrap());
    let mut g2 = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = weighted.integrate(|x| {
                let phi = b.phi_eval(x).unwrap();
                phi[i] * phi[j]
            });
            g2[(i, j)] = v;
            g2[(j, i)] = v;
        }
    }
    assert!((g2 - DMatrix::identity(n, n)).amax() <= 1e-12);
    assert!((christoffel - n as f64).abs() <= 1e-10);
    let corner: f64 = b
        .lower_set()
        .indices()
        .iter()
        .map(|k| k.entries().iter().map(|&e| (2 * e + 1) as f64).product::<f64>())
        .sum();
    assert!((b.christoffel_sup() - corner).abs() <= 1e-9 * corner);
    assert!((b.christoffel(&[1.0, 1.0, 1.0]).unwrap() - corner).abs() <= 1e-9 * corner);
}

#[test]
fn truncated_tail_closed_form() {
    let yy = y(&[0.7]);
    for n in [3, 8, 12] {
        let set = build_lower_set(&yy, n).unwrap();
        let tail = truncated_sup_error(&yy, &set).unwrap();
        assert!((tail - 0.7f64.powi(n as i32) / 0.3).abs() <= 1e-12);
    }
}

fn random_state(b: &BasisSpec, rng: &mut ChaCha8Rng, updates: usize) -> BarrierState {
    let n = b.len();
    let mut state = BarrierState::new(n, -(n as f64));
    for _ in 0..updates {
        let x: Vec<f64> = (0..b.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        state.rank_one_update(&b.phi_eval(&x).unwrap(), rng.gen_range(0.2..1.0));
    }
    state
}

/// Bin probabilities of an unnormalized density on `[-1, 1]` by a fine midpoint rule.
fn bin_probabilities(bins: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let per_bin = 4000;
    let h = 2.0 / (bins * per_bin) as f64;
    let mass: Vec<f64> = (0..bins)
        .map(|b| {
            (0..per_bin)
                .map(|j| f(-1.0 + ((b * per_bin + j) as f64 + 0.5) * h))
                .sum::<f64>()
        })
        .collect();
    let total: f64 = mass.iter().sum();
    mass.into_iter().map(|m| m / total).collect()
}

fn check_continuous_draws(b: &BasisSpec, target: &TargetDensity<'_>, seed: u64) {
    let bins = 40;
    let probs = bin_probabilities(bins, |x| target.eval(&b.phi_eval(&[x]).unwrap()));
    let source = ContinuousSource::new(b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; bins];
    for _ in 0..40_000 {
        let d = source.draw(target, &mut rng, 1_000_000, 1).unwrap();
        let x = d.point[0];
        assert!((target.eval(&d.phi) - d.density).abs() <= 1e-12 * d.density.max(1.0));
        counts[(((x + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let nonempty: Vec<(u64, f64)> = counts
        .into_iter()
        .zip(probs)
        .filter(|&(_, p)| p > 1e-4)
        .collect();
    let (c, p): (Vec<u64>, Vec<f64>) = nonempty.into_iter().unzip();
    let scale: f64 = p.iter().sum();
    let p: Vec<f64> = p.into_iter().map(|v| v / scale).collect();
    let pval = chi_square_p(&c, &p);
    assert!(pval > 1e-3, "chi-square p = {pval}");
}

#[test]
fn rejection_sampler_draws_from_the_target_densities() {
    let b = basis_1d(5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let state = random_state(&b, &mut rng, 3);
    let shift = state.lambda_min() - 0.3;
    let m = state.effective_resistance_density(shift, 0.4).unwrap();
    for gamma_inf in [0.0, 1.5] {
        check_continuous_draws(&b, &TargetDensity::EffectiveResistance { density: &m, gamma_inf }, 11);
    }
    // previous barrier with Tr((A - ℓ I)^{-1}) = 1, as the fixed-increment sampler keeps it
    let (mut lo, mut hi) = (state.lambda_min() - 10.0 * b.len() as f64, state.lambda_min() - 1e-9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if state.trace_shifted_inverse(mid).unwrap() < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = 0.6;
    let w = state.w_density(lo, lo + delta).unwrap();
    for kappa in [0.0, 0.5, 1.0] {
        let threshold = kappa * (1.0 - delta) / delta;
        check_continuous_draws(&b, &TargetDensity::Thresholded { density: &w, threshold }, 12);
    }
}

#[test]
fn rejection_cap_is_reported() {
    let b = basis_1d(3);
    let w = DensityMatrix {
        matrix: DMatrix::identity(3, 3),
        lambda_max: 1.0,
        trace: 3.0,
        kind: DensityKind::WMatrix,
    };
    let target = TargetDensity::Thresholded { density: &w, threshold: 1e9 };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let err = ContinuousSource::new(&b).draw(&target, &mut rng, 100, 7).unwrap_err();
    assert!(matches!(err, Error::RejectionOverflow { .. }), "{err}");
    assert!(err.is_numerical());
}

#[test]
fn discrete_draws_follow_the_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let rows = DMatrix::from_fn(30, 4, |_, _| rng.gen_range(-1.0..1.0));
    let frame = DiscreteFrame::from_rows(rows, true).unwrap();
    let source = DiscreteSource::new(&frame);
    let b = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
    let spd = &b * b.transpose() + DMatrix::identity(4, 4) * 0.1;
    let dm = DensityMatrix {
        lambda_max: spd.symmetric_eigenvalues().max(),
        trace: spd.trace(),
        matrix: spd,
        kind: DensityKind::ShiftedInverseMix,
    };
    let target = TargetDensity::EffectiveResistance { density: &dm, gamma_inf: 0.2 };
    let probs = source.probabilities(&target).unwrap();
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    // orthonormal frame: the mean of φᵀMφ over rows is Tr M
    let mean: f64 = source.densities(&target).iter().sum::<f64>() / 30.0;
    assert!((mean - (dm.trace + 0.2)).abs() <= 1e-10 * mean);
    let mut counts = vec![0u64; 30];
    for _ in 0..60_000 {
        counts[source.draw(&target, &mut rng, 0, 1).unwrap().point] += 1;
    }
    assert!(chi_square_p(&counts, &probs) > 1e-3);
}

#[test]
fn iid_weights_make_the_gram_matrix_unbiased() {
    let b = BasisSpec::for_generating_function(&y(&[0.8, 0.6]), 6).unwrap();
    let n = b.len();
    for strategy in [Strategy::UniformIid, Strategy::ArcsineIid, Strategy::ChristoffelIid] {
        let runs = 3000;
        let mut entries = vec![Vec::with_capacity(runs); n * n];
        for k in 0..runs {
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed(31, k as u64));
            let (pts, w) = iid_sample(strategy, &b, 12, &mut rng).unwrap();
            let g = gram_matrix(&b, &pts, &w).unwrap();
            for (e, v) in entries.iter_mut().zip(g.iter()) {
                e.push(*v);
            }
        }
        let ident = DMatrix::<f64>::identity(n, n);
        for (e, target) in entries.iter().zip(ident.iter()) {
            let (mu, se) = mean_se(e);
            assert!((mu - target).abs() <= 5.0 * se + 1e-12, "{strategy}: {mu} vs {target} (se {se})");
        }
    }
}

#[test]
fn alg1_projection_of_orthogonal_function_is_unbiased() {
    let yy = y(&[0.8, 0.5]);
    let b = BasisSpec::for_generating_function(&yy, 5).unwrap();
    let outside = b.lower_set().margin()[0].clone();
    let g = |x: &[f64]| -> f64 {
        outside
            .entries()
            .iter()
            .zip(x)
            .map(|(&k, &t)| legendre_eval(k, t).unwrap())
            .product()
    };
    let p = Alg1Params::theorem_defaults(5, 10).unwrap();
    let runs = 5000;
    let mut comps: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(runs)).collect();
    for k in 0..runs {
        let s = run_algorithm1(&b, &p, run_seed(41, k as u64)).unwrap();
        let mut acc = DVector::<f64>::zeros(5);
        for (x, w) in s.points.iter().zip(&s.weights) {
            acc += b.phi_eval(x).unwrap() * (w * g(x));
        }
        for (c, v) in comps.iter_mut().zip(acc.iter()) {
            c.push(*v);
        }
    }
    for c in &comps {
        let (mu, se) = mean_se(c);
        assert!(mu.abs() <= 4.0 * se, "mean {mu}, se {se}");
    }
}

#[test]
fn alg1_conditioning_event_failure_rate() {
    let b = BasisSpec::for_generating_function(&y(&[0.9, 0.8, 0.7, 0.6]), 8).unwrap();
    let p = Alg1Params::theorem_defaults(8, 16).unwrap();
    let floor = p.default_floor(8);
    let r: f64 = 17.0 / 8.0;
    assert!((floor - 8.0 * (r.powf(0.25) - 1.0)).abs() < 1e-12);
    let failures = (0..500)
        .filter(|&k| run_algorithm1(&b, &p, run_seed(51, k)).unwrap().lambda_min() < floor)
        .count();
    assert!(failures as f64 / 500.0 <= r.powf(-0.25), "{failures} failures");
    let c = conditional_sample(&b, &p, 5, 50).unwrap();
    assert!(c.sample.lambda_min() >= c.floor);
}

#[test]
fn bernstein_sampler_acceptance_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for k in [1usize, 2, 5, 20] {
        let draws = 50_000u64;
        let rejected: u64 = (0..draws).map(|_| sample_coordinate_legendre_sq(k, &mut rng).1).sum();
        let rate = draws as f64 / (draws + rejected) as f64;
        let exact = k as f64 / (2 * k + 1) as f64;
        assert!(rate >= 1.0 / 3.0 - 0.01, "k = {k}: rate {rate}");
        assert!((rate - exact).abs() < 0.01, "k = {k}: rate {rate} vs {exact}");
    }
}
