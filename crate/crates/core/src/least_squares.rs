//! Weighted least-squares projection from a weighted sample, with exact and
//! quadrature-based error metrics.

use nalgebra::{DMatrix, DVector};

use crate::barrier::BarrierState;
use crate::error::{Error, Result};
use crate::index_basis::generating::{coefficient_unchecked, g_y_unchecked};
use crate::index_basis::{best_error, AnisotropyParams, BasisSpec};
use crate::quadrature::TensorRule;
use crate::sampling::WeightedSample;

/// Relative spectral gap below which the Gram matrix is treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Largest tensor grid accepted by [`sup_error_grid`].
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// A function on the cube, optionally with a closed-form L² error oracle.
pub trait TargetFunction: Sync {
    fn eval(&self, x: &[f64]) -> f64;

    /// Exact `‖f - Σ a_k L_k‖_{L²}`, when available.
    fn exact_l2_error(&self, _basis: &BasisSpec, _coeffs: &[f64]) -> Option<f64> {
        None
    }

    /// Exact `min_{v ∈ V_n} ‖f - v‖_{L²}`, when available.
    fn best_l2_error(&self, _basis: &BasisSpec) -> Option<f64> {
        None
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> TargetFunction for F {
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// The generating function `g_y(x) = ∏ (1 - 2 x_j y_j + y_j²)^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingFunction {
    pub y: AnisotropyParams,
}

impl GeneratingFunction {
    pub fn new(y: AnisotropyParams) -> Self {
        Self { y }
    }
}

impl TargetFunction for GeneratingFunction {
    fn eval(&self, x: &[f64]) -> f64 {
        g_y_unchecked(&self.y, x)
    }

    fn exact_l2_error(&self, basis: &BasisSpec, coeffs: &[f64]) -> Option<f64> {
        l2_error_analytic(&self.y, basis, coeffs).ok()
    }

    fn best_l2_error(&self, basis: &BasisSpec) -> Option<f64> {
        best_error(&self.y, basis.lower_set()).ok()
    }
}

/// Coefficients of `P_n^m f` with the Gram spectrum and error diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coefficients: DVector<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub condition_number: f64,
    /// `‖A a - Lᵀ f‖ / ‖Lᵀ f‖`.
    pub normal_residual: f64,
    pub l2_error: Option<f64>,
    pub best_error: Option<f64>,
    /// `l2_error / best_error`.
    pub error_ratio: Option<f64>,
    pub sup_error: Option<f64>,
}

/// Fits `f` on the points and weights of a continuous sample, reusing the
/// sampler's Gram matrix and its eigendecomposition.
pub fn fit<F: TargetFunction + ?Sized>(
    basis: &BasisSpec,
    sample: &WeightedSample,
    f: &F,
) -> Result<FitResult> {
    if sample.final_state.n() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: sample.final_state.n(),
        });
    }
    solve(basis, &sample.final_state, &sample.points, &sample.weights, f)
}

/// Fits `f` with arbitrary weights; the Gram matrix is rebuilt from scratch.
pub fn fit_with_weights<F: TargetFunction + ?Sized>(
    basis: &BasisSpec,
    points: &[Vec<f64>],
    weights: &[f64],
    f: &F,
) -> Result<FitResult> {
    if points.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            got: weights.len(),
        });
    }
    let state = BarrierState::from_gram(gram_matrix(basis, points, weights)?, f64::NEG_INFINITY)?;
    solve(basis, &state, points, weights, f)
}

/// `Σ s_i φ(x_i) φ(x_i)ᵀ`.
pub fn gram_matrix(basis: &BasisSpec, points: &[Vec<f64>], weights: &[f64]) -> Result<DMatrix<f64>> {
    let n = basis.len();
    let mut a = DMatrix::zeros(n, n);
    for (x, &s) in points.iter().zip(weights) {
        let phi = basis.phi_eval(x)?;
        a.ger(s, &phi, &phi, 1.0);
    }
    Ok(a)
}

fn solve<F: TargetFunction + ?Sized>(
    basis: &BasisSpec,
    state: &BarrierState,
    points: &[Vec<f64>],
    weights: &[f64],
    f: &F,
) -> Result<FitResult> {
    let lambda_min = state.lambda_min();
    let lambda_max = state.lambda_max();
    if !(lambda_min > SINGULAR_TOLERANCE * lambda_max) {
        return Err(Error::SingularGram {
            lambda_min,
            lambda_max,
        });
    }
    let n = basis.len();
    let mut rhs = DVector::zeros(n);
    for (x, &s) in points.iter().zip(weights) {
        let phi = basis.phi_eval(x)?;
        rhs.axpy(s * f.eval(x), &phi, 1.0);
    }
    let u = state.eigenvectors();
    let projected = u.transpose() * &rhs;
    let scaled = projected.component_div(state.eigenvalues());
    let coefficients = u * scaled;

    let residual = (state.gram() * &coefficients - &rhs).norm();
    let scale = rhs.norm();
    let normal_residual = if scale > 0.0 { residual / scale } else { residual };

    let l2_error = f.exact_l2_error(basis, coefficients.as_slice());
    let best = f.best_l2_error(basis);
    let error_ratio = match (l2_error, best) {
        (Some(e), Some(b)) if b > 0.0 => Some(e / b),
        _ => None,
    };
    Ok(FitResult {
        coefficients,
        lambda_min,
        lambda_max,
        condition_number: lambda_max / lambda_min,
        normal_residual,
        l2_error,
        best_error: best,
        error_ratio,
        sup_error: None,
    })
}

/// `‖g_y - Σ a_k L_k‖_{L²}` by Parseval: `sqrt(E² + Σ_Λ (a_k - c_k)²)` with
/// `E` the best error.
pub fn l2_error_analytic(y: &AnisotropyParams, basis: &BasisSpec, coeffs: &[f64]) -> Result<f64> {
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: coeffs.len(),
        });
    }
    let best = best_error(y, basis.lower_set())?;
    let dev: f64 = basis
        .lower_set()
        .indices()
        .iter()
        .zip(coeffs)
        .map(|(k, a)| (a - coefficient_unchecked(y, k)).powi(2))
        .sum();
    Ok((best * best + dev).sqrt())
}

/// `‖f - Σ a_k L_k‖_{L²}` by tensor Gauss–Legendre quadrature of the given order.
pub fn l2_error_quadrature<F: TargetFunction + ?Sized>(
    basis: &BasisSpec,
    coeffs: &[f64],
    f: &F,
    order: usize,
) -> Result<f64> {
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: coeffs.len(),
        });
    }
    let rule = TensorRule::new(order, basis.dim());
    let mut phi = vec![0.0; basis.len()];
    let sq = rule.integrate(|x| {
        basis.phi_into(x, &mut phi);
        let v: f64 = phi.iter().zip(coeffs).map(|(p, a)| p * a).sum();
        (f.eval(x) - v).powi(2)
    });
    Ok(sq.max(0.0).sqrt())
}

/// `max |f - Σ a_k L_k|` over the tensor grid with `points_per_dim` equispaced
/// nodes per axis, endpoints included.
pub fn sup_error_grid<F: TargetFunction + ?Sized>(
    basis: &BasisSpec,
    coeffs: &[f64],
    f: &F,
    points_per_dim: usize,
) -> Result<f64> {
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: coeffs.len(),
        });
    }
    if points_per_dim < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points per axis".into()));
    }
    let d = basis.dim();
    let size = (points_per_dim as f64).powi(d as i32);
    if size > MAX_GRID_POINTS as f64 {
        return Err(Error::GridTooLarge {
            size,
            limit: MAX_GRID_POINTS,
        });
    }
    let axis: Vec<f64> = (0..points_per_dim)
        .map(|i| -1.0 + 2.0 * i as f64 / (points_per_dim - 1) as f64)
        .collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut phi = vec![0.0; basis.len()];
    let mut worst: f64 = 0.0;
    loop {
        for (xj, &ij) in x.iter_mut().zip(&idx) {
            *xj = axis[ij];
        }
        basis.phi_into(&x, &mut phi);
        let v: f64 = phi.iter().zip(coeffs).map(|(p, a)| p * a).sum();
        worst = worst.max((f.eval(&x) - v).abs());
        let mut j = 0;
        loop {
            if j == d {
                return Ok(worst);
            }
            idx[j] += 1;
            if idx[j] < points_per_dim {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `f(x_i) - (P f)(x_i)` at every sample point.
pub fn nodal_residuals<F: TargetFunction + ?Sized>(
    basis: &BasisSpec,
    coeffs: &[f64],
    points: &[Vec<f64>],
    f: &F,
) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|x| Ok(f.eval(x) - basis.eval_expansion(coeffs, x)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_basis::{truncated_sup_error, LowerSet, MultiIndex};

    fn basis_1d(n: usize) -> BasisSpec {
        let set = LowerSet::new(1, (0..n).map(|k| MultiIndex::from(vec![k])).collect()).unwrap();
        BasisSpec::new(set).unwrap()
    }

    fn series(y: &AnisotropyParams, basis: &BasisSpec) -> Vec<f64> {
        basis
            .lower_set()
            .indices()
            .iter()
            .map(|k| coefficient_unchecked(y, k))
            .collect()
    }

    #[test]
    fn analytic_error_examples() {
        let y = AnisotropyParams::new(vec![0.5]).unwrap();
        let basis = basis_1d(5);
        let c = series(&y, &basis);
        let best = best_error(&y, basis.lower_set()).unwrap();
        assert!((l2_error_analytic(&y, &basis, &c).unwrap() - best).abs() < 1e-15);
        let zero = vec![0.0; 5];
        let norm = crate::index_basis::g_y_norm_sq(&y).sqrt();
        assert!((l2_error_analytic(&y, &basis, &zero).unwrap() - norm).abs() < 1e-12);
    }

    #[test]
    fn analytic_error_matches_quadrature() {
        let y = AnisotropyParams::new(vec![0.6]).unwrap();
        let g = GeneratingFunction::new(y.clone());
        let basis = basis_1d(6);
        let a = [0.9, 0.3, -0.2, 0.1, 0.05, 0.0];
        let exact = l2_error_analytic(&y, &basis, &a).unwrap();
        let quad = l2_error_quadrature(&basis, &a, &g, 200).unwrap();
        assert!((exact - quad).abs() < 1e-8, "{exact} vs {quad}");
    }

    #[test]
    fn sup_error_geometric_tail() {
        let y = AnisotropyParams::new(vec![0.5]).unwrap();
        let g = GeneratingFunction::new(y.clone());
        let basis = basis_1d(10);
        let c = series(&y, &basis);
        let tail = 0.5f64.powi(10) / 0.5;
        let sup = sup_error_grid(&basis, &c, &g, 101).unwrap();
        assert!((sup - tail).abs() < 1e-12);
        assert!((truncated_sup_error(&y, basis.lower_set()).unwrap() - tail).abs() < 1e-12);
    }

    #[test]
    fn grid_guard() {
        let set = LowerSet::new(4, vec![MultiIndex::zero(4)]).unwrap();
        let basis = BasisSpec::new(set).unwrap();
        let f = |_: &[f64]| 1.0;
        assert!(matches!(
            sup_error_grid(&basis, &[1.0], &f, 100),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn reproduces_functions_in_the_space() {
        let basis = basis_1d(4);
        let want = [0.3, -1.0, 0.5, 2.0];
        let f = |x: &[f64]| basis.eval_expansion(&want, x).unwrap();
        let points: Vec<Vec<f64>> = (0..9).map(|i| vec![-1.0 + 0.25 * i as f64]).collect();
        let weights = vec![1.0; 9];
        let fitres = fit_with_weights(&basis, &points, &weights, &f).unwrap();
        for (a, b) in fitres.coefficients.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(fitres.normal_residual < 1e-12);
        let err = l2_error_quadrature(&basis, fitres.coefficients.as_slice(), &f, 10).unwrap();
        assert!(err < 1e-10);
    }

    #[test]
    fn singular_gram_is_reported() {
        let basis = basis_1d(3);
        let points = vec![vec![0.1], vec![0.1], vec![0.1]];
        let f = |_: &[f64]| 0.0;
        assert!(matches!(
            fit_with_weights(&basis, &points, &[1.0; 3], &f),
            Err(Error::SingularGram { .. })
        ));
    }
}
