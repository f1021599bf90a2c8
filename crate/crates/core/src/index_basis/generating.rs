//! The anisotropic test function `g_y(x) = ∏ (1 - 2 x_j y_j + y_j²)^{-1/2}`
//! and its closed-form Legendre coefficients and best-approximation errors.

use crate::error::{Error, Result};
use crate::index_basis::lower_set::{LowerSet, MultiIndex};
use crate::numerics::NeumaierSum;

/// Anisotropy vector `y ∈ (0, 1)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyParams(Vec<f64>);

impl AnisotropyParams {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidParameter("y needs at least one entry".into()));
        }
        if let Some(bad) = y.iter().find(|&&v| !(v > 0.0 && v < 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "y entries must lie in (0, 1), got {bad}"
            )));
        }
        Ok(Self(y))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

fn check_dims(y: &AnisotropyParams, got: usize) -> Result<()> {
    if y.dim() != got {
        return Err(Error::DimensionMismatch {
            expected: y.dim(),
            got,
        });
    }
    Ok(())
}

/// `c_k = ∏ y_j^{k_j} / sqrt(2 k_j + 1)`.
pub fn coefficient(y: &AnisotropyParams, k: &MultiIndex) -> Result<f64> {
    check_dims(y, k.dim())?;
    Ok(coefficient_unchecked(y, k))
}

pub(crate) fn coefficient_unchecked(y: &AnisotropyParams, k: &MultiIndex) -> f64 {
    y.0.iter()
        .zip(k.entries())
        .map(|(&yj, &kj)| yj.powi(kj as i32) / ((2 * kj + 1) as f64).sqrt())
        .product()
}

pub fn g_y_eval(y: &AnisotropyParams, x: &[f64]) -> Result<f64> {
    check_dims(y, x.len())?;
    for &xi in x {
        crate::index_basis::legendre::check_unit_interval(xi)?;
    }
    Ok(g_y_unchecked(y, x))
}

pub(crate) fn g_y_unchecked(y: &AnisotropyParams, x: &[f64]) -> f64 {
    y.0.iter()
        .zip(x)
        .map(|(&yj, &xj)| {
            // (1 - y)² + 2y(1 - x) avoids cancellation near x = 1
            let d = (1.0 - yj) * (1.0 - yj) + 2.0 * yj * (1.0 - xj);
            1.0 / d.sqrt()
        })
        .product()
}

/// `‖g_y‖² = ∏ ln((1+y_j)/(1-y_j)) / (2 y_j)` in `L²(dx/2^d)`.
pub fn g_y_norm_sq(y: &AnisotropyParams) -> f64 {
    y.0.iter()
        .map(|&t| (t.ln_1p() - (-t).ln_1p()) / (2.0 * t))
        .product()
}

/// Sum of `c_k²` over the set, accumulated smallest-first with compensation.
pub fn captured_energy(y: &AnisotropyParams, lset: &LowerSet) -> Result<f64> {
    check_dims(y, lset.dim())?;
    let mut sq: Vec<f64> = lset
        .indices()
        .iter()
        .map(|k| coefficient_unchecked(y, k).powi(2))
        .collect();
    sq.sort_by(f64::total_cmp);
    Ok(sq.into_iter().collect::<NeumaierSum>().value())
}

/// `sqrt(‖g_y‖² - Σ_Λ c_k²)`, the L² error of the orthogonal projection onto the span of `Λ`.
pub fn best_error(y: &AnisotropyParams, lset: &LowerSet) -> Result<f64> {
    let residual = g_y_norm_sq(y) - captured_energy(y, lset)?;
    Ok(residual.max(0.0).sqrt())
}

/// `∏ 1/(1-y_j) - Σ_Λ ∏ y_j^{k_j}`: sup-norm error of the truncated series,
/// an upper bound on the best uniform approximation error.
pub fn truncated_sup_error(y: &AnisotropyParams, lset: &LowerSet) -> Result<f64> {
    check_dims(y, lset.dim())?;
    let full: f64 = y.0.iter().map(|&t| 1.0 / (1.0 - t)).product();
    let mut acc = NeumaierSum::default();
    acc.add(full);
    for k in lset.indices() {
        let term: f64 = y
            .0
            .iter()
            .zip(k.entries())
            .map(|(&t, &e)| t.powi(e as i32))
            .product();
        acc.add(-term);
    }
    Ok(acc.value().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_basis::lower_set::build_lower_set;

    fn y(v: &[f64]) -> AnisotropyParams {
        AnisotropyParams::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_out_of_range_y() {
        assert!(AnisotropyParams::new(vec![0.5, 1.0]).is_err());
        assert!(AnisotropyParams::new(vec![0.0]).is_err());
        assert!(AnisotropyParams::new(vec![]).is_err());
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(coefficient(&y(&[0.3, 0.2]), &vec![0, 0].into()).unwrap(), 1.0);
        let c = coefficient(&y(&[0.9]), &vec![1].into()).unwrap();
        assert!((c - 0.9 / 3f64.sqrt()).abs() < 1e-15);
        let c = coefficient(&y(&[0.9, 0.8]), &vec![1, 1].into()).unwrap();
        assert!((c - 0.24).abs() < 1e-15);
        assert!(coefficient(&y(&[0.9]), &vec![1, 1].into()).is_err());
    }

    #[test]
    fn generating_function_examples() {
        assert!((g_y_eval(&y(&[1e-16]), &[0.3]).unwrap() - 1.0).abs() < 1e-12);
        assert!((g_y_eval(&y(&[0.5]), &[1.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!((g_y_eval(&y(&[0.5, 0.5]), &[0.0, 0.0]).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        assert!((g_y_norm_sq(&y(&[0.5])) - 3f64.ln()).abs() < 1e-15);
        assert!((g_y_norm_sq(&y(&[0.5, 0.5])) - 3f64.ln().powi(2)).abs() < 1e-14);
        assert!(g_y_norm_sq(&y(&[0.9, 0.8, 0.7, 0.6])) > 1.0);
    }

    #[test]
    fn best_error_single_index() {
        let lset = build_lower_set(&y(&[0.5]), 1).unwrap();
        let e = best_error(&y(&[0.5]), &lset).unwrap();
        assert!((e - (3f64.ln() - 1.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn best_error_vanishes_for_full_expansion() {
        let yy = y(&[0.3]);
        // 0.3^k / sqrt(2k+1) < 1e-17 once k > 32
        let lset = build_lower_set(&yy, 40).unwrap();
        assert!(best_error(&yy, &lset).unwrap() < 1e-7);
    }

    #[test]
    fn reference_best_error_in_four_dimensions() {
        let yy = y(&[0.9, 0.8, 0.7, 0.6]);
        let lset = build_lower_set(&yy, 128).unwrap();
        let e = best_error(&yy, &lset).unwrap();
        assert!((e - 0.402882).abs() < 5e-6, "{e}");
    }

    #[test]
    fn geometric_sup_tail() {
        let yy = y(&[0.5]);
        let lset = build_lower_set(&yy, 10).unwrap();
        let tail = truncated_sup_error(&yy, &lset).unwrap();
        assert!((tail - 0.5f64.powi(10) / 0.5).abs() < 1e-14);
    }
}
