//! Lower sets of multi-indices and the tensorized Legendre basis they span.

pub mod generating;
pub mod legendre;
pub mod lower_set;

use nalgebra::DVector;

use crate::error::{Error, Result};

pub use generating::{
    best_error, captured_energy, coefficient, g_y_eval, g_y_norm_sq, truncated_sup_error,
    AnisotropyParams,
};
pub use legendre::legendre_eval;
pub use lower_set::{build_lower_set, LowerSet, MultiIndex};

/// Reference measure on `[-1, 1]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measure {
    /// `dx / 2^d`.
    #[default]
    UniformCube,
}

/// Orthonormal basis `L_k(x) = ∏ L_{k_j}(x_j)`, `k ∈ Λ`.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    lower_set: LowerSet,
    measure: Measure,
    max_degrees: Vec<usize>,
}

impl BasisSpec {
    pub fn new(lower_set: LowerSet) -> Result<Self> {
        if lower_set.is_empty() {
            return Err(Error::InvalidParameter("basis needs a nonempty lower set".into()));
        }
        let max_degrees = lower_set.max_degrees();
        Ok(Self {
            lower_set,
            measure: Measure::UniformCube,
            max_degrees,
        })
    }

    /// Basis spanned by the `n` largest coefficients of `g_y`.
    pub fn for_generating_function(y: &AnisotropyParams, n: usize) -> Result<Self> {
        Self::new(build_lower_set(y, n)?)
    }

    pub fn lower_set(&self) -> &LowerSet {
        &self.lower_set
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    /// Number of basis functions `n`.
    pub fn len(&self) -> usize {
        self.lower_set.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.lower_set.dim()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        for &xi in x {
            legendre::check_unit_interval(xi)?;
        }
        Ok(())
    }

    /// `φ(x)` ordered like the lower set.
    pub fn phi_eval(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_point(x)?;
        let mut out = DVector::zeros(self.len());
        self.phi_into(x, out.as_mut_slice());
        Ok(out)
    }

    /// Writes `φ(x)` into `out` without validating `x`.
    pub fn phi_into(&self, x: &[f64], out: &mut [f64]) {
        let tables: Vec<Vec<f64>> = x
            .iter()
            .zip(&self.max_degrees)
            .map(|(&xj, &deg)| {
                let mut t = vec![0.0; deg + 1];
                legendre::legendre_table(xj, &mut t);
                t
            })
            .collect();
        for (o, k) in out.iter_mut().zip(self.lower_set.indices()) {
            *o = k
                .entries()
                .iter()
                .zip(&tables)
                .map(|(&kj, t)| t[kj])
                .product();
        }
    }

    /// Christoffel function `|φ(x)|²`.
    pub fn christoffel(&self, x: &[f64]) -> Result<f64> {
        Ok(self.phi_eval(x)?.norm_squared())
    }

    /// `K_n = sup_x |φ(x)|² = Σ_Λ ∏ (2 k_j + 1)`, attained at the corner `(1, …, 1)`.
    pub fn christoffel_sup(&self) -> f64 {
        self.lower_set
            .indices()
            .iter()
            .map(|k| k.entries().iter().map(|&e| (2 * e + 1) as f64).product::<f64>())
            .sum()
    }

    /// `Σ_Λ a_k L_k(x)`.
    pub fn eval_expansion(&self, coeffs: &[f64], x: &[f64]) -> Result<f64> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: coeffs.len(),
            });
        }
        let phi = self.phi_eval(x)?;
        Ok(phi.iter().zip(coeffs).map(|(p, c)| p * c).sum())
    }
}

/// Arcsine-measure Christoffel supremum `Σ_Λ 2^{|k|_0}`, documented reference value.
pub fn arcsine_christoffel_sup(lset: &LowerSet) -> f64 {
    lset.indices()
        .iter()
        .map(|k| 2f64.powi(k.support_size() as i32))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(idx: &[&[usize]]) -> BasisSpec {
        let dim = idx[0].len();
        let set = LowerSet::new(dim, idx.iter().map(|k| k.to_vec().into()).collect()).unwrap();
        BasisSpec::new(set).unwrap()
    }

    #[test]
    fn phi_examples() {
        let b = basis(&[&[0, 0]]);
        assert_eq!(b.phi_eval(&[0.2, -0.5]).unwrap().as_slice(), &[1.0]);

        let b = basis(&[&[0, 0], &[1, 0], &[0, 1]]);
        let phi = b.phi_eval(&[1.0, 1.0]).unwrap();
        let s3 = 3f64.sqrt();
        for (got, want) in phi.iter().zip([1.0, s3, s3]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!((b.christoffel(&[1.0, 1.0]).unwrap() - 7.0).abs() < 1e-13);

        let b = basis(&[&[0, 0], &[1, 0]]);
        let phi = b.phi_eval(&[0.4, 0.9]).unwrap();
        assert!((phi[1] - s3 * 0.4).abs() < 1e-15);
    }

    #[test]
    fn phi_rejects_bad_points() {
        let b = basis(&[&[0, 0], &[1, 0]]);
        assert!(matches!(
            b.phi_eval(&[0.1]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(b.phi_eval(&[0.1, 1.5]), Err(Error::Domain { .. })));
    }

    #[test]
    fn univariate_christoffel_at_endpoint() {
        for n in 1..20 {
            let set = LowerSet::new(1, (0..n).map(|k| vec![k].into()).collect()).unwrap();
            let b = BasisSpec::new(set).unwrap();
            assert!((b.christoffel(&[1.0]).unwrap() - (n * n) as f64).abs() < 1e-9);
            assert_eq!(b.christoffel_sup(), (n * n) as f64);
            assert_eq!(arcsine_christoffel_sup(b.lower_set()), (2 * n - 1) as f64);
        }
    }

    #[test]
    fn empty_lower_set_is_rejected() {
        let set = LowerSet::new(2, vec![]).unwrap();
        assert!(BasisSpec::new(set).is_err());
    }
}
