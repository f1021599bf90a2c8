//! Lower-barrier bookkeeping shared by both samplers.
//!
//! A [`BarrierState`] holds the running Gram matrix `A`, the barrier `ℓ`
//! and an eigendecomposition of `A`. Shifted inverses `(A - t I)^{-1}` are
//! read off the cached spectrum.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative margin below which a shift is considered to have reached `λ_min`.
pub const BARRIER_TOLERANCE: f64 = 1e-10;

/// Which matrix a [`DensityMatrix`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// `Z + γ I / n`
    ShiftedInverseMix,
    /// `(Tr Z - Tr Y)^{-1} Z² - Z`
    WMatrix,
}

/// Symmetric matrix `M` defining a density `x ↦ φ(x)ᵀ M φ(x)`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub matrix: DMatrix<f64>,
    pub lambda_max: f64,
    pub trace: f64,
    pub kind: DensityKind,
}

impl DensityMatrix {
    pub fn quadratic_form(&self, v: &DVector<f64>) -> f64 {
        quadratic_form(&self.matrix, v)
    }
}

pub fn quadratic_form(m: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(m * v))
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Ascending eigenvalues with matching orthonormal eigenvector columns.
fn sorted_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&j| eig.eigenvalues[j]));
    let vectors = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    (values, vectors)
}

/// `U diag(f(λ)) Uᵀ`.
fn spectral_function(vectors: &DMatrix<f64>, weights: &DVector<f64>) -> DMatrix<f64> {
    let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors[(i, j)] * weights[j]
    });
    let mut out = scaled * vectors.transpose();
    symmetrize(&mut out);
    out
}

/// Running Gram matrix, lower barrier and cached spectrum.
#[derive(Debug, Clone)]
pub struct BarrierState {
    gram: DMatrix<f64>,
    barrier: f64,
    iteration: usize,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl BarrierState {
    /// `A = 0` with barrier `ℓ`.
    pub fn new(n: usize, barrier: f64) -> Self {
        Self {
            gram: DMatrix::zeros(n, n),
            barrier,
            iteration: 0,
            eigenvalues: DVector::zeros(n),
            eigenvectors: DMatrix::identity(n, n),
        }
    }

    pub fn from_gram(mut gram: DMatrix<f64>, barrier: f64) -> Result<Self> {
        if gram.nrows() != gram.ncols() {
            return Err(Error::DimensionMismatch {
                expected: gram.nrows(),
                got: gram.ncols(),
            });
        }
        symmetrize(&mut gram);
        let (eigenvalues, eigenvectors) = sorted_eigen(&gram);
        Ok(Self {
            gram,
            barrier,
            iteration: 0,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn n(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn barrier(&self) -> f64 {
        self.barrier
    }

    pub fn set_barrier(&mut self, barrier: f64) {
        self.barrier = barrier;
    }

    /// Number of rank-one updates applied so far.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.n() - 1]
    }

    pub fn condition_number(&self) -> f64 {
        self.lambda_max() / self.lambda_min()
    }

    /// `λ_min(A) - ℓ`.
    pub fn barrier_gap(&self) -> f64 {
        self.lambda_min() - self.barrier
    }

    fn check_shift(&self, shift: f64) -> Result<()> {
        let tol = BARRIER_TOLERANCE * self.lambda_max().abs().max(1.0);
        if !(shift < self.lambda_min() - tol) {
            return Err(Error::BarrierViolation {
                iteration: self.iteration,
                shift,
                lambda_min: self.lambda_min(),
            });
        }
        Ok(())
    }

    /// Eigenvalues `1 / (λ_j - shift)` of the shifted inverse, in the eigenvector order.
    pub fn shifted_inverse_eigenvalues(&self, shift: f64) -> Result<DVector<f64>> {
        self.check_shift(shift)?;
        Ok(self.eigenvalues.map(|l| 1.0 / (l - shift)))
    }

    /// `Tr((A - shift I)^{-1})`.
    pub fn trace_shifted_inverse(&self, shift: f64) -> Result<f64> {
        Ok(self.shifted_inverse_eigenvalues(shift)?.sum())
    }

    /// `(A - shift I)^{-1}` from the cached spectrum.
    pub fn shifted_inverse(&self, shift: f64) -> Result<DMatrix<f64>> {
        let w = self.shifted_inverse_eigenvalues(shift)?;
        Ok(spectral_function(&self.eigenvectors, &w))
    }

    /// `Z + (γ/n) I` with `Z = (A - shift I)^{-1}`; `λ_max` is exact since the
    /// mixture shifts the whole spectrum.
    pub fn effective_resistance_density(&self, shift: f64, gamma: f64) -> Result<DensityMatrix> {
        let n = self.n() as f64;
        let z = self.shifted_inverse_eigenvalues(shift)?;
        let m = z.map(|v| v + gamma / n);
        Ok(DensityMatrix {
            matrix: spectral_function(&self.eigenvectors, &m),
            lambda_max: m.max(),
            trace: m.sum(),
            kind: DensityKind::ShiftedInverseMix,
        })
    }

    /// `W = (Tr Z - Tr Y)^{-1} Z² - Z` with `Y = (A - prev I)^{-1}` and
    /// `Z = (A - shift I)^{-1}`, built from the shared eigenbasis.
    pub fn w_density(&self, prev_shift: f64, shift: f64) -> Result<DensityMatrix> {
        let y = self.shifted_inverse_eigenvalues(prev_shift)?;
        let z = self.shifted_inverse_eigenvalues(shift)?;
        let gap = z.sum() - y.sum();
        if !(gap >= 1e-14) {
            return Err(Error::DegenerateWMatrix { gap });
        }
        let w = z.map(|v| v * v / gap - v);
        Ok(DensityMatrix {
            matrix: spectral_function(&self.eigenvectors, &w),
            lambda_max: w.max(),
            trace: w.sum(),
            kind: DensityKind::WMatrix,
        })
    }

    /// `A ← A + s v vᵀ`, then refreshes the spectrum.
    pub fn rank_one_update(&mut self, v: &DVector<f64>, s: f64) {
        debug_assert!(s > 0.0, "rank-one weight must be positive");
        self.gram.ger(s, v, v, 1.0);
        symmetrize(&mut self.gram);
        let (values, vectors) = sorted_eigen(&self.gram);
        self.eigenvalues = values;
        self.eigenvectors = vectors;
        self.iteration += 1;
    }

    /// `‖U diag(λ) Uᵀ - A‖_F`.
    pub fn reconstruction_error(&self) -> f64 {
        let rebuilt = spectral_function(&self.eigenvectors, &self.eigenvalues);
        (rebuilt - &self.gram).norm()
    }
}

/// `W = (Tr Z - Tr Y)^{-1} Z² - Z` for arbitrary symmetric `Z ≻ Y`.
pub fn w_matrix(z: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DensityMatrix> {
    let gap = z.trace() - y.trace();
    if !(gap >= 1e-14) {
        return Err(Error::DegenerateWMatrix { gap });
    }
    let mut w = (z * z) / gap - z;
    symmetrize(&mut w);
    let (values, _) = sorted_eigen(&w);
    Ok(DensityMatrix {
        trace: w.trace(),
        lambda_max: values[values.len() - 1],
        matrix: w,
        kind: DensityKind::WMatrix,
    })
}

/// `Tr((Z^{-1} + s v vᵀ)^{-1}) = Tr Z - vᵀZ²v / (1/s + vᵀZv)` (Sherman–Morrison).
pub fn trace_y_next(z: &DMatrix<f64>, v: &DVector<f64>, s: f64) -> f64 {
    let zv = z * v;
    z.trace() - zv.norm_squared() / (1.0 / s + v.dot(&zv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &b * b.transpose() + DMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn barrier_at_lambda_min_is_a_violation() {
        let s = BarrierState::new(2, -2.0);
        assert!(matches!(
            s.shifted_inverse(0.0),
            Err(Error::BarrierViolation { .. })
        ));
        assert!(s.shifted_inverse(-1e-12).is_err());
        assert!(s.shifted_inverse(-1e-9).is_ok());
    }

    #[test]
    fn shifted_inverse_examples() {
        let s = BarrierState::new(2, 0.0);
        let y = s.shifted_inverse(-2.0).unwrap();
        assert!((y - DMatrix::identity(2, 2) * 0.5).norm() < 1e-15);

        let s = BarrierState::from_gram(DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 5.0])), 0.0)
            .unwrap();
        let y = s.shifted_inverse(1.0).unwrap();
        let want = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.25]));
        assert!((y - want).norm() < 1e-15);
        assert!(matches!(
            s.shifted_inverse(3.0),
            Err(Error::BarrierViolation { .. })
        ));
    }

    #[test]
    fn shifted_inverse_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_spd(4, &mut rng);
            let s = BarrierState::from_gram(a.clone(), 0.0).unwrap();
            let shift = s.lambda_min() - 0.3;
            let dense = (a - DMatrix::identity(4, 4) * shift).try_inverse().unwrap();
            assert!((s.shifted_inverse(shift).unwrap() - dense).norm() < 1e-9);
        }
    }

    #[test]
    fn w_matrix_identity_and_diagonal_example() {
        let n = 2.0;
        let z = DMatrix::identity(2, 2) * (2.0 / n);
        let y = DMatrix::identity(2, 2) * (1.0 / n);
        let w = w_matrix(&z, &y).unwrap();
        assert!(w.matrix.norm() < 1e-15);

        let z = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
        let y = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.8]));
        let w = w_matrix(&z, &y).unwrap();
        assert!((w.matrix[(0, 0)] - (4.0 / 1.2 - 2.0)).abs() < 1e-14);
        assert!((w.matrix[(1, 1)] - (1.0 / 1.2 - 1.0)).abs() < 1e-14);
        assert!((w.lambda_max - (4.0 / 1.2 - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn w_matrix_degenerate_gap() {
        let z = DMatrix::identity(2, 2);
        assert!(matches!(
            w_matrix(&z, &z),
            Err(Error::DegenerateWMatrix { .. })
        ));
    }

    #[test]
    fn w_density_agrees_with_generic_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_spd(5, &mut rng);
        let s = BarrierState::from_gram(a, 0.0).unwrap();
        let prev = s.lambda_min() - 2.0;
        let shift = prev + 0.5;
        let fast = s.w_density(prev, shift).unwrap();
        let slow = w_matrix(
            &s.shifted_inverse(shift).unwrap(),
            &s.shifted_inverse(prev).unwrap(),
        )
        .unwrap();
        assert!((fast.matrix - slow.matrix).norm() < 1e-10);
        assert!((fast.lambda_max - slow.lambda_max).abs() < 1e-10);
    }

    #[test]
    fn rank_one_update_examples() {
        let mut s = BarrierState::new(3, -3.0);
        s.rank_one_update(&DVector::from_vec(vec![1.0, 0.0, 0.0]), 2.0);
        assert_eq!(s.gram()[(0, 0)], 2.0);
        assert_eq!(s.gram().sum(), 2.0);

        let mut s = BarrierState::from_gram(DMatrix::identity(2, 2), 0.0).unwrap();
        let h = 0.5f64.sqrt();
        s.rank_one_update(&DVector::from_vec(vec![h, h]), 1.0);
        assert!((s.lambda_min() - 1.0).abs() < 1e-14);
        assert!((s.lambda_max() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trace_y_next_examples() {
        let z = DMatrix::identity(3, 3) / 3.0;
        assert!((trace_y_next(&z, &DVector::zeros(3), 4.0) - 1.0).abs() < 1e-15);
        let z = DMatrix::identity(2, 2);
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        assert!((trace_y_next(&z, &e1, 1.0) - 1.5).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn updates_interlace_and_cache_stays_consistent(seed in any::<u64>(), steps in 1usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 5;
            let mut s = BarrierState::new(n, -(n as f64));
            for _ in 0..steps {
                let before = s.eigenvalues().clone();
                let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
                s.rank_one_update(&v, rng.gen_range(0.1..3.0));
                for (new, old) in s.eigenvalues().iter().zip(before.iter()) {
                    prop_assert!(*new >= old - 1e-10);
                }
                prop_assert!(s.reconstruction_error() <= 1e-8 * s.gram().norm().max(1e-300));
            }
        }
    }
}
