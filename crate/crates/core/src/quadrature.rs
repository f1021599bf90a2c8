//! Gauss–Legendre quadrature for the probability measure `dx/2` on `[-1, 1]`
//! and its tensor products on the cube.
//!
//! Nodes and weights come from the Golub–Welsch eigenvalue problem for the
//! Jacobi matrix of the Legendre family, so this module does not share code
//! with the polynomial evaluation in [`crate::index_basis`].

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of an `order`-point rule; weights sum to one.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule exact for polynomials of degree `< 2 * order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let mut jacobi = DMatrix::<f64>::zeros(order, order);
        for k in 1..order {
            let kf = k as f64;
            let b = kf / (4.0 * kf * kf - 1.0).sqrt();
            jacobi[(k - 1, k)] = b;
            jacobi[(k, k - 1)] = b;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..order)
            .map(|j| {
                let v0 = eig.eigenvectors[(0, j)];
                (eig.eigenvalues[j], v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integral of `f` against `dx/2`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Tensor product of a one-dimensional rule over `[-1, 1]^dim`.
#[derive(Debug, Clone)]
pub struct TensorRule {
    rule: GaussLegendre,
    dim: usize,
}

impl TensorRule {
    pub fn new(order: usize, dim: usize) -> Self {
        Self {
            rule: GaussLegendre::new(order),
            dim,
        }
    }

    pub fn num_points(&self) -> usize {
        self.rule.len().pow(self.dim as u32)
    }

    /// Integral of `f` against the uniform probability measure on the cube.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        let q = self.rule.len();
        let mut idx = vec![0usize; self.dim];
        let mut point = vec![0.0; self.dim];
        let mut total = 0.0;
        let mut comp = 0.0;
        for _ in 0..self.num_points() {
            let mut w = 1.0;
            for j in 0..self.dim {
                point[j] = self.rule.nodes[idx[j]];
                w *= self.rule.weights[idx[j]];
            }
            // Kahan summation
            let term = w * f(&point) - comp;
            let t = total + term;
            comp = (t - total) - term;
            total = t;
            for i in idx.iter_mut() {
                *i += 1;
                if *i < q {
                    break;
                }
                *i = 0;
            }
        }
        total
    }
}
