//! Exact sampling from the Christoffel measure `(1/n) |φ(x)|² dμ` of a tensor
//! Legendre basis.
//!
//! A multi-index `k` is drawn uniformly in `Λ`, then each coordinate is drawn
//! independently from `|L_{k_j}(x)|² dx/2`: directly from the uniform law when
//! `k_j = 0`, otherwise by rejection from the arcsine law with the Bernstein
//! envelope `|L_k(x)|²/2 ≤ ((2k+1)/k) / (π sqrt(1 - x²))`.

use std::f64::consts::PI;

use rand::distributions::Open01;
use rand::Rng;

use crate::index_basis::legendre::legendre_unchecked;
use crate::index_basis::BasisSpec;

/// Envelope constant `(2k+1)/k` of the Bernstein inequality, `k ≥ 1`.
pub fn bernstein_constant(k: usize) -> f64 {
    assert!(k >= 1, "Bernstein envelope is only used for k >= 1");
    (2 * k + 1) as f64 / k as f64
}

/// Ratio target / envelope at `x`; at most one by the Bernstein inequality.
pub fn envelope_ratio(k: usize, x: f64) -> f64 {
    let l = legendre_unchecked(k, x);
    0.5 * l * l * PI * (1.0 - x * x).sqrt() / bernstein_constant(k)
}

/// `cos(π u)`, the arcsine variate for a uniform `u ∈ (0, 1)`.
pub fn arcsine_from_uniform(u: f64) -> f64 {
    (PI * u).cos()
}

/// Draw from the arcsine density `1 / (π sqrt(1 - x²))` on `(-1, 1)`.
pub fn sample_arcsine_coordinate<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    arcsine_from_uniform(u)
}

/// Draw from `|L_k(x)|² dx/2`; returns the point and the number of rejected candidates.
pub fn sample_coordinate_legendre_sq<R: Rng + ?Sized>(k: usize, rng: &mut R) -> (f64, u64) {
    if k == 0 {
        return (rng.gen_range(-1.0..=1.0), 0);
    }
    let mut rejections = 0;
    loop {
        let x = sample_arcsine_coordinate(rng);
        let u: f64 = rng.gen();
        if u < envelope_ratio(k, x) {
            return (x, rejections);
        }
        rejections += 1;
    }
}

/// Christoffel-measure sampler bound to a basis.
#[derive(Debug, Clone, Copy)]
pub struct ChristoffelSampler<'a> {
    basis: &'a BasisSpec,
}

impl<'a> ChristoffelSampler<'a> {
    pub fn new(basis: &'a BasisSpec) -> Self {
        Self { basis }
    }

    pub fn basis(&self) -> &'a BasisSpec {
        self.basis
    }

    /// One point and the total number of coordinate rejections spent on it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, u64) {
        let indices = self.basis.lower_set().indices();
        let k = &indices[rng.gen_range(0..indices.len())];
        let mut rejections = 0;
        let x = k
            .entries()
            .iter()
            .map(|&kj| {
                let (xj, r) = sample_coordinate_legendre_sq(kj, rng);
                rejections += r;
                xj
            })
            .collect();
        (x, rejections)
    }
}
