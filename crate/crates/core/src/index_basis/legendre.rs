//! Legendre polynomials normalized in `L²([-1, 1], dx/2)`.
//!
//! With `L_k = sqrt(2k+1) P_k` the orthonormal recurrence reads
//!
//! ```text
//! x L_k(x) = a_{k+1} L_{k+1}(x) + a_k L_{k-1}(x),   a_k = k / sqrt(4k² - 1)
//! ```
//!
//! so that `L_k(1) = sqrt(2k+1)`.

use crate::error::{Error, Result};

#[inline]
fn recurrence_coeff(k: usize) -> f64 {
    let k = k as f64;
    k / (4.0 * k * k - 1.0).sqrt()
}

/// Orthonormal Legendre polynomial `L_k(x)`.
pub fn legendre_eval(k: usize, x: f64) -> Result<f64> {
    check_unit_interval(x)?;
    Ok(legendre_unchecked(k, x))
}

pub(crate) fn check_unit_interval(x: f64) -> Result<()> {
    if x.abs() > 1.0 || x.is_nan() {
        return Err(Error::Domain { value: x });
    }
    Ok(())
}

pub(crate) fn legendre_unchecked(k: usize, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = 3f64.sqrt() * x;
    for j in 1..k {
        let next = (x * curr - recurrence_coeff(j) * prev) / recurrence_coeff(j + 1);
        prev = curr;
        curr = next;
    }
    curr
}

/// Fills `out[k] = L_k(x)` for `k = 0..out.len()`.
pub(crate) fn legendre_table(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 3f64.sqrt() * x;
    for j in 1..out.len() - 1 {
        out[j + 1] = (x * out[j] - recurrence_coeff(j) * out[j - 1]) / recurrence_coeff(j + 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    #[test]
    fn constant_polynomial() {
        assert_eq!(legendre_eval(0, 0.3).unwrap(), 1.0);
    }

    #[test]
    fn endpoint_value_is_sqrt_2k_plus_1() {
        assert!((legendre_eval(3, 1.0).unwrap() - 7f64.sqrt()).abs() < 1e-14);
        for k in 0..60 {
            let v = legendre_eval(k, 1.0).unwrap();
            assert!((v - ((2 * k + 1) as f64).sqrt()).abs() < 1e-11 * v, "k={k}");
        }
    }

    #[test]
    fn degree_two_at_origin() {
        let v = legendre_eval(2, 0.0).unwrap();
        assert!((v + 5f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn outside_interval_is_rejected() {
        assert!(matches!(legendre_eval(2, 1.0001), Err(Error::Domain { .. })));
        assert!(legendre_eval(2, f64::NAN).is_err());
    }

    #[test]
    fn table_matches_pointwise() {
        let mut t = vec![0.0; 25];
        legendre_table(-0.37, &mut t);
        for (k, v) in t.iter().enumerate() {
            assert!((v - legendre_unchecked(k, -0.37)).abs() < 1e-13);
        }
    }

    #[test]
    fn orthonormal_under_gauss_quadrature() {
        let rule = GaussLegendre::new(40);
        for i in 0..30 {
            for j in 0..30 {
                let ip: f64 = rule
                    .iter()
                    .map(|(x, w)| w * legendre_unchecked(i, x) * legendre_unchecked(j, x))
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-12, "({i},{j}) -> {ip}");
            }
        }
    }
}
