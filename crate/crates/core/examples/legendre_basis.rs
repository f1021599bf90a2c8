//! Builds the lower set of the `n` largest Legendre coefficients of the
//! generating function and reports its best approximation errors.
//!
//! cargo run --example legendre_basis -- [n]

use barrier_sampling::index_basis::{best_error, g_y_norm_sq, truncated_sup_error};
use barrier_sampling::{AnisotropyParams, BasisSpec, Result};

fn main() -> Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(128);
    let y = AnisotropyParams::new(vec![0.9, 0.8, 0.7, 0.6])?;
    let basis = BasisSpec::for_generating_function(&y, n)?;
    let set = basis.lower_set();

    println!("y = {:?}, n = {n}", y.values());
    println!("max degree per axis: {:?}", set.max_degrees());
    println!("first indices:");
    for k in set.indices().iter().take(10) {
        println!("  {:?}", k.entries());
    }
    println!("margin size: {}", set.margin().len());
    println!("||g_y||^2 = {:.6}", g_y_norm_sq(&y));
    println!("best L2 error E* = {:.6}", best_error(&y, set)?);
    println!("sup error of the truncated series <= {:.6}", truncated_sup_error(&y, set)?);
    println!("sup of the Christoffel function = {:.1}", basis.christoffel_sup());
    println!("phi(0) = {:.4}", basis.phi_eval(&[0.0; 4])?.norm());
    Ok(())
}
