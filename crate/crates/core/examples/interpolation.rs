//! Interpolation with `m = n` points: the L2 error stays within `2n + 1`
//! times the best uniform approximation error.
//!
//! cargo run --release --example interpolation

use barrier_sampling::index_basis::truncated_sup_error;
use barrier_sampling::least_squares::{nodal_residuals, sup_error_grid, GeneratingFunction};
use barrier_sampling::{fit, run_algorithm2, Alg2Params, AnisotropyParams, BasisSpec, Result};

fn main() -> Result<()> {
    let n = 8;
    let y = AnisotropyParams::new(vec![0.7])?;
    let basis = BasisSpec::for_generating_function(&y, n)?;
    let params = Alg2Params::interpolation(n, 1.0)?;
    let g = GeneratingFunction::new(y.clone());
    let bound = (2 * n + 1) as f64 * truncated_sup_error(&y, basis.lower_set())?;

    let s = run_algorithm2(&basis, &params, 3)?;
    let mut nodes: Vec<f64> = s.points.iter().map(|x| x[0]).collect();
    nodes.sort_by(f64::total_cmp);
    println!("nodes: {nodes:.4?}");
    let f = fit(&basis, &s, &g)?;
    let coeffs = f.coefficients.as_slice();
    let residual = nodal_residuals(&basis, coeffs, &s.points, &g)?
        .into_iter()
        .fold(0.0f64, |a, r| a.max(r.abs()));
    println!("max nodal residual {residual:.1e}");
    println!(
        "L2 error {:.4e}, sup error {:.4e}, bound {bound:.4e}",
        f.l2_error.unwrap_or(f64::NAN),
        sup_error_grid(&basis, coeffs, &g, 2001)?
    );
    Ok(())
}
