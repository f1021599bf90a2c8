//! Effective-resistance sampling: barrier increments driven by the lower
//! potential, then a fit conditioned on the spectral event.
//!
//! cargo run --release --example effective_resistance

use barrier_sampling::least_squares::GeneratingFunction;
use barrier_sampling::{conditional_sample, fit, run_algorithm1, Alg1Params, AnisotropyParams, BasisSpec, Result};

fn main() -> Result<()> {
    let y = AnisotropyParams::new(vec![0.9, 0.8, 0.7, 0.6])?;
    let (n, m) = (32, 64);
    let basis = BasisSpec::for_generating_function(&y, n)?;
    let params = Alg1Params::theorem_defaults(n, m)?;
    println!(
        "epsilon = {:.4}, gamma = {:.4}, eta = {:.4}, floor = {:.4}",
        params.epsilon,
        params.gamma,
        params.eta,
        params.default_floor(n)
    );

    let sample = run_algorithm1(&basis, &params, 7)?;
    let traces = sample.trace_y_sequence();
    println!("Tr Y: first {:.4}, middle {:.4}, last {:.4}", traces[0], traces[m / 2], traces[m]);
    println!(
        "barrier after the last step {:.4} < lambda_min {:.4}; lambda_max {:.4}",
        sample.ell_final,
        sample.lambda_min(),
        sample.lambda_max()
    );
    let total: u64 = sample.rejections.iter().sum();
    println!("mean rejections per point: {:.2}", total as f64 / m as f64);

    let conditioned = conditional_sample(&basis, &params, 7, 100)?;
    let f = fit(&basis, &conditioned.sample, &GeneratingFunction::new(y))?;
    println!(
        "conditioned after {} restarts: condition number {:.2}, L2 error / best = {:.3}",
        conditioned.restarts,
        f.condition_number,
        f.error_ratio.unwrap_or(f64::NAN)
    );
    Ok(())
}
