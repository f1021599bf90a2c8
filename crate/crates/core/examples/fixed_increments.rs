//! Fixed-increment sampling: the barrier rises by a constant step and the
//! smallest eigenvalue of the Gram matrix has a deterministic floor.
//!
//! cargo run --release --example fixed_increments -- [kappa]

use barrier_sampling::alg2::trace_drift;
use barrier_sampling::least_squares::GeneratingFunction;
use barrier_sampling::{fit, run_algorithm2, Alg2Params, AnisotropyParams, BasisSpec, Result};

fn main() -> Result<()> {
    let kappa: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let y = AnisotropyParams::new(vec![0.9, 0.8, 0.7, 0.6])?;
    let (n, m) = (32, 64);
    let basis = BasisSpec::for_generating_function(&y, n)?;
    let params = Alg2Params::theorem_defaults(n, m, kappa)?;
    println!(
        "delta = {:.4}, kappa = {kappa}, threshold = {:.4}, floor = {:.4}",
        params.delta,
        params.threshold,
        params.spectral_floor(n)
    );

    let g = GeneratingFunction::new(y);
    for seed in 0..5 {
        let s = run_algorithm2(&basis, &params, seed)?;
        let f = fit(&basis, &s, &g)?;
        let max_w = s.weights.iter().cloned().fold(0.0, f64::max);
        println!(
            "seed {seed}: lambda_min {:7.3}, condition {:6.2}, max weight {:.3}, drift {:.1e}, error ratio {:.3}",
            s.lambda_min(),
            s.condition_number(),
            max_w,
            trace_drift(&s),
            f.error_ratio.unwrap_or(f64::NAN)
        );
    }
    if let Some(cap) = params.weight_cap() {
        println!("weights never exceed {cap:.3}");
    }
    Ok(())
}
