//! Weighted least squares from i.i.d. points drawn from the Christoffel
//! measure, compared with uniform and arcsine points.
//!
//! cargo run --release --example christoffel_sampling

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use barrier_sampling::experiment::runner::iid_sample;
use barrier_sampling::experiment::Strategy;
use barrier_sampling::least_squares::{fit_with_weights, GeneratingFunction};
use barrier_sampling::{AnisotropyParams, BasisSpec, ChristoffelSampler, Result};

fn main() -> Result<()> {
    let y = AnisotropyParams::new(vec![0.9, 0.8])?;
    let (n, m) = (16, 64);
    let basis = BasisSpec::for_generating_function(&y, n)?;
    let g = GeneratingFunction::new(y);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sampler = ChristoffelSampler::new(&basis);
    let (x, rejected) = sampler.sample(&mut rng);
    println!("one Christoffel point: {x:.4?} after {rejected} coordinate rejections");

    for strategy in [Strategy::UniformIid, Strategy::ArcsineIid, Strategy::ChristoffelIid] {
        let (points, weights) = iid_sample(strategy, &basis, m, &mut rng)?;
        match fit_with_weights(&basis, &points, &weights, &g) {
            Ok(f) => println!(
                "{strategy:>12}: condition number {:8.2}, L2 error / best = {:.3}",
                f.condition_number,
                f.error_ratio.unwrap_or(f64::NAN)
            ),
            Err(e) => println!("{strategy:>12}: {e}"),
        }
    }
    Ok(())
}
