//! Subsampling a large point cloud: the rows of a whitened frame are
//! selected with the fixed-increment sampler.
//!
//! cargo run --release --example discrete_subsample

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use barrier_sampling::{frame_from_points, subsample, Alg1Params, Alg2Params, Algo, AnisotropyParams, BasisSpec, Result};

fn main() -> Result<()> {
    let y = AnisotropyParams::new(vec![0.9, 0.8])?;
    let n = 12;
    let basis = BasisSpec::for_generating_function(&y, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cloud: Vec<Vec<f64>> = (0..5000)
        .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    let frame = frame_from_points(&basis, &cloud)?;
    println!("frame: {} rows in dimension {}, defect {:.1e}", frame.len(), frame.n(), frame.identity_defect());

    let m = 2 * n;
    let alg2 = Alg2Params::theorem_defaults(n, m, 0.5)?;
    for (name, algo) in [
        ("effective resistance", Algo::Alg1(Alg1Params::theorem_defaults(n, m)?)),
        ("fixed increments", Algo::Alg2(alg2.clone())),
    ] {
        let s = subsample(&frame, &algo, 11)?;
        println!(
            "{name}: rows {:?}..., lambda_min {:.3}, condition number {:.2}",
            &s.points[..6],
            s.lambda_min(),
            s.condition_number()
        );
    }
    println!("fixed-increment floor: {:.3}", alg2.spectral_floor(n));
    Ok(())
}
