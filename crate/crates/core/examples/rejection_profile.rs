//! Mean number of rejected candidates per iteration for both barrier samplers.
//!
//! cargo run --release --example rejection_profile

use barrier_sampling::experiment::{run_rejection_profile, ExperimentKind, Preset, RawConfig, Strategy};
use barrier_sampling::Result;

fn main() -> Result<()> {
    for strategy in [Strategy::Alg1, Strategy::Alg2] {
        let cfg = RawConfig {
            preset: Some(Preset::Desk),
            strategy: Some(strategy),
            runs: Some(100),
            ..RawConfig::default()
        }
        .resolve(ExperimentKind::Rejections)?;
        let p = run_rejection_profile(&cfg)?;
        let n = cfg.n;
        let avg = |r: &[f64]| r.iter().sum::<f64>() / r.len() as f64;
        println!(
            "{strategy}: first half of n {:.2}, iterations up to n {:.2}, after n {:.2}",
            avg(&p.mean[..n / 2]),
            avg(&p.mean[..n]),
            avg(&p.mean[n..])
        );
        for i in (0..p.m).step_by(8) {
            println!("  i = {:3}: {:6.2} +- {:.2}", i + 1, p.mean[i], p.std_error[i]);
        }
        if strategy == Strategy::Alg2 {
            let params = cfg.alg2_params(n, cfg.m())?;
            println!("  bound on mean candidates: {:.1}", params.mean_candidates_bound(n));
        }
    }
    Ok(())
}
