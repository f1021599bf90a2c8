//! Mean ratio between the least-squares error and the best approximation
//! error as the number of samples grows.
//!
//! cargo run --release --example error_curve

use barrier_sampling::experiment::{run_error_curve, ExperimentKind, MRange, RawConfig, Strategy};
use barrier_sampling::Result;

fn main() -> Result<()> {
    let (n, runs) = (16, 40);
    println!("{:>12} {:>4} {:>10} {:>10} {:>10}", "strategy", "m", "ratio", "std err", "median cond");
    for strategy in [Strategy::ChristoffelIid, Strategy::Alg1, Strategy::Alg2] {
        let cfg = RawConfig {
            d: Some(2),
            y: Some(vec![0.9, 0.8]),
            n: Some(n),
            m_range: Some(MRange::new(n, 3 * n, n / 2)),
            strategy: Some(strategy),
            runs: Some(runs),
            ..RawConfig::default()
        }
        .resolve(ExperimentKind::ErrorCurve)?;
        for p in run_error_curve(&cfg)? {
            println!(
                "{:>12} {:>4} {:>10.3} {:>10.3} {:>10.2}",
                strategy.as_str(),
                p.m,
                p.mean_ratio,
                p.ratio_std_error,
                p.median_condition_number
            );
        }
    }
    Ok(())
}
