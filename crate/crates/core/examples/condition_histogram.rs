//! Condition numbers of the Gram matrix over repeated runs for every
//! sampling strategy, at desk scale.
//!
//! cargo run --release --example condition_histogram -- [runs]

use barrier_sampling::experiment::runner::median;
use barrier_sampling::experiment::{run_condition_histogram, ExperimentKind, Preset, RawConfig, Strategy};
use barrier_sampling::Result;

fn main() -> Result<()> {
    let runs: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let edges = [1.0, 10.0, 20.0, 30.0, 40.0, 60.0, 100.0, f64::INFINITY];
    println!("{:>12} {:>8}  counts per bin {:?}", "strategy", "median", &edges[..edges.len() - 1]);
    for strategy in Strategy::ALL {
        let cfg = RawConfig {
            preset: Some(Preset::Desk),
            strategy: Some(strategy),
            runs: Some(runs),
            ..RawConfig::default()
        }
        .resolve(ExperimentKind::Histogram)?;
        let conds: Vec<f64> = run_condition_histogram(&cfg)?
            .into_iter()
            .map(|r| r.condition_number)
            .collect();
        let counts: Vec<usize> = edges
            .windows(2)
            .map(|w| conds.iter().filter(|&&c| c >= w[0] && c < w[1]).count())
            .collect();
        println!("{:>12} {:>8.2}  {counts:?}", strategy.as_str(), median(&conds));
    }
    Ok(())
}
