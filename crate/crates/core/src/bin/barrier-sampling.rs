//! Command-line front end for the samplers and the experiment harness.
//!
//! Exit codes: 0 on success, 2 on usage or configuration errors, 3 when a
//! run aborts for numerical reasons.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use barrier_sampling::alg2::TRACE_DRIFT_WARNING;
use barrier_sampling::discrete::read_frame_file;
use barrier_sampling::experiment::config::parse_list;
use barrier_sampling::experiment::runner::{basis_for, run_batch, run_subsample};
use barrier_sampling::experiment::{
    output, run_condition_histogram, run_error_curve, run_rejection_profile, ExperimentConfig,
    ExperimentKind, RawConfig, RunRecord, Strategy,
};
use barrier_sampling::least_squares::{sup_error_grid, GeneratingFunction};
use barrier_sampling::Error;

#[derive(Parser)]
#[command(name = "barrier-sampling", version, about = "Barrier-based random sampling for weighted least squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw weighted samples and write points, weights and rejection counts.
    Sample(Common),
    /// Draw samples, fit the generating function and report errors.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Also estimate the sup-norm error on a grid with this many points per axis.
        #[arg(long)]
        sup_grid: Option<usize>,
    },
    /// Subsample the rows of a frame read from --frame-file.
    Subsample(Common),
    /// Per-run condition numbers and errors.
    Histogram(Common),
    /// Mean rejections per iteration.
    Rejections(Common),
    /// Mean error ratio against the best approximation error for each m.
    ErrorCurve(Common),
}

#[derive(Args, Default)]
struct Common {
    /// Flat key = value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// paper-fig1, paper-fig2, paper-fig3 or desk.
    #[arg(long)]
    preset: Option<String>,
    /// Sampler: 1 (effective resistance) or 2 (fixed increments).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    algo: Option<u8>,
    /// uniform, arcsine, christoffel, alg1 or alg2.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// start:end[:step], inclusive.
    #[arg(long)]
    m_range: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated anisotropy parameters in (0, 1).
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    gamma_inf: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Add a wall-clock column to per-run output.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    frame_file: Option<PathBuf>,
    /// Use frame rows as given instead of whitening them.
    #[arg(long)]
    raw_frame: bool,
}

impl Common {
    fn to_raw(&self) -> Result<RawConfig, Error> {
        let mut raw = RawConfig {
            preset: self.preset.as_deref().map(str::parse).transpose()?,
            d: self.d,
            n: self.n,
            m: self.m,
            m_range: self.m_range.as_deref().map(str::parse).transpose()?,
            y: self.y.as_deref().map(parse_list).transpose()?,
            strategy: self.strategy.as_deref().map(str::parse).transpose()?,
            epsilon: self.eps,
            gamma: self.gamma,
            gamma_inf: self.gamma_inf,
            delta: self.delta,
            kappa: self.kappa,
            seed: self.seed,
            runs: self.runs,
            out: self.out.clone(),
            threads: self.threads,
            timing: self.timing.then_some(true),
            frame_file: self.frame_file.clone(),
            raw_frame: self.raw_frame.then_some(true),
        };
        if let Some(a) = self.algo {
            let s = if a == 1 { Strategy::Alg1 } else { Strategy::Alg2 };
            match raw.strategy {
                Some(prev) if prev != s => {
                    return Err(Error::InvalidParameter(format!(
                        "--algo {a} conflicts with --strategy {prev}"
                    )))
                }
                _ => raw.strategy = Some(s),
            }
        }
        Ok(raw)
    }

    fn resolve(&self, kind: ExperimentKind) -> Result<ExperimentConfig, Error> {
        let base = match &self.config {
            Some(path) => RawConfig::parse_file(&std::fs::read_to_string(path)?)?,
            None => RawConfig::default(),
        };
        let cfg = base.overlay(self.to_raw()?).resolve(kind)?;
        for w in &cfg.warnings {
            eprintln!("warning: {w}");
        }
        Ok(cfg)
    }
}

fn open_out(cfg: &ExperimentConfig) -> io::Result<Box<dyn Write>> {
    Ok(match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_sidecar(
    cfg: &ExperimentConfig,
    command: &str,
    runs: &[barrier_sampling::experiment::RunData],
    with_coefficients: bool,
) -> Result<(), Error> {
    if let Some(path) = &cfg.output {
        let mut w = BufWriter::new(File::create(output::sidecar_path(path))?);
        output::write_metadata_json(&mut w, command, cfg, runs, with_coefficients)?;
        w.flush()?;
    }
    Ok(())
}

fn warn_drift<'a>(records: impl IntoIterator<Item = &'a RunRecord>) {
    for r in records {
        if let Some(drift) = r.trace_drift.filter(|&d| d > TRACE_DRIFT_WARNING) {
            eprintln!("warning: run {}: potential drifted from one by {drift:e}", r.run_index);
        }
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Sample(c) => {
            let cfg = c.resolve(ExperimentKind::Sample)?;
            let basis = basis_for(&cfg)?;
            let runs = run_batch(&basis, &cfg, cfg.m(), 0)?;
            warn_drift(runs.iter().map(|r| &r.record));
            let mut w = open_out(&cfg)?;
            output::write_points_csv(&mut w, cfg.d, &runs)?;
            w.flush()?;
            write_sidecar(&cfg, "sample", &runs, false)?;
        }
        Command::Fit { common, sup_grid } => {
            let cfg = common.resolve(ExperimentKind::Fit)?;
            let basis = basis_for(&cfg)?;
            let mut runs = run_batch(&basis, &cfg, cfg.m(), 0)?;
            warn_drift(runs.iter().map(|r| &r.record));
            if let Some(grid) = sup_grid {
                let g = GeneratingFunction::new(cfg.y.clone());
                for run in &mut runs {
                    if let Some(f) = run.fit.as_mut() {
                        f.sup_error =
                            Some(sup_error_grid(&basis, f.coefficients.as_slice(), &g, grid)?);
                    }
                }
            }
            let mut w = open_out(&cfg)?;
            output::write_fit_csv(&mut w, &runs)?;
            w.flush()?;
            write_sidecar(&cfg, "fit", &runs, true)?;
        }
        Command::Subsample(c) => {
            let cfg = c.resolve(ExperimentKind::Subsample)?;
            let path = cfg
                .frame_file
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("missing --frame-file".into()))?;
            let frame = read_frame_file(path, cfg.whiten)?;
            let samples = run_subsample(&cfg, &frame)?;
            let mut w = open_out(&cfg)?;
            output::write_subsample_csv(&mut w, &frame, &samples)?;
            w.flush()?;
            if let Some(s) = samples.first() {
                eprintln!(
                    "frame: M = {}, n = {}; run 0: lambda_min = {}, condition number = {}",
                    frame.len(),
                    frame.n(),
                    s.lambda_min(),
                    s.condition_number()
                );
            }
        }
        Command::Histogram(c) => {
            let cfg = c.resolve(ExperimentKind::Histogram)?;
            let records = run_condition_histogram(&cfg)?;
            warn_drift(&records);
            let mut w = open_out(&cfg)?;
            output::write_runs_csv(&mut w, &records, cfg.timing)?;
            w.flush()?;
        }
        Command::Rejections(c) => {
            let cfg = c.resolve(ExperimentKind::Rejections)?;
            let profile = run_rejection_profile(&cfg)?;
            let mut w = open_out(&cfg)?;
            output::write_profile_csv(&mut w, &profile)?;
            w.flush()?;
            if cfg.strategy == Strategy::Alg2 {
                let p = cfg.alg2_params(cfg.n, cfg.m())?;
                if p.kappa < 1.0 {
                    eprintln!(
                        "mean candidates per iteration are bounded by {}",
                        p.mean_candidates_bound(cfg.n)
                    );
                }
            }
        }
        Command::ErrorCurve(c) => {
            let cfg = c.resolve(ExperimentKind::ErrorCurve)?;
            let points = run_error_curve(&cfg)?;
            let mut w = open_out(&cfg)?;
            output::write_curve_csv(&mut w, &points)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
