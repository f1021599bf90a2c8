//! CSV and JSON writers. Every CSV starts with a `# barrier-sampling/<kind> v1`
//! schema line followed by a column header. Reals use the shortest
//! round-trip representation and missing values are left empty, so output
//! is byte-stable for a fixed seed.
//!
//! | schema | columns |
//! |---|---|
//! | `points` | `run,index,x_1..x_d,weight,rejections` |
//! | `runs` | `run,m,seed,lambda_min,lambda_max,condition_number,floor,trace_drift,mean_rejections,l2_error,error_ratio[,wall_time]` |
//! | `rejection-profile` | `iteration,mean_rejections,std_error` |
//! | `error-curve` | `m,runs,fits,mean_error_ratio,std_error,mean_sq_ratio,sq_std_error,median_condition_number` |
//! | `subsample` | `run,index,row,label,weight` |
//! | `fit` | `run,seed,lambda_min,lambda_max,condition_number,l2_error,best_error,error_ratio,sup_error,normal_residual` |
//!
//! `index` and `iteration` are 1-based sampler iterations; `row` is the
//! 1-based line of the frame. The metadata sidecar is JSON with the schema
//! string `barrier-sampling/run-metadata v1`.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::discrete::DiscreteFrame;
use crate::experiment::runner::{ErrorCurvePoint, RejectionProfile, RunData, RunRecord};
use crate::experiment::ExperimentConfig;
use crate::sampling::WeightedSample;

pub const POINTS_SCHEMA: &str = "# barrier-sampling/points v1";
pub const RUNS_SCHEMA: &str = "# barrier-sampling/runs v1";
pub const PROFILE_SCHEMA: &str = "# barrier-sampling/rejection-profile v1";
pub const CURVE_SCHEMA: &str = "# barrier-sampling/error-curve v1";
pub const SUBSAMPLE_SCHEMA: &str = "# barrier-sampling/subsample v1";
pub const FIT_SCHEMA: &str = "# barrier-sampling/fit v1";
pub const METADATA_SCHEMA: &str = "barrier-sampling/run-metadata v1";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `<out>.json` next to the CSV.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn write_points_csv<W: Write>(w: &mut W, d: usize, runs: &[RunData]) -> io::Result<()> {
    writeln!(w, "{POINTS_SCHEMA}")?;
    let coords: Vec<String> = (1..=d).map(|j| format!("x_{j}")).collect();
    writeln!(w, "run,index,{},weight,rejections", coords.join(","))?;
    for run in runs {
        for (i, ((x, s), r)) in run
            .points
            .iter()
            .zip(&run.weights)
            .zip(&run.record.rejections)
            .enumerate()
        {
            let xs: Vec<String> = x.iter().map(f64::to_string).collect();
            writeln!(
                w,
                "{},{},{},{},{}",
                run.record.run_index,
                i + 1,
                xs.join(","),
                s,
                r
            )?;
        }
    }
    Ok(())
}

pub fn write_runs_csv<W: Write>(w: &mut W, records: &[RunRecord], timing: bool) -> io::Result<()> {
    writeln!(w, "{RUNS_SCHEMA}")?;
    write!(
        w,
        "run,m,seed,lambda_min,lambda_max,condition_number,floor,trace_drift,mean_rejections,l2_error,error_ratio"
    )?;
    if timing {
        write!(w, ",wall_time")?;
    }
    writeln!(w)?;
    for r in records {
        write!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.run_index,
            r.m,
            r.seed,
            r.lambda_min,
            r.lambda_max,
            r.condition_number,
            opt(r.floor),
            opt(r.trace_drift),
            r.mean_rejections(),
            opt(r.l2_error),
            opt(r.error_ratio)
        )?;
        if timing {
            write!(w, ",{}", r.wall_time)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_profile_csv<W: Write>(w: &mut W, profile: &RejectionProfile) -> io::Result<()> {
    writeln!(w, "{PROFILE_SCHEMA}")?;
    writeln!(w, "iteration,mean_rejections,std_error")?;
    for (i, (mu, se)) in profile.mean.iter().zip(&profile.std_error).enumerate() {
        writeln!(w, "{},{},{}", i + 1, mu, se)?;
    }
    Ok(())
}

pub fn write_curve_csv<W: Write>(w: &mut W, points: &[ErrorCurvePoint]) -> io::Result<()> {
    writeln!(w, "{CURVE_SCHEMA}")?;
    writeln!(
        w,
        "m,runs,fits,mean_error_ratio,std_error,mean_sq_ratio,sq_std_error,median_condition_number"
    )?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            p.m,
            p.runs,
            p.fits,
            p.mean_ratio,
            p.ratio_std_error,
            p.mean_sq_ratio,
            p.sq_ratio_std_error,
            p.median_condition_number
        )?;
    }
    Ok(())
}

pub fn write_subsample_csv<W: Write>(
    w: &mut W,
    frame: &DiscreteFrame,
    runs: &[WeightedSample<usize>],
) -> io::Result<()> {
    writeln!(w, "{SUBSAMPLE_SCHEMA}")?;
    writeln!(w, "run,index,row,label,weight")?;
    for (k, sample) in runs.iter().enumerate() {
        for (i, (&row, s)) in sample.points.iter().zip(&sample.weights).enumerate() {
            let label = frame
                .labels()
                .map(|l| l[row].clone())
                .unwrap_or_else(|| (row + 1).to_string());
            writeln!(w, "{},{},{},{},{}", k, i + 1, row + 1, label, s)?;
        }
    }
    Ok(())
}

pub fn write_fit_csv<W: Write>(w: &mut W, runs: &[RunData]) -> io::Result<()> {
    writeln!(w, "{FIT_SCHEMA}")?;
    writeln!(
        w,
        "run,seed,lambda_min,lambda_max,condition_number,l2_error,best_error,error_ratio,sup_error,normal_residual"
    )?;
    for run in runs {
        let r = &run.record;
        match &run.fit {
            Some(f) => writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.run_index,
                r.seed,
                f.lambda_min,
                f.lambda_max,
                f.condition_number,
                opt(f.l2_error),
                opt(f.best_error),
                opt(f.error_ratio),
                opt(f.sup_error),
                f.normal_residual
            )?,
            None => writeln!(
                w,
                "{},{},{},{},{},,,,,",
                r.run_index, r.seed, r.lambda_min, r.lambda_max, r.condition_number
            )?,
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Metadata<'a> {
    schema: &'static str,
    command: &'a str,
    preset: Option<&'static str>,
    strategy: &'static str,
    d: usize,
    y: &'a [f64],
    n: usize,
    m: Vec<usize>,
    runs: usize,
    master_seed: u64,
    seed_rule: &'static str,
    params: Params,
    warnings: &'a [String],
    records: Vec<RecordMeta>,
}

#[derive(Serialize, Default)]
struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_inf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
}

#[derive(Serialize)]
struct RecordMeta {
    run: usize,
    seed: u64,
    lambda_min: f64,
    lambda_max: f64,
    condition_number: f64,
    floor: Option<f64>,
    trace_drift: Option<f64>,
    total_rejections: u64,
    l2_error: Option<f64>,
    error_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<f64>>,
}

fn params_for(cfg: &ExperimentConfig, n: usize, m: usize) -> Params {
    use crate::experiment::Strategy;
    match cfg.strategy {
        Strategy::Alg1 => match cfg.alg1_params(n, m) {
            Ok(p) => Params {
                epsilon: Some(p.epsilon),
                gamma: Some(p.gamma),
                gamma_inf: Some(p.gamma_inf),
                eta: Some(p.eta),
                ..Params::default()
            },
            Err(_) => Params::default(),
        },
        Strategy::Alg2 => match cfg.alg2_params(n, m) {
            Ok(p) => Params {
                delta: Some(p.delta),
                kappa: Some(p.kappa),
                threshold: Some(p.threshold),
                ..Params::default()
            },
            Err(_) => Params::default(),
        },
        _ => Params::default(),
    }
}

/// JSON sidecar describing a sample or fit batch.
pub fn write_metadata_json<W: Write>(
    w: &mut W,
    command: &str,
    cfg: &ExperimentConfig,
    runs: &[RunData],
    with_coefficients: bool,
) -> io::Result<()> {
    let m = cfg.m();
    let meta = Metadata {
        schema: METADATA_SCHEMA,
        command,
        preset: cfg.preset.map(|p| p.as_str()),
        strategy: cfg.strategy.as_str(),
        d: cfg.d,
        y: cfg.y.values(),
        n: cfg.n,
        m: cfg.m_values.clone(),
        runs: cfg.runs,
        master_seed: cfg.master_seed,
        seed_rule: "seed_k = splitmix64(master_seed ^ splitmix64(k))",
        params: params_for(cfg, cfg.n, m),
        warnings: &cfg.warnings,
        records: runs
            .iter()
            .map(|r| RecordMeta {
                run: r.record.run_index,
                seed: r.record.seed,
                lambda_min: r.record.lambda_min,
                lambda_max: r.record.lambda_max,
                condition_number: r.record.condition_number,
                floor: r.record.floor,
                trace_drift: r.record.trace_drift,
                total_rejections: r.record.rejections.iter().sum(),
                l2_error: r.record.l2_error,
                error_ratio: r.record.error_ratio,
                coefficients: if with_coefficients {
                    r.fit.as_ref().map(|f| f.coefficients.iter().copied().collect())
                } else {
                    None
                },
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *w, &meta).map_err(io::Error::other)?;
    writeln!(w)
}
