//! Experiment configuration: presets, a flat `key = value` file format and
//! command-line overrides, all resolved through [`RawConfig`].
//!
//! Keys mirror the command-line flags: `preset`, `d`, `n`, `m`, `m-range`,
//! `y`, `strategy`, `algo`, `eps`, `gamma`, `gamma-inf`, `delta`, `kappa`,
//! `seed`, `runs`, `out`, `threads`, `timing`, `frame-file`, `raw-frame`.
//! Lines starting with `#` and blank lines are ignored.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::alg1::Alg1Params;
use crate::alg2::Alg2Params;
use crate::error::{Error, Result};
use crate::experiment::Strategy;
use crate::index_basis::AnisotropyParams;

/// Which harness entry point a configuration is resolved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Sample,
    Fit,
    Subsample,
    Histogram,
    Rejections,
    ErrorCurve,
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `d = 4`, `y = (0.9, 0.8, 0.7, 0.6)`, `n = 128`, `m = 256`, 400 runs.
    PaperFig1,
    /// Same sizes as [`Preset::PaperFig1`], used for rejection profiles.
    PaperFig2,
    /// `n = 128`, `m = 128, 130, …, 208`, 100 runs.
    PaperFig3,
    /// `n = 32`, `m = 64`, 400 runs; for error curves `d = 2`,
    /// `y = (0.9, 0.8)`, `m = 32, 34, …, 72`, 50 runs.
    Desk,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::PaperFig1 => "paper-fig1",
            Preset::PaperFig2 => "paper-fig2",
            Preset::PaperFig3 => "paper-fig3",
            Preset::Desk => "desk",
        }
    }

    /// The preset's values as a [`RawConfig`] layer.
    pub fn layer(self, kind: ExperimentKind) -> RawConfig {
        let paper_y = Some(vec![0.9, 0.8, 0.7, 0.6]);
        let mut raw = RawConfig {
            d: Some(4),
            y: paper_y,
            ..RawConfig::default()
        };
        match self {
            Preset::PaperFig1 | Preset::PaperFig2 => {
                raw.n = Some(128);
                raw.m = Some(256);
                raw.runs = Some(400);
            }
            Preset::PaperFig3 => {
                raw.n = Some(128);
                raw.m_range = Some(MRange::new(128, 208, 2));
                raw.runs = Some(100);
            }
            Preset::Desk if kind == ExperimentKind::ErrorCurve => {
                raw.d = Some(2);
                raw.y = Some(vec![0.9, 0.8]);
                raw.n = Some(32);
                raw.m_range = Some(MRange::new(32, 72, 2));
                raw.runs = Some(50);
            }
            Preset::Desk => {
                raw.n = Some(32);
                raw.m = Some(64);
                raw.runs = Some(400);
            }
        }
        raw
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-fig1" => Ok(Preset::PaperFig1),
            "paper-fig2" => Ok(Preset::PaperFig2),
            "paper-fig3" => Ok(Preset::PaperFig3),
            "desk" => Ok(Preset::Desk),
            _ => Err(Error::InvalidParameter(format!(
                "unknown preset {s:?} (expected paper-fig1, paper-fig2, paper-fig3 or desk)"
            ))),
        }
    }
}

/// Inclusive range `start, start + step, …, ≤ end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl MRange {
    pub fn new(start: usize, end: usize, step: usize) -> Self {
        Self { start, end, step }
    }

    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step.max(1)).collect()
    }
}

impl FromStr for MRange {
    type Err = Error;

    /// `start:end` or `start:end:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| {
            p.parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad m-range {s:?}")))
        };
        let r = match parts.as_slice() {
            [a, b] => MRange::new(num(a)?, num(b)?, 1),
            [a, b, c] => MRange::new(num(a)?, num(b)?, num(c)?),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "m-range must be start:end[:step], got {s:?}"
                )))
            }
        };
        if r.step == 0 || r.start > r.end {
            return Err(Error::InvalidParameter(format!("empty m-range {s:?}")));
        }
        Ok(r)
    }
}

/// Partially specified configuration; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub preset: Option<Preset>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub m_range: Option<MRange>,
    pub y: Option<Vec<f64>>,
    pub strategy: Option<Strategy>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_inf: Option<f64>,
    pub delta: Option<f64>,
    pub kappa: Option<f64>,
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub timing: Option<bool>,
    pub frame_file: Option<PathBuf>,
    pub raw_frame: Option<bool>,
}

fn parse<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        message: format!("invalid value {value:?} for {key}"),
    })
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config {
            line,
            message: format!("invalid boolean {value:?} for {key}"),
        }),
    }
}

/// Parses a comma-separated list of reals.
pub fn parse_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("not a number: {t:?}")))
        })
        .collect()
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<()> {
    if slot.is_some() {
        return Err(Error::Config {
            line,
            message: format!("duplicate key {key}"),
        });
    }
    *slot = Some(value);
    Ok(())
}

impl RawConfig {
    /// Parses the flat `key = value` format; errors carry 1-based line numbers.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    line: lineno,
                    message: format!("expected key = value, got {line:?}"),
                });
            };
            raw.set(key.trim(), value.trim(), lineno)?;
        }
        Ok(raw)
    }

    /// Assigns one key; `line` is used for diagnostics.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let wrap = |e: Error| match e {
            Error::InvalidParameter(message) => Error::Config { line, message },
            other => other,
        };
        match key {
            "preset" => {
                let p = value.parse().map_err(wrap)?;
                set_once(&mut self.preset, p, key, line)
            }
            "d" => set_once(&mut self.d, parse(key, value, line)?, key, line),
            "n" => set_once(&mut self.n, parse(key, value, line)?, key, line),
            "m" => set_once(&mut self.m, parse(key, value, line)?, key, line),
            "m-range" => {
                let r = value.parse().map_err(wrap)?;
                set_once(&mut self.m_range, r, key, line)
            }
            "y" => {
                let y = parse_list(value).map_err(wrap)?;
                set_once(&mut self.y, y, key, line)
            }
            "strategy" | "algo" => {
                let s: Strategy = value.parse().map_err(wrap)?;
                if key == "algo" && s.is_iid() {
                    return Err(Error::Config {
                        line,
                        message: format!("algo must be 1 or 2, got {value:?}"),
                    });
                }
                match self.strategy {
                    Some(prev) if prev != s => Err(Error::Config {
                        line,
                        message: format!("{key} = {value} conflicts with strategy {prev}"),
                    }),
                    _ => {
                        self.strategy = Some(s);
                        Ok(())
                    }
                }
            }
            "eps" | "epsilon" => set_once(&mut self.epsilon, parse(key, value, line)?, key, line),
            "gamma" => set_once(&mut self.gamma, parse(key, value, line)?, key, line),
            "gamma-inf" => set_once(&mut self.gamma_inf, parse(key, value, line)?, key, line),
            "delta" => set_once(&mut self.delta, parse(key, value, line)?, key, line),
            "kappa" => set_once(&mut self.kappa, parse(key, value, line)?, key, line),
            "seed" => set_once(&mut self.seed, parse(key, value, line)?, key, line),
            "runs" => set_once(&mut self.runs, parse(key, value, line)?, key, line),
            "out" => set_once(&mut self.out, PathBuf::from(value), key, line),
            "threads" => set_once(&mut self.threads, parse(key, value, line)?, key, line),
            "timing" => set_once(&mut self.timing, parse_bool(key, value, line)?, key, line),
            "frame-file" => set_once(&mut self.frame_file, PathBuf::from(value), key, line),
            "raw-frame" => {
                set_once(&mut self.raw_frame, parse_bool(key, value, line)?, key, line)
            }
            _ => Err(Error::Config {
                line,
                message: format!("unknown key {key:?}"),
            }),
        }
    }

    /// `other` wins wherever it is set.
    pub fn overlay(self, other: RawConfig) -> RawConfig {
        RawConfig {
            preset: other.preset.or(self.preset),
            d: other.d.or(self.d),
            n: other.n.or(self.n),
            m: other.m.or(self.m),
            m_range: other.m_range.or(self.m_range),
            y: other.y.or(self.y),
            strategy: other.strategy.or(self.strategy),
            epsilon: other.epsilon.or(self.epsilon),
            gamma: other.gamma.or(self.gamma),
            gamma_inf: other.gamma_inf.or(self.gamma_inf),
            delta: other.delta.or(self.delta),
            kappa: other.kappa.or(self.kappa),
            seed: other.seed.or(self.seed),
            runs: other.runs.or(self.runs),
            out: other.out.or(self.out),
            threads: other.threads.or(self.threads),
            timing: other.timing.or(self.timing),
            frame_file: other.frame_file.or(self.frame_file),
            raw_frame: other.raw_frame.or(self.raw_frame),
        }
    }

    /// Applies the preset (if any) underneath, fills defaults and validates.
    pub fn resolve(self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let raw = match self.preset {
            Some(p) => p.layer(kind).overlay(self),
            None => self,
        };
        ExperimentConfig::from_raw(raw, kind)
    }
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub preset: Option<Preset>,
    pub d: usize,
    pub y: AnisotropyParams,
    pub n: usize,
    /// Sample sizes; a single entry unless an m-range was given. Empty for
    /// subsampling without an explicit `m`, which then defaults to `2n`.
    pub m_values: Vec<usize>,
    pub strategy: Strategy,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_inf: f64,
    pub delta: Option<f64>,
    pub kappa: f64,
    pub runs: usize,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Adds a wall-clock column to per-run CSV output.
    pub timing: bool,
    pub frame_file: Option<PathBuf>,
    pub whiten: bool,
    /// Non-fatal remarks produced during validation.
    pub warnings: Vec<String>,
}

/// `κ` used by the fixed-increment sampler when none is given.
pub const DEFAULT_KAPPA: f64 = 0.5;

fn default_y(d: usize) -> Result<Vec<f64>> {
    if d > 9 {
        return Err(Error::InvalidParameter(format!(
            "no default y for d = {d} > 9; pass --y explicitly"
        )));
    }
    Ok((0..d).map(|j| 0.9 - 0.1 * j as f64).collect())
}

impl ExperimentConfig {
    fn from_raw(raw: RawConfig, kind: ExperimentKind) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        let mut warnings = Vec::new();

        let strategy = raw.strategy.unwrap_or(Strategy::Alg2);
        if strategy != Strategy::Alg1
            && (raw.epsilon.is_some() || raw.gamma.is_some() || raw.gamma_inf.is_some())
        {
            return invalid(format!(
                "eps, gamma and gamma-inf only apply to algorithm 1, not {strategy}"
            ));
        }
        if strategy != Strategy::Alg2 && (raw.delta.is_some() || raw.kappa.is_some()) {
            return invalid(format!("delta and kappa only apply to algorithm 2, not {strategy}"));
        }
        if kind == ExperimentKind::Rejections && strategy.is_iid() {
            return invalid("rejection profiles need strategy alg1 or alg2".into());
        }
        if kind == ExperimentKind::Subsample {
            if strategy.is_iid() {
                return invalid("subsampling needs algo 1 or 2".into());
            }
            if raw.frame_file.is_none() {
                return invalid("subsampling needs a frame file".into());
            }
        } else if raw.frame_file.is_some() || raw.raw_frame.is_some() {
            return invalid("frame-file only applies to subsampling".into());
        }

        let d = match (raw.d, &raw.y) {
            (Some(d), Some(y)) if y.len() != d => {
                return invalid(format!("y has {} entries but d = {d}", y.len()))
            }
            (Some(d), _) => d,
            (None, Some(y)) => y.len(),
            (None, None) => 4,
        };
        if d == 0 {
            return invalid("d must be >= 1".into());
        }
        let y = AnisotropyParams::new(match raw.y {
            Some(y) => y,
            None => default_y(d)?,
        })?;

        let n = raw.n.unwrap_or(32);
        if n == 0 {
            return invalid("n must be >= 1".into());
        }
        if raw.m.is_some() && raw.m_range.is_some() {
            return invalid("give either m or m-range, not both".into());
        }
        if raw.m_range.is_some() && kind != ExperimentKind::ErrorCurve {
            return invalid("m-range only applies to error curves".into());
        }
        let m_values = match (raw.m, raw.m_range) {
            // frame dimension is only known once the file is read
            (None, None) if kind == ExperimentKind::Subsample => Vec::new(),
            (_, Some(r)) => r.values(),
            (Some(m), None) => vec![m],
            (None, None) => vec![2 * n],
        };
        if kind != ExperimentKind::Subsample {
            if let Some(&m) = m_values.iter().find(|&&m| m < n) {
                return invalid(format!("m = {m} is smaller than n = {n}"));
            }
        }

        let runs = raw.runs.unwrap_or(1);
        if runs == 0 {
            return invalid("runs must be >= 1".into());
        }
        if raw.threads == Some(0) {
            return invalid("threads must be >= 1".into());
        }
        let kappa = raw.kappa.unwrap_or(DEFAULT_KAPPA);

        let cfg = Self {
            kind,
            preset: raw.preset,
            d,
            y,
            n,
            m_values,
            strategy,
            epsilon: raw.epsilon,
            gamma: raw.gamma,
            gamma_inf: raw.gamma_inf.unwrap_or(0.0),
            delta: raw.delta,
            kappa,
            runs,
            master_seed: raw.seed.unwrap_or(0),
            output: raw.out,
            threads: raw.threads,
            timing: raw.timing.unwrap_or(false),
            frame_file: raw.frame_file,
            whiten: !raw.raw_frame.unwrap_or(false),
            warnings: Vec::new(),
        };
        // sampler parameters are checked for every m up front
        if kind != ExperimentKind::Subsample {
            for &m in &cfg.m_values {
                match strategy {
                    Strategy::Alg1 => {
                        let p = cfg.alg1_params(cfg.n, m)?;
                        if p.epsilon >= 0.99 {
                            warnings.push(format!(
                                "epsilon = {} is close to 1; weights η = ε/(1-ε) = {} are large",
                                p.epsilon, p.eta
                            ));
                        }
                    }
                    Strategy::Alg2 => {
                        cfg.alg2_params(cfg.n, m)?;
                    }
                    _ => {}
                }
            }
        }
        warnings.dedup();
        Ok(Self { warnings, ..cfg })
    }

    /// First (or only) sample size.
    pub fn m(&self) -> usize {
        self.m_values.first().copied().unwrap_or(2 * self.n)
    }

    /// Default parameters for `(n, m)` with any explicit overrides applied.
    pub fn alg1_params(&self, n: usize, m: usize) -> Result<Alg1Params> {
        let base = if m >= n {
            Some(Alg1Params::theorem_defaults(n, m)?)
        } else {
            None
        };
        let epsilon = match (self.epsilon, &base) {
            (Some(e), _) => e,
            (None, Some(b)) => b.epsilon,
            (None, None) => {
                return Err(Error::InvalidParameter(
                    "eps is required when m < n".into(),
                ))
            }
        };
        let gamma = match (self.gamma, &base) {
            (Some(g), _) => g,
            (None, Some(b)) => b.gamma,
            (None, None) => 0.0,
        };
        Alg1Params::new(m, epsilon, gamma, self.gamma_inf)
    }

    pub fn alg2_params(&self, n: usize, m: usize) -> Result<Alg2Params> {
        match self.delta {
            Some(delta) => Alg2Params::new(m, delta, self.kappa),
            None if n >= 2 && m >= n => Alg2Params::theorem_defaults(n, m, self.kappa),
            None => Err(Error::InvalidParameter(format!(
                "default delta needs m >= n >= 2 (n = {n}, m = {m}); pass delta explicitly"
            ))),
        }
    }
}
