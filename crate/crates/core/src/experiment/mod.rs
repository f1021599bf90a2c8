//! Batch experiments on the Legendre test bed: condition-number histograms,
//! per-iteration rejection profiles and error-ratio curves.
//!
//! Run `k` of an experiment uses the seed `run_seed(master_seed, k)`
//! ([`crate::numerics::run_seed`]). Runs execute in parallel and are reduced
//! in run order, so outputs do not depend on the thread count.

pub mod config;
pub mod output;
pub mod runner;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub use config::{ExperimentConfig, ExperimentKind, MRange, Preset, RawConfig};
pub use runner::{
    run_condition_histogram, run_error_curve, run_rejection_profile, run_single, ErrorCurvePoint,
    RejectionProfile, RunData, RunRecord,
};

/// How the points of one run are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// i.i.d. uniform points, unit weights.
    UniformIid,
    /// i.i.d. tensor arcsine points, weights `∏ π sqrt(1 - x_j²) / 2`.
    ArcsineIid,
    /// i.i.d. Christoffel points, weights `n / |φ(x)|²`.
    ChristoffelIid,
    Alg1,
    Alg2,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::UniformIid,
        Strategy::ArcsineIid,
        Strategy::ChristoffelIid,
        Strategy::Alg1,
        Strategy::Alg2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::UniformIid => "uniform",
            Strategy::ArcsineIid => "arcsine",
            Strategy::ChristoffelIid => "christoffel",
            Strategy::Alg1 => "alg1",
            Strategy::Alg2 => "alg2",
        }
    }

    pub fn is_iid(self) -> bool {
        matches!(
            self,
            Strategy::UniformIid | Strategy::ArcsineIid | Strategy::ChristoffelIid
        )
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "uniform" | "uniformiid" => Ok(Strategy::UniformIid),
            "arcsine" | "arcsineiid" => Ok(Strategy::ArcsineIid),
            "christoffel" | "christoffeliid" => Ok(Strategy::ChristoffelIid),
            "alg1" | "1" => Ok(Strategy::Alg1),
            "alg2" | "2" => Ok(Strategy::Alg2),
            _ => Err(Error::InvalidParameter(format!(
                "unknown strategy {s:?} (expected uniform, arcsine, christoffel, alg1 or alg2)"
            ))),
        }
    }
}
