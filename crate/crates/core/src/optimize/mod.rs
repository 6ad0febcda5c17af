//! Welfare maximization in each correlation regime.

mod angles;
mod classical;
mod polytope;
pub mod simplex;
mod verify;

use std::time::Duration;

use serde::Serialize;

use crate::distribution::{BehavioralStrategy, JointDistribution};
use crate::quantum::MeasurementSettings;

pub use angles::{quantum_social_optimum, AngleSearch};
pub use classical::{
    classical_social_optimum, classical_social_optimum_with_grid, grid_maximum, stationary_points,
    MultilinearWelfare, StationaryAnalysis, StationaryPoint, DEFAULT_GRID,
};
pub use polytope::{no_signaling_program, no_signaling_social_optimum};
pub use verify::{verify_report, verify_report_with, Claim, ClaimStatus, VerifyReport};

/// Tolerance for ties and for re-evaluating a reported optimum.
pub const TIE_TOL: f64 = 1e-9;

/// Most co-optimal points kept in a result.
pub const MAX_TIES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Argmax {
    Strategy(BehavioralStrategy),
    Settings(MeasurementSettings),
    Distribution(JointDistribution),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    VertexEnum,
    Stationary,
    Grid,
    AngleSearch,
    Lp,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Audit {
    pub evaluations: u64,
    /// Excluded from serialized output so repeated runs print identical bytes.
    #[serde(skip)]
    pub wall_time: Duration,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_max: Option<f64>,
}

/// Exact optimum from the rational simplex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactCertificate {
    pub value: String,
    pub eps: Vec<String>,
    pub constraints_hold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub value: f64,
    pub argmax: Argmax,
    pub method: Method,
    pub ties: Vec<Argmax>,
    pub audit: Audit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactCertificate>,
}
