//! Social welfare in a two-player, two-type Bayesian game.
//!
//! The game is evaluated under three kinds of correlation between the
//! players' behaviour:
//!
//! * classical mixed strategies, which yield factorizable joint tables;
//! * quantum correlations from measuring a two-qubit state along planar
//!   directions (one direction per player type);
//! * arbitrary no-signaling joint tables.
//!
//! All three are expressed as a 16-entry [`JointDistribution`] in a fixed
//! block layout, so a single payoff evaluator covers every regime.

pub mod bell;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod game;
pub mod optimize;
pub mod payoffs;
pub mod quantum;
pub mod scalar;

pub use bell::{
    chsh_delta, chsh_delta_reduced, chsh_report, classify, correlations, ChshReport, Regime,
};
pub use distribution::{
    check_no_signaling, check_normalization, complete_from_independent, from_strategy,
    is_factorizable, sample_no_signaling, BehavioralStrategy, IndependentSet, JointDistribution,
    NoSignalingReport, NoSignalingSampler,
};
pub use error::{Error, Result};
pub use game::{normal_form, paper_game, validate, Diagnostic, GameSpec, NormalForm, PayoffBlock};
pub use payoffs::{
    payoffs_from_distribution, payoffs_from_strategy, welfare, welfare_delta_identity,
    PayoffProfile,
};
pub use quantum::{bell_state, correlation, epr_distribution, MeasurementSettings, QuantumState};
pub use scalar::Scalar;

/// Default tolerance for feasibility checks on floating-point tables.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Tolerance for identities that hold exactly up to rounding.
pub const IDENTITY_TOL: f64 = 1e-12;
