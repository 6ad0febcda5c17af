//! CHSH correlations and the local / Tsirelson bounds.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::distribution::{
    check_no_signaling, check_normalization, JointDistribution, INDEPENDENT,
};
use crate::error::{Error, Result};
use crate::FEASIBILITY_TOL;

pub const LOCAL_BOUND: f64 = 2.0;
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Local,
    Quantum,
    SuperQuantum,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Local => "local",
            Regime::Quantum => "quantum",
            Regime::SuperQuantum => "super-quantum",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    #[serde(rename = "corr11")]
    pub corr_11: f64,
    #[serde(rename = "corr12")]
    pub corr_12: f64,
    #[serde(rename = "corr21")]
    pub corr_21: f64,
    #[serde(rename = "corr22")]
    pub corr_22: f64,
    pub delta: f64,
    pub regime: Regime,
}

/// `<D1D1'>, <D1D2'>, <D2D1'>, <D2D2'>`, one per block.
pub fn correlations(d: &JointDistribution) -> Result<[f64; 4]> {
    d.ensure_normalized(FEASIBILITY_TOL)?;
    Ok(std::array::from_fn(|k| {
        let [pp, pm, mp, mm] = d.block(k);
        pp - pm - mp + mm
    }))
}

pub fn chsh_delta(d: &JointDistribution) -> Result<f64> {
    let [c11, c12, c21, c22] = correlations(d)?;
    Ok(c11 + c12 + c21 - c22)
}

/// Δ from the eight independent entries alone. Only valid on normalized
/// no-signaling tables; anything else is refused.
pub fn chsh_delta_reduced(d: &JointDistribution) -> Result<f64> {
    d.ensure_normalized(FEASIBILITY_TOL)?;
    let ns = check_no_signaling(d, FEASIBILITY_TOL);
    if !ns.passes() {
        return Err(Error::Precondition(format!(
            "reduced CHSH form needs a no-signaling table (max residual {})",
            ns.max_abs()
        )));
    }
    let s: f64 = INDEPENDENT.iter().map(|&pos| d.eps()[pos]).sum();
    Ok(2.0 * (s - 2.0))
}

/// Half-open intervals on |Δ|: (.., 2] local, (2, 2√2] quantum, beyond that
/// super-quantum, each threshold widened by `tol`.
pub fn classify(delta: f64, tol: f64) -> Regime {
    let a = delta.abs();
    if a <= LOCAL_BOUND + tol {
        Regime::Local
    } else if a <= TSIRELSON_BOUND + tol {
        Regime::Quantum
    } else {
        Regime::SuperQuantum
    }
}

pub fn chsh_report(d: &JointDistribution, tol: f64) -> Result<ChshReport> {
    let [corr_11, corr_12, corr_21, corr_22] = correlations(d)?;
    let delta = corr_11 + corr_12 + corr_21 - corr_22;
    Ok(ChshReport {
        corr_11,
        corr_12,
        corr_21,
        corr_22,
        delta,
        regime: classify(delta, tol),
    })
}

/// True if the table passes both normalization and no-signaling at `tol`.
pub fn is_no_signaling(d: &JointDistribution, tol: f64) -> bool {
    check_normalization(d, tol) && check_no_signaling(d, tol).passes()
}
