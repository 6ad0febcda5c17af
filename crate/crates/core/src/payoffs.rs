//! Type-conditional payoffs and social welfare.
//!
//! Two independent evaluators: the bilinear form over mixed strategies, and
//! the linear form over a joint outcome table (outcome `+` read as the first
//! action). On a product table the two agree.

use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::bell::{chsh_delta, is_no_signaling};
use crate::distribution::{BehavioralStrategy, JointDistribution};
use crate::error::{Error, Result};
use crate::game::{ensure_valid, paper_game, GameSpec, PayoffTables};
use crate::FEASIBILITY_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffProfile {
    #[serde(rename = "pi_A1")]
    pub pi_a1: f64,
    #[serde(rename = "pi_A2")]
    pub pi_a2: f64,
    #[serde(rename = "pi_B1")]
    pub pi_b1: f64,
    #[serde(rename = "pi_B2")]
    pub pi_b2: f64,
    pub sum: f64,
}

impl PayoffProfile {
    pub fn new(pi_a1: f64, pi_a2: f64, pi_b1: f64, pi_b2: f64) -> Self {
        PayoffProfile {
            pi_a1,
            pi_a2,
            pi_b1,
            pi_b2,
            sum: pi_a1 + pi_a2 + pi_b1 + pi_b2,
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.pi_a1, self.pi_a2, self.pi_b1, self.pi_b2]
    }
}

/// `[Π_A1, Π_A2, Π_B1, Π_B2]` for first-action probabilities
/// `s = [p, q, p', q']`.
pub fn strategy_payoffs<T: Clone + Num>(t: &PayoffTables<T>, s: &[T; 4]) -> [T; 4] {
    let mixed = |x: &T| [x.clone(), T::one() - x.clone()];
    let alice = [mixed(&s[0]), mixed(&s[1])];
    let bob = [mixed(&s[2]), mixed(&s[3])];
    let bilinear = |m: &[[T; 2]; 2], u: &[T; 2], v: &[T; 2]| {
        let mut acc = T::zero();
        for x in 0..2 {
            for y in 0..2 {
                acc = acc + u[x].clone() * m[x][y].clone() * v[y].clone();
            }
        }
        acc
    };
    let mut out: [T; 4] = std::array::from_fn(|_| T::zero());
    for a in 0..2 {
        for b in 0..2 {
            out[a] = out[a].clone()
                + t.alice_weight[a][b].clone() * bilinear(&t.alice[a][b], &alice[a], &bob[b]);
            out[2 + b] = out[2 + b].clone()
                + t.bob_weight[a][b].clone() * bilinear(&t.bob[a][b], &alice[a], &bob[b]);
        }
    }
    out
}

/// `[Π_A1, Π_A2, Π_B1, Π_B2]` from a joint table in block layout.
pub fn table_payoffs<T: Clone + Num>(t: &PayoffTables<T>, eps: &[T; 16]) -> [T; 4] {
    let mut out: [T; 4] = std::array::from_fn(|_| T::zero());
    for a in 0..2 {
        for b in 0..2 {
            let base = 4 * (2 * a + b);
            let mut ua = T::zero();
            let mut ub = T::zero();
            for x in 0..2 {
                for y in 0..2 {
                    let e = eps[base + 2 * x + y].clone();
                    ua = ua + t.alice[a][b][x][y].clone() * e.clone();
                    ub = ub + t.bob[a][b][x][y].clone() * e;
                }
            }
            out[a] = out[a].clone() + t.alice_weight[a][b].clone() * ua;
            out[2 + b] = out[2 + b].clone() + t.bob_weight[a][b].clone() * ub;
        }
    }
    out
}

/// Coefficient of each ε in the welfare, which is linear in the table.
pub fn welfare_coefficients<T: Clone + Num>(t: &PayoffTables<T>) -> [T; 16] {
    std::array::from_fn(|k| {
        let mut unit: [T; 16] = std::array::from_fn(|_| T::zero());
        unit[k] = T::one();
        table_payoffs(t, &unit)
            .into_iter()
            .fold(T::zero(), |acc, v| acc + v)
    })
}

pub fn payoffs_from_strategy(g: &GameSpec, s: &BehavioralStrategy) -> Result<PayoffProfile> {
    ensure_valid(g)?;
    let [a1, a2, b1, b2] = strategy_payoffs(&g.tables_f64(), &s.to_array());
    Ok(PayoffProfile::new(a1, a2, b1, b2))
}

pub fn payoffs_from_distribution(g: &GameSpec, d: &JointDistribution) -> Result<PayoffProfile> {
    ensure_valid(g)?;
    d.ensure_normalized(FEASIBILITY_TOL)?;
    let [a1, a2, b1, b2] = table_payoffs(&g.tables_f64(), d.eps());
    Ok(PayoffProfile::new(a1, a2, b1, b2))
}

pub fn welfare(profile: &PayoffProfile) -> f64 {
    profile.sum
}

/// `welfare - (Δ/2 + 2)` for the preset game. Each side is computed from
/// its own definition.
pub fn welfare_delta_identity(d: &JointDistribution, tol: f64) -> Result<f64> {
    if !is_no_signaling(d, tol.max(FEASIBILITY_TOL)) {
        return Err(Error::Precondition(
            "welfare/CHSH identity needs a normalized no-signaling table".into(),
        ));
    }
    let w = welfare(&payoffs_from_distribution(&paper_game(), d)?);
    Ok(w - (chsh_delta(d)? / 2.0 + 2.0))
}

/// Pre-converted game for tight evaluation loops.
#[derive(Clone, Debug)]
pub struct WelfareEvaluator {
    tables: PayoffTables<f64>,
}

impl WelfareEvaluator {
    pub fn new(g: &GameSpec) -> Result<Self> {
        ensure_valid(g)?;
        Ok(WelfareEvaluator {
            tables: g.tables_f64(),
        })
    }

    pub fn strategy(&self, s: &[f64; 4]) -> f64 {
        strategy_payoffs(&self.tables, s).iter().sum()
    }

    pub fn table(&self, eps: &[f64; 16]) -> f64 {
        table_payoffs(&self.tables, eps).iter().sum()
    }
}
