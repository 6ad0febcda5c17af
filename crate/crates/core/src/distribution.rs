//! The 16-entry joint outcome table and the constraints on it.
//!
//! Entries are stored 0-based in four blocks of four. Block `2*i + j` holds
//! the outcomes when Alice uses her setting `i` and Bob his setting `j`
//! (block 0 = (D1,D1'), 1 = (D1,D2'), 2 = (D2,D1'), 3 = (D2,D2')). Inside a
//! block the order is (+,+), (+,-), (-,+), (-,-) with Alice's outcome first.
//! A player's setting is their type, and outcome `+` is the first action.

use std::path::Path;

use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, rational_from_f64};
use crate::FEASIBILITY_TOL;

/// Positions of the eight free entries (ε1, ε4, ε5, ε8, ε9, ε12, ε14, ε15).
pub const INDEPENDENT: [usize; 8] = [0, 3, 4, 7, 8, 11, 13, 14];

/// Positions of the eight entries solved for (ε2, ε3, ε6, ε7, ε10, ε11, ε13, ε16).
pub const DEPENDENT: [usize; 8] = [1, 2, 5, 6, 9, 10, 12, 15];

/// Sign pattern of each dependent entry: `ε = (1 + Σ sign·μ) / 2`, with `μ`
/// in `INDEPENDENT` order.
const COMPLETION_SIGNS: [[i8; 8]; 8] = [
    [-1, -1, 1, -1, -1, 1, 1, -1],
    [-1, -1, -1, 1, 1, -1, -1, 1],
    [1, -1, -1, -1, -1, 1, 1, -1],
    [-1, 1, -1, -1, 1, -1, -1, 1],
    [-1, 1, 1, -1, -1, -1, 1, -1],
    [1, -1, -1, 1, -1, -1, -1, 1],
    [-1, 1, 1, -1, 1, -1, -1, -1],
    [1, -1, -1, 1, -1, 1, -1, -1],
];

/// The eight marginal equalities, as (left pair, right pair) of positions.
/// The first four fix Alice's or Bob's `+` marginal across the other
/// party's setting, the last four the `-` marginal.
pub const NO_SIGNALING: [([usize; 2], [usize; 2]); 8] = [
    ([0, 1], [4, 5]),
    ([0, 2], [8, 10]),
    ([8, 9], [12, 13]),
    ([4, 6], [12, 14]),
    ([2, 3], [6, 7]),
    ([10, 11], [14, 15]),
    ([1, 3], [9, 11]),
    ([5, 7], [13, 15]),
];

pub fn block_sums<T: Clone + Num>(eps: &[T; 16]) -> [T; 4] {
    std::array::from_fn(|k| {
        eps[4 * k..4 * k + 4]
            .iter()
            .cloned()
            .fold(T::zero(), |acc, v| acc + v)
    })
}

/// Signed residual `left - right` of each no-signaling equality.
pub fn no_signaling_residuals<T: Clone + Num>(eps: &[T; 16]) -> [T; 8] {
    NO_SIGNALING
        .map(|([a, b], [c, d])| eps[a].clone() + eps[b].clone() - eps[c].clone() - eps[d].clone())
}

/// Product table of a behavioural strategy `[p, q, p', q']`.
pub fn factorized<T: Clone + Num>(s: &[T; 4]) -> [T; 16] {
    let alice = [s[0].clone(), s[1].clone()];
    let bob = [s[2].clone(), s[3].clone()];
    let mut eps: [T; 16] = std::array::from_fn(|_| T::zero());
    for i in 0..2 {
        for j in 0..2 {
            let a = [alice[i].clone(), T::one() - alice[i].clone()];
            let b = [bob[j].clone(), T::one() - bob[j].clone()];
            for x in 0..2 {
                for y in 0..2 {
                    eps[4 * (2 * i + j) + 2 * x + y] = a[x].clone() * b[y].clone();
                }
            }
        }
    }
    eps
}

/// Fills the dependent entries from the eight independent ones.
pub fn complete<T: Clone + Num>(mu: &[T; 8]) -> [T; 16] {
    let two = T::one() + T::one();
    let mut eps: [T; 16] = std::array::from_fn(|_| T::zero());
    for (k, &pos) in INDEPENDENT.iter().enumerate() {
        eps[pos] = mu[k].clone();
    }
    for (row, &pos) in COMPLETION_SIGNS.iter().zip(DEPENDENT.iter()) {
        let mut acc = T::one();
        for (sign, m) in row.iter().zip(mu.iter()) {
            if *sign > 0 {
                acc = acc + m.clone();
            } else {
                acc = acc - m.clone();
            }
        }
        eps[pos] = acc / two.clone();
    }
    eps
}

/// Exact completion; rejects any dependent entry outside [0, 1].
pub fn complete_exact(mu: &[BigRational; 8]) -> Result<[BigRational; 16]> {
    let eps = complete(mu);
    let bad: Vec<String> = DEPENDENT
        .iter()
        .filter(|&&pos| eps[pos].is_negative() || eps[pos] > BigRational::one())
        .map(|&pos| format!("eps{} = {}", pos + 1, format_rational(&eps[pos])))
        .collect();
    if bad.is_empty() {
        Ok(eps)
    } else {
        Err(Error::Infeasible(bad))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionFile", into = "DistributionFile")]
pub struct JointDistribution {
    eps: [f64; 16],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub eps: Vec<f64>,
}

impl TryFrom<DistributionFile> for JointDistribution {
    type Error = Error;

    fn try_from(f: DistributionFile) -> Result<Self> {
        let eps: [f64; 16] = f.eps.try_into().map_err(|v: Vec<f64>| {
            Error::InvalidDistribution(format!("expected 16 entries, got {}", v.len()))
        })?;
        JointDistribution::new(eps)
    }
}

impl From<JointDistribution> for DistributionFile {
    fn from(d: JointDistribution) -> Self {
        DistributionFile {
            eps: d.eps.to_vec(),
        }
    }
}

impl JointDistribution {
    /// Entries must lie in [0, 1] up to the feasibility tolerance; entries
    /// just outside are clamped. Normalization is checked separately.
    pub fn new(eps: [f64; 16]) -> Result<Self> {
        let mut out = eps;
        for (k, v) in out.iter_mut().enumerate() {
            if !v.is_finite() || *v < -FEASIBILITY_TOL || *v > 1.0 + FEASIBILITY_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "eps{} = {v} outside [0,1]",
                    k + 1
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(JointDistribution { eps: out })
    }

    pub fn uniform() -> Self {
        JointDistribution { eps: [0.25; 16] }
    }

    pub fn eps(&self) -> &[f64; 16] {
        &self.eps
    }

    /// 1-based access matching the usual ε1…ε16 naming.
    pub fn e(&self, index: usize) -> f64 {
        self.eps[index - 1]
    }

    pub fn block(&self, k: usize) -> [f64; 4] {
        std::array::from_fn(|o| self.eps[4 * k + o])
    }

    pub fn independent(&self) -> IndependentSet {
        IndependentSet {
            mu: INDEPENDENT.map(|pos| self.eps[pos]),
        }
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &Self, weight: f64) -> Result<Self> {
        Self::new(std::array::from_fn(|k| {
            weight * self.eps[k] + (1.0 - weight) * other.eps[k]
        }))
    }

    pub fn to_exact(&self) -> [BigRational; 16] {
        self.eps
            .map(|v| rational_from_f64(v).expect("entries are finite"))
    }

    pub fn from_exact(eps: &[BigRational; 16]) -> Result<Self> {
        Self::new(eps.clone().map(|r| crate::scalar::rational_to_f64(&r)))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub(crate) fn ensure_normalized(&self, tol: f64) -> Result<()> {
        if check_normalization(self, tol) {
            Ok(())
        } else {
            Err(Error::NotNormalized(block_sums(&self.eps)))
        }
    }
}

/// Probability of the first action for each player type.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehavioralStrategy {
    pub p: f64,
    pub q: f64,
    pub p_prime: f64,
    pub q_prime: f64,
}

impl BehavioralStrategy {
    pub fn new(p: f64, q: f64, p_prime: f64, q_prime: f64) -> Result<Self> {
        Self::from_array([p, q, p_prime, q_prime])
    }

    pub fn from_array(s: [f64; 4]) -> Result<Self> {
        if let Some(v) = s.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidStrategy(format!(
                "probability {v} outside [0,1]"
            )));
        }
        let [p, q, p_prime, q_prime] = s;
        Ok(BehavioralStrategy {
            p,
            q,
            p_prime,
            q_prime,
        })
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.p, self.q, self.p_prime, self.q_prime]
    }

    /// Alice's (type 1, type 2) then Bob's (type 1, type 2).
    pub fn alice(&self) -> [f64; 2] {
        [self.p, self.q]
    }

    pub fn bob(&self) -> [f64; 2] {
        [self.p_prime, self.q_prime]
    }
}

impl std::fmt::Display for BehavioralStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({},{};{},{})",
            self.p, self.q, self.p_prime, self.q_prime
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependentSet {
    pub mu: [f64; 8],
}

impl IndependentSet {
    pub fn new(mu: [f64; 8]) -> Result<Self> {
        if let Some(v) = mu.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidDistribution(format!(
                "independent entry {v} outside [0,1]"
            )));
        }
        Ok(IndependentSet { mu })
    }
}

pub fn from_strategy(s: &BehavioralStrategy) -> JointDistribution {
    JointDistribution::new(factorized(&s.to_array()))
        .expect("products of probabilities lie in [0,1]")
}

pub fn check_normalization(d: &JointDistribution, tol: f64) -> bool {
    block_sums(&d.eps).iter().all(|s| (s - 1.0).abs() <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoSignalingReport {
    pub residuals: [f64; 8],
    pub tol: f64,
}

impl NoSignalingReport {
    pub fn passes(&self) -> bool {
        self.max_abs() <= self.tol
    }

    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

pub fn check_no_signaling(d: &JointDistribution, tol: f64) -> NoSignalingReport {
    NoSignalingReport {
        residuals: no_signaling_residuals(&d.eps),
        tol,
    }
}

/// Completes `m` and checks every dependent entry lies in [-tol, 1 + tol].
pub fn complete_from_independent(m: &IndependentSet, tol: f64) -> Result<JointDistribution> {
    let eps = complete(&m.mu);
    let bad: Vec<String> = DEPENDENT
        .iter()
        .filter(|&&pos| eps[pos] < -tol || eps[pos] > 1.0 + tol)
        .map(|&pos| format!("eps{} = {}", pos + 1, eps[pos]))
        .collect();
    if !bad.is_empty() {
        return Err(Error::Infeasible(bad));
    }
    JointDistribution::new(eps.map(|v| v.clamp(0.0, 1.0)))
}

/// Recovers the marginals and returns them if the table is their product.
pub fn is_factorizable(d: &JointDistribution, tol: f64) -> Option<BehavioralStrategy> {
    let e = &d.eps;
    let s = [e[0] + e[1], e[8] + e[9], e[0] + e[2], e[4] + e[6]].map(|v| v.clamp(0.0, 1.0));
    let product = factorized(&s);
    product
        .iter()
        .zip(e.iter())
        .all(|(a, b)| (a - b).abs() <= tol)
        .then(|| BehavioralStrategy::from_array(s).expect("clamped to [0,1]"))
}

/// Uniform samples from the no-signaling polytope, by rejection over the
/// independent coordinates.
pub struct NoSignalingSampler {
    rng: ChaCha8Rng,
    max_attempts: u64,
    attempts: u64,
}

impl NoSignalingSampler {
    pub const MAX_ATTEMPTS: u64 = 1_000_000;

    pub fn new(seed: u64) -> Self {
        NoSignalingSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_attempts: Self::MAX_ATTEMPTS,
            attempts: 0,
        }
    }

    /// Total candidate draws so far, accepted or not.
    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    pub fn next_table(&mut self) -> Result<JointDistribution> {
        for _ in 0..self.max_attempts {
            self.attempts += 1;
            let mu: [f64; 8] = std::array::from_fn(|_| self.rng.random::<f64>());
            let eps = complete(&mu);
            if DEPENDENT.iter().all(|&pos| (0.0..=1.0).contains(&eps[pos])) {
                return JointDistribution::new(eps);
            }
        }
        Err(Error::SamplingExhausted(self.max_attempts))
    }
}

pub fn sample_no_signaling(seed: u64) -> Result<JointDistribution> {
    NoSignalingSampler::new(seed).next_table()
}

/// True if every entry of an exact table is in [0,1] and all twelve
/// equality constraints hold exactly.
pub fn satisfies_exactly(eps: &[BigRational; 16]) -> bool {
    eps.iter()
        .all(|v| !v.is_negative() && *v <= BigRational::one())
        && block_sums(eps).iter().all(|s| s.is_one())
        && no_signaling_residuals(eps).iter().all(|r| r.is_zero())
}
