use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{Argmax, Audit, Method, OptimizationResult, MAX_TIES, TIE_TOL};
use crate::distribution::BehavioralStrategy;
use crate::error::{Error, Result};
use crate::game::{ensure_valid, GameSpec};
use crate::payoffs::{strategy_payoffs, WelfareEvaluator};
use crate::scalar::{format_rational, half, rational_to_f64};

/// Grid divisions per coordinate for the dense cross-check (step 1/64).
pub const DEFAULT_GRID: usize = 64;

const VARIABLES: [&str; 4] = ["p", "q", "p'", "q'"];

/// Welfare written as a multilinear polynomial in `(p, q, p', q')`.
/// Coefficient `k` multiplies the product of the variables whose bits are
/// set in `k` (bit 0 = p, bit 1 = q, bit 2 = p', bit 3 = q').
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearWelfare {
    coeffs: [BigRational; 16],
}

fn vertex(mask: usize) -> [BigRational; 4] {
    std::array::from_fn(|i| {
        if mask >> i & 1 == 1 {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    })
}

impl MultilinearWelfare {
    /// Interpolates the 16 exact vertex values (Möbius inversion over subsets).
    pub fn from_game(g: &GameSpec) -> Result<Self> {
        ensure_valid(g)?;
        let t = g.tables_exact()?;
        let at_vertex: Vec<BigRational> = (0..16)
            .map(|mask| {
                strategy_payoffs(&t, &vertex(mask))
                    .into_iter()
                    .fold(BigRational::zero(), |acc, v| acc + v)
            })
            .collect();
        let coeffs = std::array::from_fn(|set: usize| {
            let mut c = BigRational::zero();
            for sub in 0..16usize {
                if sub & !set != 0 {
                    continue;
                }
                if (set.count_ones() - sub.count_ones()).is_multiple_of(2) {
                    c += &at_vertex[sub];
                } else {
                    c -= &at_vertex[sub];
                }
            }
            c
        });
        Ok(MultilinearWelfare { coeffs })
    }

    pub fn coefficient(&self, mask: usize) -> &BigRational {
        &self.coeffs[mask]
    }

    pub fn coefficients(&self) -> &[BigRational; 16] {
        &self.coeffs
    }

    pub fn value_exact(&self, x: &[BigRational; 4]) -> BigRational {
        (0..16).fold(BigRational::zero(), |acc, mask| {
            let mut term = self.coeffs[mask].clone();
            for (i, xi) in x.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    term *= xi;
                }
            }
            acc + term
        })
    }

    pub fn gradient_exact(&self, x: &[BigRational; 4]) -> [BigRational; 4] {
        std::array::from_fn(|i| {
            (0..16)
                .filter(|m| m >> i & 1 == 1)
                .fold(BigRational::zero(), |acc, mask| {
                    let mut term = self.coeffs[mask].clone();
                    for (j, xj) in x.iter().enumerate() {
                        if j != i && mask >> j & 1 == 1 {
                            term *= xj;
                        }
                    }
                    acc + term
                })
        })
    }

    pub fn gradient(&self, x: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|i| {
            (0..16).filter(|m| m >> i & 1 == 1).fold(0.0, |acc, mask| {
                let mut term = rational_to_f64(&self.coeffs[mask]);
                for (j, xj) in x.iter().enumerate() {
                    if j != i && mask >> j & 1 == 1 {
                        term *= xj;
                    }
                }
                acc + term
            })
        })
    }

    /// Human-readable expansion, e.g. `3 - 2p - 2p' + 2pp' + ...`.
    pub fn polynomial(&self) -> String {
        let mut order: Vec<usize> = (0..16).collect();
        order.sort_by_key(|m| (m.count_ones(), *m));
        let mut out = String::new();
        for mask in order {
            let c = &self.coeffs[mask];
            if c.is_zero() {
                continue;
            }
            let monomial: String = (0..4)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| VARIABLES[i])
                .collect();
            let mag = c.abs();
            let coef = if mag.is_one() && mask != 0 {
                String::new()
            } else {
                format_rational(&mag)
            };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&coef);
            out.push_str(&monomial);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Zero coefficient on every monomial that pairs two variables of the
    /// same player; always true for payoffs built from type-pair blocks.
    fn is_bilinear(&self) -> bool {
        (0..16).all(|m| (m & 0b0011 != 0b0011 && m & 0b1100 != 0b1100) || self.coeffs[m].is_zero())
    }
}

fn evaluator_strategy(mask: usize) -> [f64; 4] {
    std::array::from_fn(|i| (mask >> i & 1) as f64)
}

/// Largest welfare on the `(n + 1)^4` grid with step `1/n`.
pub fn grid_maximum(eval: &WelfareEvaluator, n: usize) -> f64 {
    let n = n.max(1);
    let step = 1.0 / n as f64;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let p = i as f64 * step;
            let mut best = f64::NEG_INFINITY;
            for j in 0..=n {
                let q = j as f64 * step;
                for k in 0..=n {
                    let pp = k as f64 * step;
                    for l in 0..=n {
                        best = best.max(eval.strategy(&[p, q, pp, l as f64 * step]));
                    }
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

pub fn classical_social_optimum(g: &GameSpec) -> Result<OptimizationResult> {
    classical_social_optimum_with_grid(g, DEFAULT_GRID)
}

/// Vertex enumeration, checked against a grid with `grid` divisions per
/// coordinate (`0` skips the grid).
pub fn classical_social_optimum_with_grid(g: &GameSpec, grid: usize) -> Result<OptimizationResult> {
    let start = Instant::now();
    let eval = WelfareEvaluator::new(g)?;
    // Masks enumerate (p, q, p', q') with p as the least significant bit;
    // reorder so ties come out lexicographically.
    let mut vertices: Vec<([f64; 4], f64)> = (0..16)
        .map(|mask| {
            let s = evaluator_strategy(mask);
            (s, eval.strategy(&s))
        })
        .collect();
    vertices.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let value = vertices
        .iter()
        .map(|v| v.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<Argmax> = vertices
        .iter()
        .filter(|(_, w)| *w >= value - TIE_TOL)
        .take(MAX_TIES)
        .map(|(s, _)| Argmax::Strategy(BehavioralStrategy::from_array(*s).expect("vertex")))
        .collect();

    let mut audit = Audit {
        evaluations: 16,
        ..Audit::default()
    };
    if grid > 0 {
        let gmax = grid_maximum(&eval, grid);
        audit.evaluations += ((grid + 1) as u64).pow(4);
        audit.grid = Some(grid);
        audit.grid_max = Some(gmax);
        if gmax > value + TIE_TOL {
            return Err(Error::Precondition(format!(
                "grid maximum {gmax} exceeds vertex maximum {value}; welfare is not multilinear"
            )));
        }
    }
    audit.wall_time = start.elapsed();
    Ok(OptimizationResult {
        value,
        argmax: ties[0].clone(),
        method: Method::VertexEnum,
        ties,
        audit,
        exact: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationaryPoint {
    pub strategy: BehavioralStrategy,
    pub welfare: f64,
    pub gradient_norm: f64,
    /// Exact coordinates as `a/b` strings.
    pub exact: [String; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationaryAnalysis {
    pub points: Vec<StationaryPoint>,
    /// The stationarity system is singular: the stationary set is a line,
    /// a plane or empty, and `points` holds the member nearest the centroid.
    pub degenerate: bool,
    pub polynomial: String,
    /// Grid points (step 1/16) whose gradient vanishes but that are not in
    /// the solved stationary set. Always 0 unless the case analysis is wrong.
    pub grid_misses: usize,
}

enum Solved {
    Unique([BigRational; 2]),
    /// Singular but consistent; the solution nearest (1/2, 1/2).
    Family([BigRational; 2]),
    Empty,
}

fn dot(a: &[BigRational; 2], b: &[BigRational; 2]) -> BigRational {
    &a[0] * &b[0] + &a[1] * &b[1]
}

/// Solves the 2×2 system `m · y = r` exactly.
fn solve2(m: [[BigRational; 2]; 2], r: [BigRational; 2]) -> Solved {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if !det.is_zero() {
        let y0 = (&r[0] * &m[1][1] - &m[0][1] * &r[1]) / &det;
        let y1 = (&m[0][0] * &r[1] - &r[0] * &m[1][0]) / &det;
        return Solved::Unique([y0, y1]);
    }
    let centre = [half(), half()];
    let nonzero = (0..2).find(|&i| m[i].iter().any(|v| !v.is_zero()));
    let Some(i) = nonzero else {
        return if r.iter().all(Zero::is_zero) {
            Solved::Family(centre)
        } else {
            Solved::Empty
        };
    };
    // Rank one: the other row must be the same multiple of row i as its rhs.
    let row = m[i].clone();
    let k = 1 - i;
    let lead = if row[0].is_zero() { 1 } else { 0 };
    let factor = &m[k][lead] / &row[lead];
    let consistent = (0..2).all(|j| m[k][j] == &factor * &row[j]) && r[k] == &factor * &r[i];
    if !consistent {
        return Solved::Empty;
    }
    let shift = (&r[i] - dot(&row, &centre)) / dot(&row, &row);
    Solved::Family([&centre[0] + &shift * &row[0], &centre[1] + &shift * &row[1]])
}

fn interior(x: &[BigRational; 4]) -> bool {
    x.iter().all(|v| v.is_positive() && *v < BigRational::one())
}

fn norm(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn stationary_points(g: &GameSpec) -> Result<StationaryAnalysis> {
    let w = MultilinearWelfare::from_game(g)?;
    if !w.is_bilinear() {
        return Err(Error::Precondition(
            "welfare has same-player cross terms".into(),
        ));
    }
    let c = |mask: usize| w.coefficient(mask).clone();
    // ∂/∂p and ∂/∂q are linear in (p', q'); ∂/∂p' and ∂/∂q' in (p, q).
    let m = [[c(0b0101), c(0b1001)], [c(0b0110), c(0b1010)]];
    let mt = [
        [m[0][0].clone(), m[1][0].clone()],
        [m[0][1].clone(), m[1][1].clone()],
    ];
    let bob = solve2(m, [-c(0b0001), -c(0b0010)]);
    let alice = solve2(mt, [-c(0b0100), -c(0b1000)]);

    let (x, degenerate) = match (alice, bob) {
        (Solved::Unique(a), Solved::Unique(b)) => (
            Some([a[0].clone(), a[1].clone(), b[0].clone(), b[1].clone()]),
            false,
        ),
        (Solved::Empty, _) | (_, Solved::Empty) => (None, true),
        (Solved::Unique(a) | Solved::Family(a), Solved::Unique(b) | Solved::Family(b)) => (
            Some([a[0].clone(), a[1].clone(), b[0].clone(), b[1].clone()]),
            true,
        ),
    };

    let mut points = Vec::new();
    if let Some(x) = x.filter(interior) {
        let xf = x.clone().map(|v| rational_to_f64(&v));
        let grad = w.gradient_exact(&x).map(|v| rational_to_f64(&v));
        let gradient_norm = norm(&grad);
        if gradient_norm <= 1e-10 {
            points.push(StationaryPoint {
                strategy: BehavioralStrategy::from_array(xf).expect("interior point"),
                welfare: rational_to_f64(&w.value_exact(&x)),
                gradient_norm,
                exact: x.map(|v| format_rational(&v)),
            });
        }
    }

    let grid_misses = if degenerate {
        0
    } else {
        grid_scan(&w, points.first())
    };
    Ok(StationaryAnalysis {
        points,
        degenerate,
        polynomial: w.polynomial(),
        grid_misses,
    })
}

fn grid_scan(w: &MultilinearWelfare, found: Option<&StationaryPoint>) -> usize {
    const N: usize = 16;
    let step = 1.0 / N as f64;
    let mut misses = 0;
    for i in 1..N {
        for j in 1..N {
            for k in 1..N {
                for l in 1..N {
                    let x = [i, j, k, l].map(|v| v as f64 * step);
                    if norm(&w.gradient(&x)) > 1e-10 {
                        continue;
                    }
                    let known = found.is_some_and(|p| {
                        p.strategy
                            .to_array()
                            .iter()
                            .zip(x)
                            .all(|(a, b)| (a - b).abs() < 1e-12)
                    });
                    if !known {
                        misses += 1;
                    }
                }
            }
        }
    }
    misses
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::paper_game;
    use crate::scalar::Scalar;

    #[test]
    fn preset_polynomial() {
        let w = MultilinearWelfare::from_game(&paper_game()).unwrap();
        assert_eq!(w.polynomial(), "3 - 2p - 2p' + 2pp' + 2qp' + 2pq' - 2qq'");
    }

    #[test]
    fn preset_classical_optimum() {
        let r = classical_social_optimum_with_grid(&paper_game(), 8).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.method, Method::VertexEnum);
        let zero = Argmax::Strategy(BehavioralStrategy::new(0.0, 0.0, 0.0, 0.0).unwrap());
        let ones = Argmax::Strategy(BehavioralStrategy::new(1.0, 1.0, 1.0, 1.0).unwrap());
        assert_eq!(r.argmax, zero);
        assert!(r.ties.contains(&ones));
        assert!(r.audit.grid_max.unwrap() <= 3.0 + TIE_TOL);
    }

    #[test]
    fn zero_game_ties_everywhere() {
        let g = paper_game().map_payoffs(|_| Scalar::int(0));
        let r = classical_social_optimum_with_grid(&g, 4).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.ties.len(), 16);
        let s = stationary_points(&g).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].strategy.to_array(), [0.5; 4]);
    }

    #[test]
    fn preset_stationary_point() {
        let s = stationary_points(&paper_game()).unwrap();
        assert!(!s.degenerate);
        assert_eq!(s.points.len(), 1);
        let p = &s.points[0];
        assert_eq!(p.exact, ["1/2", "1/2", "1/2", "1/2"].map(String::from));
        assert_eq!(p.welfare, 2.0);
        assert_eq!(s.grid_misses, 0);
    }

    #[test]
    fn singular_rank_one_systems() {
        let q = |n: i64| BigRational::from_integer(n.into());
        // y0 + y1 = 1: nearest point to the centre is the centre itself.
        match solve2([[q(1), q(1)], [q(2), q(2)]], [q(1), q(2)]) {
            Solved::Family(y) => assert_eq!(y, [half(), half()]),
            _ => panic!("expected a family"),
        }
        assert!(matches!(
            solve2([[q(1), q(1)], [q(2), q(2)]], [q(1), q(3)]),
            Solved::Empty
        ));
        assert!(matches!(
            solve2([[q(0), q(0)], [q(0), q(0)]], [q(1), q(0)]),
            Solved::Empty
        ));
        match solve2([[q(0), q(2)], [q(0), q(0)]], [q(2), q(0)]) {
            Solved::Family(y) => assert_eq!(y, [half(), q(1)]),
            _ => panic!("expected a family"),
        }
    }
}
