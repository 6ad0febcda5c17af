use std::f64::consts::TAU;
use std::time::Instant;

use rayon::prelude::*;

use super::{Argmax, Audit, Method, OptimizationResult, MAX_TIES, TIE_TOL};
use crate::error::Result;
use crate::game::GameSpec;
use crate::payoffs::WelfareEvaluator;
use crate::quantum::{epr_distribution, MeasurementSettings, QuantumState};

/// Coarse grid over the four measurement angles, then coordinate-wise
/// golden-section refinement around the best grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleSearch {
    /// Grid points per angle.
    pub grid: usize,
    /// Bracket width at which golden-section search stops.
    pub angle_tol: f64,
    pub max_sweeps: usize,
}

impl Default for AngleSearch {
    fn default() -> Self {
        AngleSearch {
            grid: 24,
            angle_tol: 1e-8,
            max_sweeps: 100,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

struct Objective<'a> {
    eval: WelfareEvaluator,
    psi: &'a QuantumState,
}

impl Objective<'_> {
    fn at(&self, angles: [f64; 4]) -> f64 {
        let m = MeasurementSettings::from_array(angles).expect("finite angles");
        let d = epr_distribution(self.psi, &m).expect("state checked up front");
        self.eval.table(d.eps())
    }
}

impl AngleSearch {
    pub fn run(&self, g: &GameSpec, psi: &QuantumState) -> Result<OptimizationResult> {
        let start = Instant::now();
        // Surfaces a non-normalized state as an error before the search.
        epr_distribution(psi, &MeasurementSettings::canonical_chsh())?;
        let f = Objective {
            eval: WelfareEvaluator::new(g)?,
            psi,
        };
        let n = self.grid.max(1);
        let step = TAU / n as f64;
        let index =
            |k: usize| -> [usize; 4] { [k / (n * n * n), k / (n * n) % n, k / n % n, k % n] };
        let angles = |ix: [usize; 4]| ix.map(|i| i as f64 * step);

        let values: Vec<f64> = (0..n.pow(4))
            .into_par_iter()
            .map(|k| f.at(angles(index(k))))
            .collect();
        let grid_best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // Lexicographically first grid point within rounding of the maximum.
        let best_k = values
            .iter()
            .position(|&v| v >= grid_best - 1e-12)
            .expect("non-empty grid");
        let mut evaluations = values.len() as u64;

        let mut x = angles(index(best_k));
        let mut fx = grid_best;
        for _ in 0..self.max_sweeps {
            let before = fx;
            for i in 0..4 {
                let (xi, fi, used) = self.golden(&f, &x, i, step);
                evaluations += used;
                if fi > fx {
                    x[i] = xi;
                    fx = fi;
                }
            }
            if fx - before <= 1e-15 {
                break;
            }
        }

        let argmax = MeasurementSettings::from_array(x)?;
        let mut ties = vec![Argmax::Settings(argmax)];
        for (k, &v) in values.iter().enumerate() {
            if ties.len() >= MAX_TIES {
                break;
            }
            if v >= fx - TIE_TOL {
                let m = MeasurementSettings::from_array(angles(index(k)))?;
                if !ties.contains(&Argmax::Settings(m)) {
                    ties.push(Argmax::Settings(m));
                }
            }
        }

        Ok(OptimizationResult {
            value: fx,
            argmax: Argmax::Settings(argmax),
            method: Method::AngleSearch,
            ties,
            audit: Audit {
                evaluations,
                wall_time: start.elapsed(),
                grid: Some(n),
                grid_max: Some(grid_best),
            },
            exact: None,
        })
    }

    /// Golden-section maximization of coordinate `i` over `[x_i - h, x_i + h]`.
    fn golden(&self, f: &Objective, x: &[f64; 4], i: usize, h: f64) -> (f64, f64, u64) {
        let eval = |t: f64| {
            let mut y = *x;
            y[i] = t;
            f.at(y)
        };
        let (mut a, mut b) = (x[i] - h, x[i] + h);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut fc, mut fd) = (eval(c), eval(d));
        let mut used = 2;
        while b - a > self.angle_tol {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = eval(d);
            }
            used += 1;
        }
        let t = 0.5 * (a + b);
        (t, eval(t), used + 1)
    }
}

/// Default search: 24 points per angle, refinement to 1e-8 rad.
pub fn quantum_social_optimum(g: &GameSpec, psi: &QuantumState) -> Result<OptimizationResult> {
    AngleSearch::default().run(g, psi)
}
