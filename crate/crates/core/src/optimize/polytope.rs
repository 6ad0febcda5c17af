use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::simplex::{solve, LinearProgram, LpOutcome};
use super::{Argmax, Audit, ExactCertificate, Method, OptimizationResult};
use crate::distribution::{satisfies_exactly, JointDistribution, NO_SIGNALING};
use crate::error::{Error, Result};
use crate::game::{ensure_valid, GameSpec};
use crate::payoffs::welfare_coefficients;
use crate::scalar::{format_rational, rational_to_f64};

/// Welfare over the no-signaling polytope as an LP: 16 nonnegative
/// entries, four block normalizations, eight marginal equalities.
pub fn no_signaling_program(g: &GameSpec) -> Result<LinearProgram> {
    ensure_valid(g)?;
    let c = welfare_coefficients(&g.tables_exact()?).to_vec();
    let mut a = Vec::with_capacity(12);
    let mut b = Vec::with_capacity(12);
    for k in 0..4 {
        a.push(
            (0..16)
                .map(|j| {
                    if j / 4 == k {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect(),
        );
        b.push(BigRational::one());
    }
    for ([l0, l1], [r0, r1]) in NO_SIGNALING {
        let mut row = vec![BigRational::zero(); 16];
        row[l0] += BigRational::one();
        row[l1] += BigRational::one();
        row[r0] -= BigRational::one();
        row[r1] -= BigRational::one();
        a.push(row);
        b.push(BigRational::zero());
    }
    Ok(LinearProgram { a, b, c })
}

pub fn no_signaling_social_optimum(g: &GameSpec) -> Result<OptimizationResult> {
    let start = Instant::now();
    let lp = no_signaling_program(g)?;
    let sol = match solve(&lp)? {
        LpOutcome::Optimal(s) => s,
        // The polytope contains the uniform table and lies in [0,1]^16.
        other => return Err(Error::Lp(format!("unexpected outcome {other:?}"))),
    };
    let eps: [BigRational; 16] = sol.x.clone().try_into().expect("16 variables");
    let table = JointDistribution::from_exact(&eps)?;
    Ok(OptimizationResult {
        value: rational_to_f64(&sol.value),
        argmax: Argmax::Distribution(table),
        method: Method::Lp,
        ties: vec![Argmax::Distribution(table)],
        audit: Audit {
            evaluations: sol.pivots as u64,
            wall_time: start.elapsed(),
            ..Audit::default()
        },
        exact: Some(ExactCertificate {
            value: format_rational(&sol.value),
            eps: eps.iter().map(format_rational).collect(),
            constraints_hold: satisfies_exactly(&eps),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::paper_game;
    use crate::scalar::Scalar;

    #[test]
    fn preset_reaches_the_algebraic_maximum() {
        let r = no_signaling_social_optimum(&paper_game()).unwrap();
        let cert = r.exact.unwrap();
        assert_eq!(cert.value, "4");
        assert!(cert.constraints_hold);
        assert_eq!(r.value, 4.0);
    }

    #[test]
    fn zero_and_negated_games() {
        let zero = paper_game().map_payoffs(|_| Scalar::int(0));
        assert_eq!(no_signaling_social_optimum(&zero).unwrap().value, 0.0);
        let neg = paper_game().map_payoffs(Scalar::neg);
        let r = no_signaling_social_optimum(&neg).unwrap();
        assert_eq!(r.exact.unwrap().value, "0");
    }

    #[test]
    fn program_shape() {
        let lp = no_signaling_program(&paper_game()).unwrap();
        assert_eq!(lp.a.len(), 12);
        assert!(lp.a.iter().all(|r| r.len() == 16));
    }
}
