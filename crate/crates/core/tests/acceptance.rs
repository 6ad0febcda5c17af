//! The nine headline checks, run in sequence so the timings are not skewed by
//! other tests. Each prints one PASS/FAIL line to stderr (uncaptured).

mod common;

use std::f64::consts::SQRT_2;
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random_strategy;
use qbgame::distribution::{complete, complete_exact, satisfies_exactly, INDEPENDENT};
use qbgame::optimize::{
    classical_social_optimum_with_grid, no_signaling_social_optimum, quantum_social_optimum,
    verify_report, Argmax, ClaimStatus,
};
use qbgame::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(
        elapsed < limit,
        format!("took {elapsed:?}, limit {limit:?}"),
    )
}

fn table2_exact() -> Check {
    const PUBLISHED: [[&str; 4]; 4] = [
        [
            "(1,1/2),(1,1/2)",
            "(1/2,1),(1,1/2)",
            "(1/2,0),(0,1/2)",
            "(0,1/2),(0,1/2)",
        ],
        [
            "(1,1/2),(1/2,1)",
            "(1/2,0),(1/2,0)",
            "(1/2,1),(1/2,1)",
            "(0,1/2),(1/2,0)",
        ],
        [
            "(0,1/2),(1/2,0)",
            "(1/2,1),(1/2,1)",
            "(1/2,0),(1/2,0)",
            "(1,1/2),(1/2,1)",
        ],
        [
            "(0,1/2),(0,1/2)",
            "(1/2,0),(0,1/2)",
            "(1/2,1),(1,1/2)",
            "(1,1/2),(1,1/2)",
        ],
    ];
    let g = paper_game();
    let start = Instant::now();
    let nf = normal_form(&g).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for (i, row) in PUBLISHED.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got = nf.cells[i][j].to_string();
            ensure(got == *want, format!("cell ({i},{j}): {got} vs {want}"))?;
        }
    }
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("16/16 cells exact in {elapsed:?}"))
}

fn edge_values() -> Check {
    let g = paper_game();
    let w = qbgame::optimize::MultilinearWelfare::from_game(&g).map_err(|e| e.to_string())?;
    let int = |n: i64| BigRational::from_integer(n.into());
    let zero = w.value_exact(&[int(0), int(0), int(0), int(0)]);
    let one = w.value_exact(&[int(1), int(1), int(1), int(1)]);
    ensure(zero == int(3), format!("welfare at (0,0;0,0) = {zero}"))?;
    ensure(one == int(3), format!("welfare at (1,1;1,1) = {one}"))?;
    let cell = normal_form(&g).map_err(|e| e.to_string())?.cells[0][0].sum();
    ensure(cell == int(3), format!("(B,B),(B,B) cell sums to {cell}"))?;
    let report = verify_report(&g).map_err(|e| e.to_string())?;
    let claim = report.find("edge-1111").ok_or("no edge-1111 claim")?;
    ensure(
        claim.status == ClaimStatus::Discrepant,
        "edge-1111 not flagged",
    )?;
    ensure(
        claim.published == "4" && claim.computed == "3",
        "edge-1111 values",
    )?;
    ensure(
        claim.note.contains("(B,B)x(B,B) sums to 3"),
        "edge-1111 note",
    )?;
    ensure(
        report
            .find("edge-0000")
            .is_some_and(|c| c.status == ClaimStatus::Reproduced),
        "edge-0000",
    )?;
    Ok("(0,0;0,0) = 3, (1,1;1,1) = 3 flagged against published 4".into())
}

fn welfare_identity() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut sampler = NoSignalingSampler::new(0);
    for _ in 0..10_000 {
        let d = sampler.next_table().map_err(|e| e.to_string())?;
        worst = worst.max(
            welfare_delta_identity(&d, 1e-9)
                .map_err(|e| e.to_string())?
                .abs(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..10_000 {
        let s =
            BehavioralStrategy::from_array(random_strategy(&mut rng)).map_err(|e| e.to_string())?;
        worst = worst.max(
            welfare_delta_identity(&from_strategy(&s), 1e-9)
                .map_err(|e| e.to_string())?
                .abs(),
        );
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-12, format!("max residual {worst:e}"))?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "max |welfare - (Δ/2 + 2)| = {worst:e} over 2·10^4 tables in {elapsed:?}"
    ))
}

fn reduction() -> Check {
    let g = paper_game();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let s =
            BehavioralStrategy::from_array(random_strategy(&mut rng)).map_err(|e| e.to_string())?;
        let a = payoffs_from_strategy(&g, &s)
            .map_err(|e| e.to_string())?
            .to_array();
        let b = payoffs_from_distribution(&g, &from_strategy(&s))
            .map_err(|e| e.to_string())?
            .to_array();
        for k in 0..4 {
            worst = worst.max((a[k] - b[k]).abs());
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-12, format!("max difference {worst:e}"))?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "max componentwise difference {worst:e} over 10^5 strategies in {elapsed:?}"
    ))
}

fn local_bound() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let s =
            BehavioralStrategy::from_array(random_strategy(&mut rng)).map_err(|e| e.to_string())?;
        worst = worst.max(
            chsh_delta(&from_strategy(&s))
                .map_err(|e| e.to_string())?
                .abs(),
        );
    }
    ensure(worst <= 2.0 + 1e-12, format!("|Δ| reached {worst}"))?;
    for mask in 0..16 {
        let s: [f64; 4] = std::array::from_fn(|i| (mask >> i & 1) as f64);
        let table = from_strategy(&BehavioralStrategy::from_array(s).map_err(|e| e.to_string())?)
            .to_exact();
        let c: Vec<BigRational> = (0..4)
            .map(|k| &table[4 * k] - &table[4 * k + 1] - &table[4 * k + 2] + &table[4 * k + 3])
            .collect();
        let delta = &c[0] + &c[1] + &c[2] - &c[3];
        let two = BigRational::from_integer(2.into());
        ensure(
            delta <= two && delta >= -two,
            format!("vertex {s:?}: Δ = {delta}"),
        )?;
    }
    let start = Instant::now();
    let r = classical_social_optimum_with_grid(&paper_game(), 64).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let grid_max = r.audit.grid_max.ok_or("grid skipped")?;
    ensure(r.value == 3.0, format!("vertex optimum {}", r.value))?;
    ensure(grid_max <= 3.0 + 1e-9, format!("grid max {grid_max}"))?;
    ensure(r.audit.evaluations == 16 + 65u64.pow(4), "grid size")?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "max |Δ| {worst:.6} on 10^5 strategies; optimum 3, 65^4 grid max {grid_max} in {elapsed:?}"
    ))
}

fn quantum_optimum() -> Check {
    let target = 2.0 + SQRT_2;
    let start = Instant::now();
    let r = quantum_social_optimum(&paper_game(), &bell_state()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        r.value >= target - 1e-6,
        format!("value {} below 2+√2", r.value),
    )?;
    ensure(
        r.value <= target + 1e-9,
        format!("value {} above 2+√2", r.value),
    )?;
    let Argmax::Settings(m) = r.argmax else {
        return Err("argmax is not a setting".into());
    };
    let delta = chsh_delta(&epr_distribution(&bell_state(), &m).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(
        (delta - 2.0 * SQRT_2).abs() <= 1e-6,
        format!("Δ at optimizer {delta}"),
    )?;
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "welfare {:.12}, Δ {:.12} in {elapsed:?}",
        r.value, delta
    ))
}

fn completion() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let mut accepted = 0;
    let mut drawn = 0u64;
    while accepted < 10_000 {
        drawn += 1;
        // Multiples of 1/4096: the float completion is exact, so it screens
        // candidates cheaply and only accepted draws pay for rationals.
        let k: [i64; 8] = std::array::from_fn(|_| rng.random_range(0..=4096i64));
        if !complete(&k.map(|v| v as f64 / 4096.0))
            .iter()
            .all(|v| (0.0..=1.0).contains(v))
        {
            continue;
        }
        accepted += 1;
        let mu: [BigRational; 8] = k.map(|v| BigRational::new(BigInt::from(v), BigInt::from(4096)));
        let eps = complete_exact(&mu).map_err(|e| e.to_string())?;
        ensure(
            satisfies_exactly(&eps),
            format!("constraints fail for {mu:?}"),
        )?;
        for (k, &pos) in INDEPENDENT.iter().enumerate() {
            ensure(eps[pos] == mu[k], "μ extraction differs")?;
        }
        let float: [f64; 8] = std::array::from_fn(|k| qbgame::scalar::rational_to_f64(&mu[k]));
        let set = IndependentSet::new(float).map_err(|e| e.to_string())?;
        let d = complete_from_independent(&set, 1e-12).map_err(|e| e.to_string())?;
        ensure(d.independent().mu == float, "floating-point μ round trip")?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "10^4 exact completions ({drawn} draws) in {elapsed:?}"
    ))
}

fn no_signaling_lp() -> Check {
    let start = Instant::now();
    let r = no_signaling_social_optimum(&paper_game()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let cert = r.exact.ok_or("no certificate")?;
    ensure(cert.value == "4", format!("value {}", cert.value))?;
    let eps: Vec<BigRational> = cert
        .eps
        .iter()
        .map(|s| {
            s.parse::<Scalar>()
                .ok()
                .and_then(|v| v.to_exact())
                .ok_or("unparseable entry")
        })
        .collect::<Result<_, _>>()?;
    let eps: [BigRational; 16] = eps.try_into().map_err(|_| "certificate length")?;
    ensure(
        cert.constraints_hold && satisfies_exactly(&eps),
        "certificate violates a constraint",
    )?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "value 4, certificate [{}] in {elapsed:?}",
        cert.eps.join(", ")
    ))
}

fn discrepancy_ledger() -> Check {
    let g = paper_game();
    let a = verify_report(&g).map_err(|e| e.to_string())?;
    let b = verify_report(&g).map_err(|e| e.to_string())?;
    let mut ids = a.discrepant_ids();
    ids.sort_unstable();
    ensure(
        ids == ["closed-form-sum", "edge-1111", "stationary-point"],
        format!("discrepant {ids:?}"),
    )?;
    let others = a
        .claims
        .iter()
        .filter(|c| c.status != ClaimStatus::Discrepant);
    for c in others {
        ensure(
            c.status == ClaimStatus::Reproduced,
            format!("{} is {:?}", c.id, c.status),
        )?;
    }
    let json = |r| serde_json::to_string(r).map_err(|e| e.to_string());
    ensure(json(&a)? == json(&b)?, "reports differ between runs")?;
    Ok(format!("{} reproduced, discrepant {ids:?}", a.reproduced))
}

#[test]
fn primary_criteria() {
    let criteria: [Criterion; 9] = [
        ("1 table2 reproduction", table2_exact),
        ("2 edge values", edge_values),
        ("3 welfare-CHSH identity", welfare_identity),
        ("4 reduction to mixed strategies", reduction),
        ("5 local bound and classical optimum", local_bound),
        ("6 quantum optimum", quantum_optimum),
        ("7 completion from independent entries", completion),
        ("8 no-signaling LP", no_signaling_lp),
        ("9 discrepancy ledger", discrepancy_ledger),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => writeln!(err, "PASS  {name}: {detail}").unwrap(),
            Err(why) => {
                writeln!(err, "FAIL  {name}: {why}").unwrap();
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
