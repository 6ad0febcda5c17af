//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or failed evaluation, 2 when
//! `verify` finds discrepant claims, 64 for unparseable arguments.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bell::chsh_report;
use crate::distribution::{
    from_strategy, BehavioralStrategy, JointDistribution, NoSignalingSampler,
};
use crate::error::{Error, Result};
use crate::game::{normal_form, paper_game, GameSpec};
use crate::optimize::{
    classical_social_optimum_with_grid, no_signaling_social_optimum, verify_report_with,
    AngleSearch, OptimizationResult, DEFAULT_GRID,
};
use crate::payoffs::{payoffs_from_distribution, payoffs_from_strategy, PayoffProfile};
use crate::quantum::{bell_state, epr_distribution, MeasurementSettings, QuantumState};
use crate::scalar::Scalar;
use crate::FEASIBILITY_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_DISCREPANT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "qbgame",
    version,
    about = "Social welfare of a Bayesian game under classical, quantum and no-signaling correlations"
)]
pub struct Cli {
    /// Output encoding; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Tolerance for feasibility checks and regime classification.
    #[arg(long, global = true, default_value_t = FEASIBILITY_TOL)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    Classical,
    Quantum,
    NoSignaling,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the 4x4 normal form.
    Table2 {
        #[arg(long)]
        game: Option<PathBuf>,
    },
    /// Type payoffs and welfare for a strategy, table or quantum setup.
    Payoffs {
        #[arg(long)]
        game: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
    },
    /// Correlations, CHSH value and regime of a joint table.
    Chsh {
        #[command(flatten)]
        source: Source,
    },
    /// Maximize welfare in one regime.
    Optimize {
        #[arg(long, value_enum)]
        regime: Regime,
        #[arg(long)]
        game: Option<PathBuf>,
        /// "bell" or 8 comma-separated numbers (real/imag interleaved).
        #[arg(long, default_value = "bell")]
        state: String,
        /// Grid divisions per coordinate (classical, default 64) or grid
        /// points per angle (quantum, default 24).
        #[arg(long)]
        grid: Option<usize>,
        /// Also write the JSON result to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Recompute every published number and report discrepancies.
    Verify {
        #[arg(long)]
        game: Option<PathBuf>,
        /// Random samples per sampled check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Also write the JSON report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Draw uniform no-signaling tables.
    Sample {
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Debug, Args)]
pub struct Source {
    /// p,q,p',q' (probabilities of the first action).
    #[arg(long, conflicts_with_all = ["distribution", "angles"])]
    pub strategy: Option<String>,
    /// JSON file with {"eps": [16 numbers]}.
    #[arg(long, conflicts_with = "angles")]
    pub distribution: Option<PathBuf>,
    /// Four comma-separated angles for D1, D2, D1', D2'.
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Read --angles in degrees instead of radians.
    #[arg(long, requires = "angles")]
    pub degrees: bool,
    /// "bell" or 8 comma-separated numbers; used with --angles.
    #[arg(long, default_value = "bell", requires = "angles")]
    pub state: String,
}

fn parse_list(text: &str, len: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.parse::<Scalar>().map(|x| x.to_f64()))
        .collect::<Result<_>>()?;
    if v.len() != len {
        return Err(Error::Parse(format!(
            "{what} needs {len} comma-separated numbers, got {}",
            v.len()
        )));
    }
    Ok(v)
}

pub fn parse_strategy(text: &str) -> Result<BehavioralStrategy> {
    let v = parse_list(text, 4, "strategy")?;
    BehavioralStrategy::from_array([v[0], v[1], v[2], v[3]])
}

pub fn parse_state(text: &str) -> Result<QuantumState> {
    if text.trim().eq_ignore_ascii_case("bell") {
        return Ok(bell_state());
    }
    QuantumState::from_interleaved(&parse_list(text, 8, "state")?)
}

pub fn parse_angles(text: &str, degrees: bool) -> Result<MeasurementSettings> {
    let v = parse_list(text, 4, "angles")?;
    let a = [v[0], v[1], v[2], v[3]];
    if degrees {
        MeasurementSettings::from_degrees(a)
    } else {
        MeasurementSettings::from_array(a)
    }
}

fn load_game(path: &Option<PathBuf>) -> Result<GameSpec> {
    match path {
        Some(p) => GameSpec::load(p),
        None => Ok(paper_game()),
    }
}

enum Resolved {
    Strategy(BehavioralStrategy),
    Table(JointDistribution),
}

fn resolve(src: &Source) -> Result<Resolved> {
    if let Some(s) = &src.strategy {
        return Ok(Resolved::Strategy(parse_strategy(s)?));
    }
    if let Some(p) = &src.distribution {
        return Ok(Resolved::Table(JointDistribution::load(p)?));
    }
    if let Some(a) = &src.angles {
        let m = parse_angles(a, src.degrees)?;
        let psi = parse_state(&src.state)?;
        return Ok(Resolved::Table(epr_distribution(&psi, &m)?));
    }
    Err(Error::Parse(
        "one of --strategy, --distribution or --angles is required".into(),
    ))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn payoffs_csv(p: &PayoffProfile) -> String {
    format!(
        "pi_A1,pi_A2,pi_B1,pi_B2,sum\n{},{},{},{},{}\n",
        p.pi_a1, p.pi_a2, p.pi_b1, p.pi_b2, p.sum
    )
}

fn eps_csv_header() -> String {
    (1..=16)
        .map(|k| format!("eps{k}"))
        .collect::<Vec<_>>()
        .join(",")
        + "\n"
}

fn eps_csv_row(d: &JointDistribution) -> String {
    d.eps()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
        + "\n"
}

fn optimization_pretty(r: &OptimizationResult) -> String {
    let mut s = format!(
        "method: {}\nvalue: {}\n",
        serde_json::to_string(&r.method)
            .unwrap_or_default()
            .trim_matches('"'),
        r.value
    );
    s.push_str(&format!(
        "argmax: {}\n",
        serde_json::to_string(&r.argmax).unwrap_or_default()
    ));
    s.push_str(&format!(
        "ties: {}\nevaluations: {}\n",
        r.ties.len(),
        r.audit.evaluations
    ));
    if let Some(c) = &r.exact {
        s.push_str(&format!(
            "exact value: {}\nexact table: [{}]\n",
            c.value,
            c.eps.join(", ")
        ));
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

/// Runs one command and returns the text to print plus the exit code.
fn execute(cli: &Cli) -> Result<(String, i32)> {
    let tol = cli.tol;
    match &cli.command {
        Command::Table2 { game } => {
            let nf = normal_form(&load_game(game)?)?;
            let text = match cli.format.unwrap_or(Format::Pretty) {
                Format::Pretty => nf.to_string(),
                Format::Json => to_json(&nf)?,
                Format::Csv => nf.to_csv(),
            };
            Ok((text, EXIT_OK))
        }
        Command::Payoffs { game, source } => {
            let g = load_game(game)?;
            let p = match resolve(source)? {
                Resolved::Strategy(s) => payoffs_from_strategy(&g, &s)?,
                Resolved::Table(d) => payoffs_from_distribution(&g, &d)?,
            };
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&p)?,
                Format::Csv => payoffs_csv(&p),
                Format::Pretty => format!(
                    "pi_A1 = {}\npi_A2 = {}\npi_B1 = {}\npi_B2 = {}\nsum   = {}\n",
                    p.pi_a1, p.pi_a2, p.pi_b1, p.pi_b2, p.sum
                ),
            };
            Ok((text, EXIT_OK))
        }
        Command::Chsh { source } => {
            let d = match resolve(source)? {
                Resolved::Strategy(s) => from_strategy(&s),
                Resolved::Table(d) => d,
            };
            let r = chsh_report(&d, tol)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&r)?,
                Format::Csv => format!(
                    "corr11,corr12,corr21,corr22,delta,regime\n{},{},{},{},{},{}\n",
                    r.corr_11, r.corr_12, r.corr_21, r.corr_22, r.delta, r.regime
                ),
                Format::Pretty => format!(
                    "<D1D1'> = {}\n<D1D2'> = {}\n<D2D1'> = {}\n<D2D2'> = {}\ndelta   = {}\nregime  = {}\n",
                    r.corr_11, r.corr_12, r.corr_21, r.corr_22, r.delta, r.regime
                ),
            };
            Ok((text, EXIT_OK))
        }
        Command::Optimize {
            regime,
            game,
            state,
            grid,
            json,
        } => {
            let g = load_game(game)?;
            let r = match regime {
                Regime::Classical => {
                    classical_social_optimum_with_grid(&g, grid.unwrap_or(DEFAULT_GRID))?
                }
                Regime::Quantum => {
                    let search = AngleSearch {
                        grid: grid.unwrap_or(24),
                        ..AngleSearch::default()
                    };
                    search.run(&g, &parse_state(state)?)?
                }
                Regime::NoSignaling => no_signaling_social_optimum(&g)?,
            };
            let js = to_json(&r)?;
            if let Some(path) = json {
                write_file(path, &js)?;
            }
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => js,
                Format::Csv => format!(
                    "value,method,evaluations,ties\n{},{},{},{}\n",
                    r.value,
                    serde_json::to_string(&r.method)?.trim_matches('"'),
                    r.audit.evaluations,
                    r.ties.len()
                ),
                Format::Pretty => optimization_pretty(&r),
            };
            Ok((text, EXIT_OK))
        }
        Command::Verify {
            game,
            samples,
            json,
        } => {
            let report = verify_report_with(&load_game(game)?, cli.seed, *samples)?;
            let js = to_json(&report)?;
            if let Some(path) = json {
                write_file(path, &js)?;
            }
            let text = match cli.format.unwrap_or(Format::Pretty) {
                Format::Json => js,
                Format::Pretty => report.to_string(),
                Format::Csv => {
                    let mut s = String::from("id,status,published,computed\n");
                    for c in &report.claims {
                        s.push_str(&format!(
                            "{},{},\"{}\",\"{}\"\n",
                            c.id, c.status, c.published, c.computed
                        ));
                    }
                    s
                }
            };
            let code = if report.has_discrepancies() {
                EXIT_DISCREPANT
            } else {
                EXIT_OK
            };
            Ok((text, code))
        }
        Command::Sample { count } => {
            let mut sampler = NoSignalingSampler::new(cli.seed);
            let tables: Vec<JointDistribution> = (0..*count)
                .map(|_| sampler.next_table())
                .collect::<Result<_>>()?;
            let text = match cli.format.unwrap_or(Format::Json) {
                // One {"eps": [...]} object per line; a single line is a valid distribution file.
                Format::Json => tables
                    .iter()
                    .map(|d| d.to_json().map(|s| s + "\n"))
                    .collect::<Result<String>>()?,
                Format::Csv => {
                    eps_csv_header() + &tables.iter().map(eps_csv_row).collect::<String>()
                }
                Format::Pretty => tables
                    .iter()
                    .map(|d| {
                        (0..4)
                            .map(|k| format!("{:?}", d.block(k)))
                            .collect::<Vec<_>>()
                            .join(" | ")
                            + "\n"
                    })
                    .collect(),
            };
            Ok((text, EXIT_OK))
        }
    }
}

/// Parses `argv` (including the program name), runs, and writes to the
/// given streams.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}
