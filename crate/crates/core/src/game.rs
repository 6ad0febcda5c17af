//! Bayesian game structure: priors over type profiles and one bimatrix per
//! type profile.
//!
//! Types and actions are 0-based throughout: Alice's type `a` and Bob's type
//! `b` index `blocks[a][b]`, and action `0` is the first action ("B" in the
//! preset), action `1` the second ("S").

use std::fmt;
use std::path::Path;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, Scalar};
use crate::FEASIBILITY_TOL;

pub type Matrix2 = [[Scalar; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffBlock {
    /// Rows are Alice's action, columns Bob's action.
    pub alice: Matrix2,
    pub bob: Matrix2,
}

impl PayoffBlock {
    pub fn symmetric(m: [[i64; 2]; 2]) -> Self {
        let to = |m: [[i64; 2]; 2]| m.map(|row| row.map(Scalar::int));
        PayoffBlock {
            alice: to(m),
            bob: to(m),
        }
    }

    fn entries(&self) -> impl Iterator<Item = (&'static str, usize, usize, &Scalar)> {
        let alice = self
            .alice
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().enumerate().map(move |(y, v)| ("alice", x, y, v)));
        let bob = self
            .bob
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().enumerate().map(move |(y, v)| ("bob", x, y, v)));
        alice.chain(bob)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    /// `prior[a][b]` is the probability of Alice having type `a` and Bob type `b`.
    pub prior: Matrix2,
    /// `blocks[a][b]` is the bimatrix played when the type profile is `(a, b)`.
    pub blocks: [[PayoffBlock; 2]; 2],
    pub actions: [String; 2],
}

/// Conditional weights and payoff entries in a single numeric type, ready
/// for evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffTables<T> {
    /// `alice_weight[a][b]` = P(Bob type b | Alice type a).
    pub alice_weight: [[T; 2]; 2],
    /// `bob_weight[a][b]` = P(Alice type a | Bob type b).
    pub bob_weight: [[T; 2]; 2],
    /// `alice[a][b][x][y]`: Alice's payoff in block (a, b) for actions (x, y).
    pub alice: [[[[T; 2]; 2]; 2]; 2],
    pub bob: [[[[T; 2]; 2]; 2]; 2],
}

impl GameSpec {
    /// Uniform prior, the supplied blocks, actions "B"/"S".
    pub fn with_blocks(blocks: [[PayoffBlock; 2]; 2]) -> Self {
        let q = Scalar::ratio(1, 4);
        GameSpec {
            prior: [[q.clone(), q.clone()], [q.clone(), q]],
            blocks,
            actions: ["B".to_string(), "S".to_string()],
        }
    }

    /// Every payoff entry replaced by `f(entry)`.
    pub fn map_payoffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut g = self.clone();
        for row in g.blocks.iter_mut() {
            for block in row.iter_mut() {
                for m in [&mut block.alice, &mut block.bob] {
                    for r in m.iter_mut() {
                        for v in r.iter_mut() {
                            *v = f(v);
                        }
                    }
                }
            }
        }
        g
    }

    pub fn tables_f64(&self) -> PayoffTables<f64> {
        let prior = self.prior.clone().map(|r| r.map(|v| v.to_f64()));
        let alice_weight = std::array::from_fn(|a| {
            let m = prior[a][0] + prior[a][1];
            std::array::from_fn(|b| if m > 0.0 { prior[a][b] / m } else { 0.0 })
        });
        let bob_weight = std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let m = prior[0][b] + prior[1][b];
                if m > 0.0 {
                    prior[a][b] / m
                } else {
                    0.0
                }
            })
        });
        let pick = |alice: bool| {
            std::array::from_fn(|a| {
                std::array::from_fn(|b| {
                    let blk = &self.blocks[a][b];
                    let m = if alice { &blk.alice } else { &blk.bob };
                    std::array::from_fn(|x| std::array::from_fn(|y| m[x][y].to_f64()))
                })
            })
        };
        PayoffTables {
            alice_weight,
            bob_weight,
            alice: pick(true),
            bob: pick(false),
        }
    }

    /// Exact tables; fails if any entry is non-finite.
    pub fn tables_exact(&self) -> Result<PayoffTables<BigRational>> {
        let exact = |s: &Scalar, what: &str| {
            s.to_exact()
                .ok_or_else(|| Error::InvalidGame(format!("non-finite {what}")))
        };
        let mut prior: [[BigRational; 2]; 2] = Default::default();
        for a in 0..2 {
            for b in 0..2 {
                prior[a][b] = exact(&self.prior[a][b], "prior")?;
            }
        }
        let mut alice: [[[[BigRational; 2]; 2]; 2]; 2] = Default::default();
        let mut bob: [[[[BigRational; 2]; 2]; 2]; 2] = Default::default();
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        alice[a][b][x][y] = exact(&self.blocks[a][b].alice[x][y], "payoff")?;
                        bob[a][b][x][y] = exact(&self.blocks[a][b].bob[x][y], "payoff")?;
                    }
                }
            }
        }
        let cond = |num: &BigRational, den: BigRational| {
            if den.is_zero() {
                BigRational::zero()
            } else {
                num / den
            }
        };
        let alice_weight = std::array::from_fn(|a| {
            std::array::from_fn(|b| cond(&prior[a][b], &prior[a][0] + &prior[a][1]))
        });
        let bob_weight = std::array::from_fn(|a| {
            std::array::from_fn(|b| cond(&prior[a][b], &prior[0][b] + &prior[1][b]))
        });
        Ok(PayoffTables {
            alice_weight,
            bob_weight,
            alice,
            bob,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GameFile = serde_json::from_str(text)?;
        Ok(file.into())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&GameFile::from(self))?)
    }
}

/// On-disk game format.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub prior: Matrix2,
    pub blocks: BlockFile,
    #[serde(default = "default_actions")]
    pub actions: [String; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockFile {
    #[serde(rename = "A1B1")]
    pub a1b1: PayoffBlock,
    #[serde(rename = "A1B2")]
    pub a1b2: PayoffBlock,
    #[serde(rename = "A2B1")]
    pub a2b1: PayoffBlock,
    #[serde(rename = "A2B2")]
    pub a2b2: PayoffBlock,
}

fn default_actions() -> [String; 2] {
    ["B".to_string(), "S".to_string()]
}

impl From<GameFile> for GameSpec {
    fn from(f: GameFile) -> Self {
        let BlockFile {
            a1b1,
            a1b2,
            a2b1,
            a2b2,
        } = f.blocks;
        GameSpec {
            prior: f.prior,
            blocks: [[a1b1, a1b2], [a2b1, a2b2]],
            actions: f.actions,
        }
    }
}

impl From<&GameSpec> for GameFile {
    fn from(g: &GameSpec) -> Self {
        let [[a1b1, a1b2], [a2b1, a2b2]] = g.blocks.clone();
        GameFile {
            prior: g.prior.clone(),
            blocks: BlockFile {
                a1b1,
                a1b2,
                a2b1,
                a2b2,
            },
            actions: g.actions.clone(),
        }
    }
}

/// The preset game: three coordination blocks and an anti-coordination
/// block when both players have type 2, each type profile with prior 1/4.
pub fn paper_game() -> GameSpec {
    let coordinate = PayoffBlock::symmetric([[1, 0], [0, 1]]);
    let anti = PayoffBlock::symmetric([[0, 1], [1, 0]]);
    GameSpec::with_blocks([[coordinate.clone(), coordinate.clone()], [coordinate, anti]])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    PriorNotNormalized,
    PriorOutOfRange,
    NonFinitePrior,
    NonFinitePayoff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// One diagnostic per violated invariant; empty means the game is valid.
pub fn validate(g: &GameSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |kind, message: String| out.push(Diagnostic { kind, message });

    let mut sum = 0.0;
    let mut prior_finite = true;
    for a in 0..2 {
        for b in 0..2 {
            let p = &g.prior[a][b];
            if !p.is_finite() {
                prior_finite = false;
                push(
                    DiagnosticKind::NonFinitePrior,
                    format!("non-finite prior at A{}B{}", a + 1, b + 1),
                );
                continue;
            }
            let v = p.to_f64();
            if !(-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&v) {
                push(
                    DiagnosticKind::PriorOutOfRange,
                    format!("prior entry A{}B{} = {p} outside [0,1]", a + 1, b + 1),
                );
            }
            sum += v;
        }
    }
    if prior_finite && (sum - 1.0).abs() > FEASIBILITY_TOL {
        push(
            DiagnosticKind::PriorNotNormalized,
            format!("prior not normalized (sum {sum})"),
        );
    }

    for a in 0..2 {
        for b in 0..2 {
            for (who, x, y, v) in g.blocks[a][b].entries() {
                if !v.is_finite() {
                    push(
                        DiagnosticKind::NonFinitePayoff,
                        format!("non-finite payoff in A{}B{} {who}[{x}][{y}]", a + 1, b + 1),
                    );
                }
            }
        }
    }
    out
}

pub(crate) fn ensure_valid(g: &GameSpec) -> Result<()> {
    let diags = validate(g);
    if diags.is_empty() {
        Ok(())
    } else {
        let msgs: Vec<String> = diags.iter().map(|d| d.message.clone()).collect();
        Err(Error::InvalidGame(msgs.join("; ")))
    }
}

/// Payoffs of one normal-form cell: each player's two type-conditional payoffs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub alice: [Scalar; 2],
    pub bob: [Scalar; 2],
}

impl Cell {
    pub fn exact(&self) -> [BigRational; 4] {
        let get = |s: &Scalar| s.to_exact().expect("normal form cells are exact");
        [
            get(&self.alice[0]),
            get(&self.alice[1]),
            get(&self.bob[0]),
            get(&self.bob[1]),
        ]
    }

    pub fn sum(&self) -> BigRational {
        self.exact()
            .into_iter()
            .fold(BigRational::zero(), |acc, v| acc + v)
    }
}

/// 4×4 normal form. Row `i` is Alice's pure pair (type-1 action `i >> 1`,
/// type-2 action `i & 1`); columns likewise for Bob.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalForm {
    pub labels: [String; 4],
    pub cells: Vec<Vec<Cell>>,
}

/// Pure-strategy pair encoded by a row/column index.
pub fn pure_pair(index: usize) -> [usize; 2] {
    [index >> 1, index & 1]
}

pub fn normal_form(g: &GameSpec) -> Result<NormalForm> {
    ensure_valid(g)?;
    let t = g.tables_exact()?;
    let labels = std::array::from_fn(|i| {
        let [x1, x2] = pure_pair(i);
        format!("({},{})", g.actions[x1], g.actions[x2])
    });
    let cells = (0..4)
        .map(|i| {
            let xs = pure_pair(i);
            (0..4)
                .map(|j| {
                    let ys = pure_pair(j);
                    let alice = std::array::from_fn(|a| {
                        let v = (0..2).fold(BigRational::zero(), |acc, b| {
                            acc + &t.alice_weight[a][b] * &t.alice[a][b][xs[a]][ys[b]]
                        });
                        Scalar::Exact(v)
                    });
                    let bob = std::array::from_fn(|b| {
                        let v = (0..2).fold(BigRational::zero(), |acc, a| {
                            acc + &t.bob_weight[a][b] * &t.bob[a][b][xs[a]][ys[b]]
                        });
                        Scalar::Exact(v)
                    });
                    Cell { alice, bob }
                })
                .collect()
        })
        .collect();
    Ok(NormalForm { labels, cells })
}

fn fmt_exact(s: &Scalar) -> String {
    match s.to_exact() {
        Some(r) => format_rational(&r),
        None => s.to_string(),
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{}),({},{})",
            fmt_exact(&self.alice[0]),
            fmt_exact(&self.alice[1]),
            fmt_exact(&self.bob[0]),
            fmt_exact(&self.bob[1])
        )
    }
}

impl fmt::Display for NormalForm {
    /// Aligned grid: Alice's pure pairs down the side, Bob's across the top.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<Vec<String>> = self
            .cells
            .iter()
            .map(|row| row.iter().map(|c| c.to_string()).collect())
            .collect();
        let label_w = self.labels.iter().map(|l| l.len()).max().unwrap_or(0);
        let widths: Vec<usize> = (0..4)
            .map(|j| {
                text.iter()
                    .map(|r| r[j].len())
                    .chain([self.labels[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut line = format!("{:label_w$}", "");
        for (j, l) in self.labels.iter().enumerate() {
            line.push_str(&format!("  {:<w$}", l, w = widths[j]));
        }
        writeln!(f, "{}", line.trim_end())?;
        for (i, row) in text.iter().enumerate() {
            let mut line = format!("{:<label_w$}", self.labels[i]);
            for (j, c) in row.iter().enumerate() {
                line.push_str(&format!("  {:<w$}", c, w = widths[j]));
            }
            writeln!(f, "{}", line.trim_end())?;
        }
        Ok(())
    }
}

impl NormalForm {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alice,bob,pi_A1,pi_A2,pi_B1,pi_B2\n");
        for (i, row) in self.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out.push_str(&format!(
                    "\"{}\",\"{}\",{},{},{},{}\n",
                    self.labels[i],
                    self.labels[j],
                    fmt_exact(&c.alice[0]),
                    fmt_exact(&c.alice[1]),
                    fmt_exact(&c.bob[0]),
                    fmt_exact(&c.bob[1])
                ));
            }
        }
        out
    }

    /// Largest cell welfare (sum of the four type payoffs).
    pub fn max_cell_welfare(&self) -> BigRational {
        self.cells
            .iter()
            .flatten()
            .map(Cell::sum)
            .max()
            .unwrap_or_else(BigRational::one)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn preset_matches_the_printed_blocks() {
        let g = paper_game();
        let id = [
            [Scalar::int(1), Scalar::int(0)],
            [Scalar::int(0), Scalar::int(1)],
        ];
        let anti = [
            [Scalar::int(0), Scalar::int(1)],
            [Scalar::int(1), Scalar::int(0)],
        ];
        assert_eq!(g.blocks[1][0].alice, id);
        assert_eq!(g.blocks[1][0].bob, id);
        assert_eq!(g.blocks[1][1].alice, anti);
        assert_eq!(g.prior[0][0], r(1, 4));
        assert!(validate(&g).is_empty());
    }

    #[test]
    fn conditional_weights_are_one_half() {
        let t = paper_game().tables_exact().unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(t.alice_weight[a][b], crate::scalar::half());
                assert_eq!(t.bob_weight[a][b], crate::scalar::half());
            }
        }
    }

    #[test]
    fn worked_cell_from_the_text() {
        let nf = normal_form(&paper_game()).unwrap();
        // Alice (S,B) = row 2, Bob (B,S) = column 1.
        let c = &nf.cells[2][1];
        assert_eq!(c.alice, [r(1, 2), r(1, 1)]);
        assert_eq!(c.bob, [r(1, 2), r(1, 1)]);
        assert_eq!(nf.cells[0][0].to_string(), "(1,1/2),(1,1/2)");
    }

    #[test]
    fn zero_game_has_zero_cells() {
        let g = paper_game().map_payoffs(|_| Scalar::int(0));
        let nf = normal_form(&g).unwrap();
        for c in nf.cells.iter().flatten() {
            assert_eq!(c.to_string(), "(0,0),(0,0)");
        }
    }

    #[test]
    fn diagnostics_name_each_violation() {
        let mut g = paper_game();
        g.prior = g.prior.map(|row| row.map(|v| v.scale(2)));
        let d = validate(&g);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("prior not normalized"));

        let mut g = paper_game();
        g.blocks[0][1].bob[1][0] = Scalar::Real(f64::NAN);
        let d = validate(&g);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("non-finite payoff"));
        assert!(normal_form(&g).is_err());

        let mut g = paper_game();
        g.prior[0][0] = Scalar::ratio(-1, 4);
        g.prior[0][1] = Scalar::ratio(3, 4);
        let kinds: Vec<_> = validate(&g).into_iter().map(|d| d.kind).collect();
        assert_eq!(kinds, vec![DiagnosticKind::PriorOutOfRange]);
    }

    #[test]
    fn file_format_round_trip() {
        let g = paper_game();
        let text = g.to_json().unwrap();
        assert!(text.contains("\"A2B2\""));
        assert_eq!(GameSpec::from_json(&text).unwrap(), g);
        let bad = text.replace("\"actions\"", "\"acts\"");
        assert!(GameSpec::from_json(&bad).is_err());
    }

    #[test]
    fn zero_marginal_type_gets_zero_weight() {
        let mut g = paper_game();
        g.prior = [[r(1, 2), r(1, 2)], [r(0, 1), r(0, 1)]];
        let t = g.tables_exact().unwrap();
        assert!(t.alice_weight[1][0].is_zero());
        assert_eq!(t.bob_weight[0][0], BigRational::one());
    }
}
