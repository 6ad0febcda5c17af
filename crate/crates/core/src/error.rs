use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution is not normalized (block sums {0:?})")]
    NotNormalized([f64; 4]),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible independent set: {}", .0.join(", "))]
    Infeasible(Vec<String>),

    #[error("state is not normalized (norm^2 = {0})")]
    StateNotNormalized(f64),

    #[error("invalid measurement settings: {0}")]
    InvalidSettings(String),

    #[error("no feasible sample after {0} attempts")]
    SamplingExhausted(u64),

    #[error("linear program: {0}")]
    Lp(String),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
