use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),
    #[error("parameter {theta:?} lies outside the model's parameter domain")]
    OutsideDomain { theta: Vec<f64> },
    #[error("invalid subjective model: {0}")]
    InvalidModel(String),
    #[error("every parameter value gives infinite divergence for player {player}")]
    InfeasibleModel { player: usize },
    #[error("invalid belief: {0}")]
    InvalidBelief(String),
    #[error("invalid perturbation structure: {0}")]
    InvalidPerturbation(String),
    #[error("observation (signal {signal}, action {action}) has zero likelihood under every atom{}", period.map(|t| format!(" at period {t}")).unwrap_or_default())]
    ImpossibleObservation {
        signal: usize,
        action: usize,
        period: Option<usize>,
    },
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("state left the domain: {0}")]
    Domain(String),
    #[error("bisection bracket does not change sign on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("missing analogy structure")]
    MissingStructure,
    #[error("missing argument: {0}")]
    MissingArgument(String),
    #[error("conditioning event has zero probability: {0}")]
    NullEvent(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
