use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("order saturation did not terminate after {0} steps")]
    Saturation(usize),

    #[error("s(O_D) = 0 for D = {0}: no CM points on the curve")]
    NoCmPoints(i64),

    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: String, residual: f64 },

    #[error("found {found} of {expected} CM points for D = {d} up to height {height}")]
    HeightCapReached { d: i64, found: usize, expected: usize, height: i64 },

    #[error("rational reconstruction unstable for D = {d} up to {digits} digits")]
    Reconstruction { d: i64, digits: u32 },

    #[error("root on an interval endpoint: {0}")]
    EndpointRoot(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("search exhausted up to l = {l_max}: {tried} candidates tried")]
    Exhausted { l_max: u64, tried: usize },

    #[error("table: {0}")]
    Table(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
