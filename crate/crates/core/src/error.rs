use thiserror::Error;

use crate::classify::ClassificationResult;
use crate::numeric::NumericTable;
use crate::pattern::Cell;

/// Errors surfaced by every stage of the pipeline.
///
/// [`Error::name`] gives a stable identifier for each variant; the CLI
/// prints it so scripts do not have to match on message text.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("ragged grid: line {line} has {found} cells, expected {expected}")]
    RaggedGrid {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid character {ch:?} at line {line}, position {position}")]
    InvalidCharacter {
        line: usize,
        position: usize,
        ch: char,
    },

    #[error("{axis} {index} has no support cells")]
    EmptyRowOrColumn { axis: &'static str, index: usize },

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("invalid count table: {0}")]
    InvalidCounts(String),

    #[error("cell {0} is not in the support")]
    CellNotInSupport(Cell),

    #[error("block {0} is empty")]
    EmptyBlock(usize),

    #[error("pattern violates the DS-free condition at column {column}")]
    NotDsFree { column: usize },

    #[error("pattern is not doubly chordal bipartite ({})", .0.verdict)]
    NotDoublyChordalBipartite(Box<ClassificationResult>),

    #[error("clique sum {label} vanishes at the given counts")]
    ZeroDenominatorFactor { label: String },

    #[error("linear form {label} vanishes at the given counts")]
    VanishingLinearForm { label: String },

    #[error("iterative proportional fitting did not converge after {} iterations (gap {:e})", .0.iterations, .0.max_marginal_gap)]
    NoConvergence(Box<NumericTable>),

    #[error("wrong pattern: {0}")]
    WrongPattern(String),

    #[error("degenerate elimination: {0}")]
    DegenerateElimination(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::RaggedGrid { .. } => "RaggedGrid",
            Error::InvalidCharacter { .. } => "InvalidCharacter",
            Error::EmptyRowOrColumn { .. } => "EmptyRowOrColumn",
            Error::InvalidSelection(_) => "InvalidSelection",
            Error::InvalidCounts(_) => "InvalidCounts",
            Error::CellNotInSupport(_) => "CellNotInSupport",
            Error::EmptyBlock(_) => "EmptyBlock",
            Error::NotDsFree { .. } => "NotDSFree",
            Error::NotDoublyChordalBipartite(_) => "NotDoublyChordalBipartite",
            Error::ZeroDenominatorFactor { .. } => "ZeroDenominatorFactor",
            Error::VanishingLinearForm { .. } => "VanishingLinearForm",
            Error::NoConvergence(_) => "NoConvergence",
            Error::WrongPattern(_) => "WrongPattern",
            Error::DegenerateElimination(_) => "DegenerateElimination",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
