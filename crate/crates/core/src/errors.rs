use crate::indicators::RunTrace;
use crate::tree::CellId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cell {0} does not exist in the arena")]
    UnknownCell(CellId),

    #[error("cannot subdivide cell {cell}: {reason}")]
    Subdivision { cell: CellId, reason: String },

    #[error("subdivision patch is empty")]
    EmptyPatch,

    #[error("cell {0} of the patch is not a leaf of the tree")]
    PatchNotInLeaves(CellId),

    #[error("dyadic coordinate out of range: {0}")]
    Resolution(String),

    #[error("geometry invariant violated: {0}")]
    Geometry(String),

    #[error("tree is not conforming: {0}")]
    NonConforming(String),

    #[error("local error of cell {cell} is {value}; expected a finite nonnegative number")]
    InvalidLocalError { cell: CellId, value: f64 },

    #[error("iteration cap {cap} reached before the stopping rule was satisfied")]
    IterationCap { cap: usize, trace: Box<RunTrace> },

    #[error("no compatible labeling: {0}")]
    Labeling(String),

    #[error("enumeration stopped after {states} states (cap {cap}); frontier at complexity {complexity}")]
    StateCap {
        cap: usize,
        states: usize,
        complexity: usize,
    },

    #[error("search cap of {cap} states exceeded")]
    SearchCap { cap: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("need at least {needed} points in range, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("iteration {0} was not reached by the run")]
    UnknownIteration(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
