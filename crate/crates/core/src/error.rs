use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {v} out of range for a graph with {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("{0} vertices exceeds the supported maximum")]
    TooManyVertices(usize),
    #[error("edge count {m} outside 0..={max}")]
    EdgeCountOutOfRange { m: usize, max: usize },
    #[error("edge probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("vertex set must be nonempty")]
    EmptySet,
    #[error("not a permutation of the vertex set")]
    InvalidPermutation,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown vertex name `{0}`")]
    UnknownName(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("color {color} outside 1..={k}")]
    ColorOutOfRange { color: u8, k: u8 },
    #[error("k = {0} is not supported (need 1 <= k <= 16)")]
    UnsupportedColorCount(usize),
    #[error("coloring has {coloring} entries but the graph has {graph} vertices")]
    SizeMismatch { coloring: usize, graph: usize },
    #[error("colorings use different palettes (k = {0} vs k = {1})")]
    PaletteMismatch(u8, u8),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("node budget of {budget} expansions exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("a deviating configuration needs at least two color classes, got {0}")]
    TooFewClasses(usize),
    #[error("color classes must be nonempty")]
    EmptyClass,
    #[error("configuration with {0} recolorings is too large to brute force")]
    ConfigTooLarge(u128),
}

impl From<GraphError> for SolverError {
    fn from(e: GraphError) -> Self {
        SolverError::Game(e.into())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("coalition bound q = {q} outside 1..={n}")]
    QOutOfRange { q: usize, n: usize },
    #[error("audit precondition failed: {0}")]
    Precondition(String),
}

impl From<GraphError> for EquilibriumError {
    fn from(e: GraphError) -> Self {
        EquilibriumError::Game(e.into())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error("replay diverged at step {step}: {reason}")]
    ReplayMismatch { step: usize, reason: String },
}

impl From<GameError> for DynamicsError {
    fn from(e: GameError) -> Self {
        DynamicsError::Equilibrium(e.into())
    }
}
