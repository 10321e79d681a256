use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: vertex id {id} out of range for {num_vertices} vertices")]
    VertexOutOfRange {
        line: usize,
        id: u64,
        num_vertices: usize,
    },
    #[error("line {line}: negative edge weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },
    #[error("line {line}: non-finite edge weight")]
    NonFiniteWeight { line: usize },
    #[error("{0} vertices exceed the supported id space")]
    TooManyVertices(usize),
    #[error("malformed CSR: {0}")]
    MalformedCsr(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum LouvainError {
    #[error("graph has zero total edge weight; modularity is undefined")]
    DegenerateGraph,
    #[error("membership has {got} entries, graph has {expected} vertices")]
    MembershipLength { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("hashtable probe exhausted while accumulating key {key} (capacity {capacity})")]
    HashtableFailed { key: u32, capacity: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("exhaustive search supports at most {max} vertices, got {got}")]
    TooLarge { max: usize, got: usize },
}

impl LouvainError {
    /// True for failures that indicate a bug or a broken sizing guarantee
    /// rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            LouvainError::HashtableFailed { .. } | LouvainError::Invariant(_)
        )
    }
}
