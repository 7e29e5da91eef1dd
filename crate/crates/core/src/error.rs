use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("facet index {index} out of range (polytope has {num_facets} facets)")]
    FacetOutOfRange { index: usize, num_facets: usize },

    #[error("ideal vertex {0} does not exist")]
    InvalidIdealVertex(usize),

    #[error("pair ({0}, {1}) is not adjacent")]
    NotAdjacent(u32, u32),

    #[error("palette of {0} colours is too large (limit {1})")]
    PaletteTooLarge(usize, usize),

    #[error("complex would have {cells} cells in dimension {dim}, above the cap of {cap}")]
    CellCapExceeded { dim: usize, cells: u128, cap: u64 },

    #[error("complex was built up to dimension {built}, dimension {needed} is required")]
    DimensionBound { built: usize, needed: usize },

    #[error("bad pair of facets ({0}, {1}): unit edge assignment is not a cocycle")]
    BadPairPresent(u32, u32),

    #[error("cochain is not a cocycle: coboundary is {value} on square {square}")]
    NotACocycle { square: usize, value: i64 },

    #[error("orientation is not coherent: {0} pairs are not very good")]
    NonCoherent(usize),

    #[error("complex is disconnected")]
    Disconnected,

    #[error("cusp loop for pair ({0}, {1}) failed to close within 4 steps")]
    LoopNotClosed(u32, u32),

    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("no perturbation found within the search bound ({0} candidates tried)")]
    NoSolutionWithinBound(u64),

    #[error("malformed input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
