use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("matrix is singular (smallest singular value {0:e})")]
    Singular(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("elements belong to different algebras")]
    ParentMismatch,
    #[error("objects are defined over different algebras")]
    AlgebraMismatch,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("malformed poset: {0}")]
    MalformedPoset(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("limit element is not coherent (residual {0:e} on {1})")]
    Incoherent(f64, String),
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("operator is not adjointable: {0}")]
    NotAdjointable(String),
    #[error("module is not full")]
    NotFull,
    #[error("degenerate morphism: unit does not map to the identity (residual {0:e})")]
    DegenerateMorphism(f64),
    #[error("degenerate induction context: {0}")]
    DegenerateContext(String),
    #[error("no invertible intertwiner found after {0} draws")]
    WitnessNotFound(usize),
    #[error("no declared node carries a factorization")]
    NoFactorizationNode,
    #[error("no declared node realizes the seminorm induced from `{0}`")]
    NoMatchingNode(String),
    #[error("structure recovery failed: {0}")]
    Structure(String),
    #[error("instance generator failed after {0} attempts")]
    GeneratorExhausted(usize),
    #[error("empty input: {0}")]
    Empty(String),
}

pub type Result<T> = std::result::Result<T, Error>;
