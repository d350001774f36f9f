use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("characteristic {0} is not prime")]
    NotPrime(u64),

    #[error("non-admissible relation: {0}")]
    NonAdmissible(String),

    #[error("duplicate name `{0}`")]
    Duplicate(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),

    #[error("algebra not finite-dimensional within path_cap {0}")]
    NotFiniteDimensional(usize),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("module too large for submodule enumeration (dimension {dim} exceeds bound {bound})")]
    ModuleTooLarge { dim: usize, bound: usize },

    #[error("End ring too large to search (dimension {0})")]
    EndTooLarge(usize),

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error("inconclusive enumeration: {0}")]
    Inconclusive(String),

    #[error("weight {0} is not strictly positive")]
    NonPositiveWeight(String),

    #[error("complex is not presilting")]
    NotPresilting,

    #[error("object is not a basic two-term silting complex")]
    NotSilting,

    #[error("invalid query: {0}")]
    Query(String),

    #[error("no cone found within catalog for theta = {0}")]
    NoCone(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
