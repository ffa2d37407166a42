use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed group spec: {0}")]
    MalformedSpec(String),
    #[error("malformed cover file: {0}")]
    MalformedCover(String),
    #[error("element budget exceeded: need {needed} elements, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: usize },
    #[error("order {order} exceeds the exact isomorphism bound {bound}")]
    IsoBoundExceeded { order: usize, bound: usize },
    #[error("subgroup is not normal in its parent")]
    NotNormal,
    #[error("group is not abelian")]
    NotAbelian,
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("invalid twist: {0}")]
    InvalidTwist(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("Frattini subgroup of a non-nilpotent group of order {order} exceeds the fallback bound {bound}")]
    FrattiniBound { order: usize, bound: usize },
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::MalformedSpec(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
