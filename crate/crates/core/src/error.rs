use thiserror::Error;

use crate::cat::{Mor, Obj};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown morphism id {0}")]
    UnknownMorphism(usize),

    #[error("unknown object id {0}")]
    UnknownObject(usize),

    #[error("morphisms {0} and {1} are not parallel")]
    NotParallel(Mor, Mor),

    #[error("morphisms {0} and {1} do not form a cospan")]
    NotCospan(Mor, Mor),

    #[error("ill-formed category: {0}")]
    IllFormed(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("family is not pairwise compatible: {0} and {1} disagree")]
    IncompatibleFamily(usize, usize),

    #[error("not a functor: {0}")]
    NotAFunctor(String),

    #[error("functor does not preserve restriction at morphism {0}")]
    NotRestrictionFunctor(Mor),

    #[error("not a natural transformation: {0}")]
    NotNatural(String),

    #[error("transformation is not componentwise injective at object {0}")]
    NotMono(Obj),

    #[error("restriction idempotent {0} does not split")]
    UnsplitIdempotent(Mor),

    #[error("M-category is not geometric: {0}")]
    NotGeometric(String),

    #[error("presheaf is not a sheaf: {0}")]
    NotASheaf(String),

    #[error("presheaf is not a restriction presheaf: {0}")]
    NotRestrictionPresheaf(String),

    #[error("{0}")]
    Bundle(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
