//! Finite restriction categories, M-categories, sites and restriction
//! presheaves, with the comparison between join restriction presheaves and
//! sheaves on the site of M-subobjects.

pub mod bridge;
pub mod bundle;
pub mod cat;
pub mod classifier;
pub mod error;
pub mod fixtures;
pub mod functor;
pub mod join;
pub mod limits;
pub mod mcat;
pub mod par;
pub mod presheaf;
pub mod report;
pub mod restriction;
pub mod rpsh;
pub mod sheafify;
pub mod site;
mod solve;

pub use cat::{FinCategory, Mor, MorphismData, Obj};
pub use error::{Error, Result};
pub use report::{LawReport, Violation};
pub use restriction::RestrictionCategory;
