//! Analysis of one-dimensional Pisot substitutions: classification, coincidence
//! rank, quotient factor substitutions and cohomology lower bounds.

pub mod algebra;
pub mod cohomology;
pub mod corpus;
pub mod error;
pub mod factors;
pub mod geometry;
pub mod pair_dynamics;
pub mod properize;
pub mod report;
pub mod subst;

pub use error::{Error, Precondition, Result};
pub use subst::{BiInfiniteSeed, Substitution, Symbol, Word};
