//! Exact combinatorics of Hurwitz self-correspondences of marked spheres:
//! constellation enumeration, braid orbits, polynomiality index, dynamical
//! degree bounds and one-node boundary bookkeeping.

pub mod boundary;
pub mod braid;
pub mod corpus;
pub mod count;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod partition;
pub mod perm;
pub mod portrait;
pub mod root;

pub use error::{Error, Result};
pub use partition::Partition;
pub use perm::{CanonicalKey, MarkedTuple, Permutation};
pub use portrait::{BranchingData, Portrait, ValidationReport};
