//! Exact verification of group gradings on matrix algebras over finite
//! fields of odd characteristic, and of the dual Hopf algebra action they
//! induce.
#![allow(clippy::needless_range_loop)]

pub mod field;
pub mod grading;
pub mod group;
pub mod hopf;
pub mod lie;
pub mod linalg;
pub mod sl;
pub mod snf;
pub mod suites;

pub use field::{build_field, FieldElem, FieldRef};
pub use grading::{Ambient, Grading, Mode};
pub use group::{AbelianGroup, GroupElem};
pub use linalg::{Mat, Subspace};
