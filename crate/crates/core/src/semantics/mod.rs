//! Finite set-theoretic models: objects, arrows and the interpretation of judgments.

mod arrow;
mod interp;
mod object;

pub use arrow::{arrows, arrows_equal, Arrow};
pub use interp::{denote_prop, denote_term, Semantics};
pub use object::{prodcp, sumcp, Elem, FiniteMagma, SemError, SemObject, Shape, DEFAULT_SIZE_CAP};
