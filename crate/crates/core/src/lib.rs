//! Exact computations with (g,K)-modules over principal ideal domains.

pub mod base_change;
pub mod cohomology;
pub mod error;
pub mod functors;
pub mod kmodule;
pub mod lattice;
pub mod lie;
pub mod matrix;
pub mod models;
pub mod pair;
pub mod pbw;
pub mod ring;
pub mod scenario;
pub mod snf;

pub use error::{GkError, Result};
pub use lattice::Lattice;
pub use matrix::{LatticeMap, LatticeModule, Matrix};
pub use ring::{BaseRing, Elem, RingMap};
