//! Exact certificates that nilpotent endomorphisms of bounded acyclic binary
//! multicomplexes over ℤ and ℤ localized at a prime have trivial class in the
//! Grothendieck group.
//!
//! The crate is layered bottom-up:
//! - [`ring`], [`matrix`], [`linalg`]: exact arithmetic and canonical forms;
//! - [`complexes`]: binary multicomplexes supported on `[0,2]ⁿ` and their validation;
//! - [`nilcat`]: nilpotent endomorphisms, kernel filtrations and layer splitting;
//! - [`witness`]: certificate emission and an independent replaying verifier.

pub mod complexes;
pub mod linalg;
pub mod matrix;
pub mod nilcat;
pub mod ring;
pub mod sample;
pub mod witness;

pub use complexes::{BinaryMulticomplex, Choice, MultiIndex, ValidationReport};
pub use linalg::{Lattice, LinalgError};
pub use matrix::Matrix;
pub use nilcat::{NilMulticomplex, Strategy};
pub use ring::{Ring, Scalar};
pub use witness::{Certificate, Verdict};
