//! Exact computations with weight-2 newforms of squarefree level: modular
//! symbols, Hecke algebras and congruence numbers, Brandt modules of definite
//! quaternion algebras, local invariants of elliptic curves, anticyclotomic
//! theta elements, and a verification layer tying these together.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod modsym;
pub mod hecke;
pub mod invariants;
pub mod lattice;
pub mod quaternion;
pub mod brandt;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{IntMatrix, QMatrix, SmithForm};
