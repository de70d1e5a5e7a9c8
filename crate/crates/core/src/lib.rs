//! Kazhdan-Lusztig cells of the affine Hecke algebras of types C2 and G2
//! with unequal parameters.
//!
//! The crate builds exact Hecke algebra arithmetic over `Z[q, q^-1]`,
//! Kazhdan-Lusztig bases, the cell preorders, and machinery that checks a
//! decomposition theorem for finite cells and Lusztig's conjectures on a
//! bounded ball of the group.

#![allow(clippy::type_complexity)]

pub mod cells;
pub mod conjectures;
pub mod coxeter;
pub mod decomposition;
pub mod hecke;
pub mod identities;
pub mod klbasis;
pub mod laurent;
pub mod report;
