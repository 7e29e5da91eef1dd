//! Combinatorial toolkit for coloured right-angled polytopes.
//!
//! The pipeline starts from a finite-volume right-angled polytope with a
//! proper facet colouring, builds the cube complex dual to the induced
//! tessellation, orients it from a state and a set of moves, and then
//! certifies finiteness properties of the kernel of the resulting map to the
//! circle by checking ascending and descending links. A second branch works
//! at the cusps: loops in the cusp tori, evaluations of cocycles on them,
//! kernel sublattices, systoles, and perturbations of characters that keep
//! every short cusp vector out of the kernel.
#![allow(clippy::needless_range_loop)]

pub mod bitset;
pub mod characters;
pub mod cubulation;
pub mod error;
pub mod formats;
pub mod game;
pub mod gosset;
pub mod homology;
pub mod morse;
pub mod polytope;
pub mod unionfind;

pub use error::{Error, Result};
