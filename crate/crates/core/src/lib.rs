//! Hermite expansions, weighted sup-norms and phase-space (Wigner) functions
//! of Fock-basis states, with numerical checks of the decay bounds that tie
//! them together.
//!
//! Modules:
//! - [`weights`]: weight functions ω, their axioms, Ω* and the ω-norms.
//! - [`hermite`]: Hermite functions, Gauss–Hermite quadrature, coefficient maps.
//! - [`decay`]: decay-envelope fits and empirical two-sided norm bounds.
//! - [`phase_space`]: special Hermite functions, Wigner and ambiguity functions.
//! - [`states`]: density matrices, validation and the alternating-sign example.
//! - [`io`]: CSV/JSON readers and writers shared with the command-line tool.

pub mod decay;
pub mod error;
pub mod grid;
pub mod hermite;
pub mod integrate;
pub mod io;
pub mod phase_space;
pub mod states;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
