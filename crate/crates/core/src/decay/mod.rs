//! Decay envelopes of coefficient sequences and empirical checks of the
//! weighted bounds relating functions to their Hermite coefficients.
//!
//! Reported constants are the smallest grid values that work on the given
//! data. They are evidence, not certificates.

mod envelope;
mod tails;
mod tame;

pub use envelope::{fit_envelope, ols, DecayEnvelope, MIN_SUPPORT};
pub use tails::{
    moment_bound_check, tail_sum_check, MomentPoint, MomentReport, TailPoint, TailSumReport, MAX_TERMS,
    TERM_CUTOFF,
};
pub use tame::{
    verify_backward_bound, verify_forward_bound, Direction, TameBoundReport, TameCase, TestFunction,
    DEFAULT_CBAR_GRID,
};
