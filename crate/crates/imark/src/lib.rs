//! Sprague-Grundy engine for i-Mark(S, D) subtraction-division games.
//!
//! A position is a single pile of n tokens. A move either subtracts some
//! s ∈ S from the pile or divides the pile by some d ∈ D when d divides it
//! exactly; the player who makes the last move wins. This crate provides:
//!
//! * a definitional SG oracle: a bit-packed dynamic-programming table over
//!   positions 0..=N with bit-exact save/load ([`oracle`]),
//! * O(log n) closed-form evaluators for the solved families
//!   S = [1, t-1], D = {d} with d ≡ 1 (mod t), and S = {2}, D = {k} with
//!   k odd, plus the periodic outcome formula for d ≢ 1 (mod t)
//!   ([`closed_form`]),
//! * gap scans, window verification, and a checker for the conjectured
//!   structure of SG-2 positions in i-Mark({s},{d}) ([`analysis`]),
//! * sums of games through the XOR theorem with winning-move search and a
//!   small product-graph oracle that validates the theorem ([`sums`]).

pub mod analysis;
pub mod closed_form;
pub mod error;
pub mod evaluator;
pub mod game;
pub mod oracle;
pub mod sums;

pub use error::{Error, Result};
pub use evaluator::{Evaluator, Source};
pub use game::{FamilyTag, GameSpec, Position, MAX_POSITION};
pub use oracle::{mex, Outcome, SgTable, DEFAULT_MEMORY_BUDGET};
