//! Bounded-exact analysis of vector addition systems with states (VASSes):
//! reachability search, well-quasi-order run pumping, semilinear separator
//! synthesis, and desk-scale condition checkers for ratio-style
//! non-reachability arguments.

pub mod checker;
pub mod cli;
pub mod constructions;
pub mod explore;
pub mod numtheory;
pub mod semilinear;
pub mod separator;
pub mod vass;
pub mod wqo;

pub use vass::{Configuration, Run, StateId, TransId, Vass};
