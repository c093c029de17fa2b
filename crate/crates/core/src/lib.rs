//! The semigroup generated by the three-state Mealy automaton I: its action,
//! normal forms, growth, finite quotients, traces and ideals.

pub mod error;
pub mod mealy;
pub mod words;
pub mod rewrite;
pub mod growth;
pub mod quotients;
pub mod verify;

pub use error::{Error, Result};
