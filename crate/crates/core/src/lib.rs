//! Cooperative overloaded signaling in gridworlds.
//!
//! A signaler who knows the target item either fetches it, quits, or sends
//! a one-feature signal to a receiver who then acts. Communication models
//! live behind [`agents::CommModel`] and are picked by name from an
//! [`agents::ModelRegistry`]; [`experiments`] plays them against seeded trial
//! sets and summarizes the outcome.

pub mod agents;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod planning;
pub mod pragmatics;
pub mod streams;

pub use error::{Error, Result};
