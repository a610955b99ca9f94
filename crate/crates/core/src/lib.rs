//! Core engine of the logic tutor: formula syntax, signatures, provers,
//! the simplicity grader, autoformalization, tutoring, argument checking
//! and the dataset formats.

pub mod argue;
pub mod autoform;
pub mod corpus;
pub mod formula;
pub mod grader;
pub mod prover;
pub mod signature;
pub mod tutor;
