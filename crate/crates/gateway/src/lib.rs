//! Command-line interface and HTTP service for the logic tutor.

pub mod api;
pub mod cli;
pub mod config;
