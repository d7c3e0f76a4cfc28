//! Experiment harness for the pack3d engine: dataset generation, batch runs
//! with structured reports, side-by-side comparison, and the HTTP game service.

pub mod compare;
pub mod config;
pub mod dataset;
pub mod report;
pub mod run;
pub mod server;
pub mod solver;
