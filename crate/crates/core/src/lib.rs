//! Exact simulation of small quantum query circuits with halting
//! measurements, together with the tools to analyze, tune and search for them
//! and to compare them against classical decision-tree baselines.

pub mod analyzer;
pub mod blackbox;
pub mod circuit;
pub mod classical;
pub mod cli;
pub mod evolver;
pub mod statevec;
pub mod tuner;
pub mod verify;

pub use analyzer::{error_report, max_error, run_exact, run_sampled, ErrorReport, OutcomeDistribution};
pub use blackbox::{Property, TruthTable};
pub use circuit::{builtin_program, parse_program, serialize_program, Builtin, Gate, Program, Symbol};
pub use statevec::StateVector;
