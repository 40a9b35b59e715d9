//! Experiment specs, sweeps and CSV output for the `fdsim` binary.

pub mod run;
pub mod spec;

pub use run::{csv_string, run, write_csv, ResultRow, COLUMNS};
pub use spec::{Arm, Axis, Diagnostic, ExperimentSpec, Sweep, DEFAULT_SPEC};
