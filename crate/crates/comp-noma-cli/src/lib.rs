//! Experiment harness around the solver crate: scenario config files,
//! seeded Monte-Carlo sweeps, solver selection and CSV emission.

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{load_scenario_file, ScenarioFile};
pub use experiment::{
    run_experiment, ExperimentKind, ExperimentSpec, SolverTag, SweepOverrides,
};
