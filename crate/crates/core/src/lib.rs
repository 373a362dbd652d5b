//! Hybrid simulator of a solid tumour under immune surveillance and therapy.
//!
//! A delay-differential model of the lymph-node immune response drives the
//! CTL boundary flux of a 3D off-lattice agent model of the lesion.

pub mod abm;
pub mod config;
pub mod error;
pub mod geometry;
pub mod immune;
pub mod morphology;
pub mod phenotype;
pub mod presets;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod therapy;

pub use error::{Error, Result};
pub use config::ExperimentConfig;
pub use presets::{load_preset, PRESET_NAMES};
pub use sim::{run, run_sweep, RunOptions, RunResult, RunSummary, SimFrame, Simulation};
