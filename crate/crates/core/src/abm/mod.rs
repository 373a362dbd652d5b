//! Off-lattice agent model of cancer cells and cytotoxic T lymphocytes.

pub mod grid;
pub mod lattice;
pub mod params;
pub mod world;

pub use grid::SpatialIndex;
pub use params::AbmParams;
pub use world::{AgentId, AgentKind, AgentKindTag, CellAgent, CtlEvent, CtlState, StepInputs, StepStats, World};
