//! Network model: topologies, events and the simulation loop.

pub mod analysis;
pub mod edgelist;
pub mod engine;
pub mod event;
pub mod topology;

pub use engine::{Motion, PlayoutConfig, SimConfig, Simulation, Traffic};
pub use topology::{build_grid_fattree, GridFatTree, LinkParams, RouterClass, Topology};
