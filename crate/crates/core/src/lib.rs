//! Discrete-event simulation of producer mobility in name-based networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`tables`]: names, FIB/TFIB, PIT, content store, messages and faces.
//! - [`forwarder`]: the per-router engine that forwards Interests, Data and
//!   the forwarding-update signaling.
//! - [`protocol`]: producer-side logic and the anchor, trace and
//!   global-routing baselines.
//! - [`sim`]: topologies, the event queue and the network simulation.
//! - [`mobility`]: station movement models and handoff selection.
//! - [`metrics`]: per-run observations, statistics and CSV export.
//! - [`experiment`]: configuration files and the three experiment drivers.

pub mod error;
pub mod experiment;
pub mod forwarder;
pub mod ids;
pub mod metrics;
pub mod mobility;
pub mod name;
pub mod protocol;
pub mod sim;
pub mod tables;
pub mod time;

pub use error::{Error, Result};
pub use ids::{FaceId, LinkId, NodeId, StationId};
pub use name::{name, Name};
pub use protocol::ProtocolKind;
pub use time::SimTime;
