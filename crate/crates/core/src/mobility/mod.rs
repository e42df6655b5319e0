//! Movement generators and the association rule.

pub mod graph;
pub mod handoff;
pub mod rwp;
pub mod trace;

pub use graph::{graph_uniform_jump, GraphRwp};
pub use handoff::HandoffRule;
pub use rwp::{Arena, RwpGeometric};
pub use trace::{manhattan_trace, straight_line_trace, MobilityTrace, TrackPoint};
