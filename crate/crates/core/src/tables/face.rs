use serde::{Deserialize, Serialize};

use crate::ids::{FaceId, LinkId, NodeId, StationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaceKind {
    Wired,
    /// Station to point-of-attachment association. Up iff the station is
    /// currently associated through it.
    Association,
    /// Dedicated one-hop link between neighboring points of attachment.
    Neighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceState {
    Up,
    Down,
}

/// What sits at the far end of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Peer {
    Node(NodeId),
    Station(StationId),
}

#[derive(Debug, Clone)]
pub struct Face {
    pub id: FaceId,
    pub kind: FaceKind,
    pub state: FaceState,
    pub link: LinkId,
    pub peer: Peer,
}

impl Face {
    pub fn is_up(&self) -> bool {
        self.state == FaceState::Up
    }
}
