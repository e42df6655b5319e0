use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ids::{NodeId, StationId};
use crate::name::Name;
use crate::time::SimTime;

/// Route version carried by updates and stored in FIB entries. Entries
/// installed by routing carry 0.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeqNum(pub u64);

impl SeqNum {
    pub const ROUTING: SeqNum = SeqNum(0);

    pub fn next(self) -> SeqNum {
        SeqNum(self.0 + 1)
    }
}

impl fmt::Debug for SeqNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MessageKind {
    Interest,
    Data,
    /// Hop-by-hop acknowledgement of a reliable control Interest. Carries the
    /// acknowledged `(name, seq)` and the acknowledged `special` flag.
    Ack,
}

/// Special-treatment flag of an Interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Special {
    None,
    /// Interest Update: propagated hop by hop toward the previous location.
    Update,
    /// Interest Notification: consumed at the point of attachment.
    Notification,
    /// Consumer Interest rebroadcast over neighbor links.
    Discovery,
    /// Tracing baseline: trace installation sent toward the rendezvous node.
    Trace,
    /// Tracing baseline: periodic trace refresh (not acknowledged).
    KeepAlive,
    /// Anchor baseline: location update sent toward the anchor.
    AnchorUpdate,
}

impl Special {
    /// Control messages are signaling; `None` and `Discovery` carry consumer
    /// traffic.
    pub fn is_control(self) -> bool {
        !matches!(self, Special::None | Special::Discovery)
    }
}

/// Identifies a consumer request across the Interest and Data it spawns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacketTag {
    pub consumer: StationId,
    pub request: u64,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Message {
    pub kind: MessageKind,
    pub name: Name,
    pub nonce: u32,
    pub special: Special,
    pub seq: Option<SeqNum>,
    pub lifetime: SimTime,
    /// Anchor baseline: tunnel destination for consumer Interests, or the
    /// point of attachment being registered for anchor updates.
    pub locator: Option<NodeId>,
    /// Router-to-router hops travelled so far.
    pub hops: u16,
    /// For updates: the producer sequence number that started this
    /// propagation, preserved across corrections and retransmissions.
    pub origin: u64,
    pub tag: Option<PacketTag>,
    /// Producer-side send time carried by Data, used for delay accounting.
    pub sent_at: SimTime,
}

impl Message {
    pub const INTEREST_BYTES: u32 = 40;
    pub const DATA_BYTES: u32 = 1250;
    pub const CONTROL_BYTES: u32 = 60;

    pub fn interest(name: Name, nonce: u32, lifetime: SimTime) -> Self {
        Message {
            kind: MessageKind::Interest,
            name,
            nonce,
            special: Special::None,
            seq: None,
            lifetime,
            locator: None,
            hops: 0,
            origin: 0,
            tag: None,
            sent_at: SimTime::ZERO,
        }
    }

    pub fn update(name: Name, seq: SeqNum) -> Self {
        Message {
            special: Special::Update,
            seq: Some(seq),
            origin: seq.0,
            ..Message::interest(name, 0, SimTime::ZERO)
        }
    }

    pub fn notification(name: Name, seq: SeqNum) -> Self {
        Message {
            special: Special::Notification,
            ..Message::update(name, seq)
        }
    }

    pub fn control(special: Special, name: Name, seq: SeqNum) -> Self {
        Message {
            special,
            ..Message::update(name, seq)
        }
    }

    pub fn ack(name: Name, seq: SeqNum, acked: Special) -> Self {
        Message {
            kind: MessageKind::Ack,
            special: acked,
            ..Message::update(name, seq)
        }
    }

    /// Data answering `interest`, carrying its tag, hop count and tunnel
    /// locator back.
    pub fn data_for(interest: &Message, now: SimTime) -> Self {
        Message {
            kind: MessageKind::Data,
            special: Special::None,
            seq: None,
            sent_at: now,
            ..interest.clone()
        }
    }

    pub fn size_bytes(&self) -> u32 {
        match (self.kind, self.special) {
            (MessageKind::Data, _) => Self::DATA_BYTES,
            (MessageKind::Ack, _) => Self::CONTROL_BYTES,
            (MessageKind::Interest, s) if s.is_control() => Self::CONTROL_BYTES,
            (MessageKind::Interest, _) => Self::INTEREST_BYTES,
        }
    }

    /// Signaling messages: acks and control Interests.
    pub fn is_control(&self) -> bool {
        self.kind == MessageKind::Ack
            || (self.kind == MessageKind::Interest && self.special.is_control())
    }

    /// Copy for the next hop.
    pub fn forwarded(&self) -> Message {
        let mut m = self.clone();
        m.hops = m.hops.saturating_add(1);
        m
    }
}

impl fmt::Debug for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if self.special != Special::None {
            write!(f, "[{:?}]", self.special)?;
        }
        write!(f, "({}", self.name)?;
        if let Some(s) = self.seq {
            write!(f, " {s:?}")?;
        }
        if let Some(l) = self.locator {
            write!(f, " ->{l:?}")?;
        }
        write!(f, " hops={})", self.hops)
    }
}
