//! Forwarding-plane domain types: faces, messages and the FIB/TFIB/PIT/CS
//! tables every protocol shares.

mod cs;
mod face;
mod fib;
mod message;
mod pit;

pub use cs::ContentStore;
pub use face::{Face, FaceKind, FaceState, Peer};
pub use fib::{Fib, FibEntry, Pending, TfibEntry};
pub use message::{Message, MessageKind, PacketTag, SeqNum, Special};
pub use pit::{Pit, PitEntry, PitInsert};
