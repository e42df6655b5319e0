//! Trace-based mobility: the producer installs a reverse path from a fixed
//! rendezvous node down to itself, refreshed by periodic keep-alives.

use std::collections::{BTreeMap, BTreeSet};

use crate::forwarder::{Action, DropReason, InterestDecision, NodeEngine, Notice};
use crate::ids::FaceId;
use crate::name::Name;
use crate::tables::{Message, SeqNum, Special};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceFace {
    pub face: FaceId,
    pub seq: SeqNum,
    pub expiry: SimTime,
}

#[derive(Debug, Clone, Default)]
pub struct TraceTable {
    pub lifetime: SimTime,
    /// Prefixes whose traces terminate at this node.
    pub rv_for: BTreeSet<Name>,
    entries: BTreeMap<Name, Vec<TraceFace>>,
    forwarded: BTreeMap<Name, SeqNum>,
}

impl TraceTable {
    /// Installs or refreshes a trace face. Faces from older traces are
    /// dropped; a stale refresh is ignored. Returns whether the set of faces
    /// changed.
    pub fn install(&mut self, prefix: &Name, face: FaceId, seq: SeqNum, now: SimTime) -> bool {
        let expiry = now + self.lifetime;
        let v = self.entries.entry(prefix.clone()).or_default();
        v.retain(|t| t.expiry > now);
        if v.iter().any(|t| t.seq > seq) {
            return false;
        }
        let before = v.len();
        v.retain(|t| t.seq == seq);
        let mut changed = v.len() != before;
        match v.iter_mut().find(|t| t.face == face) {
            Some(t) => t.expiry = expiry,
            None => {
                v.push(TraceFace { face, seq, expiry });
                changed = true;
            }
        }
        changed
    }

    /// Unexpired trace faces for the longest matching prefix.
    pub fn live(&self, name: &Name, now: SimTime) -> impl Iterator<Item = FaceId> + '_ {
        self.entries
            .iter()
            .filter(|(p, _)| p.is_prefix_of(name))
            .max_by_key(|(p, _)| p.len())
            .into_iter()
            .flat_map(move |(_, v)| v.iter().filter(move |t| t.expiry > now).map(|t| t.face))
    }

    pub fn entries(&self, prefix: &Name) -> &[TraceFace] {
        self.entries.get(prefix).map_or(&[], |v| v.as_slice())
    }

    /// Earliest expiry among live traces, if any.
    pub fn next_expiry(&self, now: SimTime) -> Option<SimTime> {
        self.entries
            .values()
            .flatten()
            .map(|t| t.expiry)
            .filter(|&e| e > now)
            .min()
    }
}

impl NodeEngine {
    /// Trace installation (acknowledged, retransmitted) or keep-alive
    /// (best effort) received on `ingress`.
    pub fn on_trace(&mut self, msg: Message, ingress: FaceId, now: SimTime, out: &mut Vec<Action>) {
        let Some(seq) = msg.seq.filter(|s| *s > SeqNum::ROUTING) else {
            out.push(Action::Notice(Notice::ProtocolError));
            return;
        };
        let reliable = msg.special == Special::Trace;
        if reliable {
            out.push(Action::Send {
                face: ingress,
                msg: Message::ack(msg.name.clone(), seq, Special::Trace),
            });
        }
        let prefix = msg.name.clone();
        if self.traces.install(&prefix, ingress, seq, now) {
            out.push(Action::Notice(Notice::FibChanged {
                prefix: prefix.clone(),
            }));
        }
        if self.traces.rv_for.contains(&prefix) {
            return;
        }
        let Some(next) = self
            .fib
            .longest_prefix_match(&prefix)
            .and_then(|e| self.strategy_choice(e, Some(ingress)))
        else {
            return;
        };
        if reliable {
            if self.traces.forwarded.get(&prefix).is_some_and(|s| *s >= seq) {
                return;
            }
            self.traces.forwarded.insert(prefix, seq);
            self.send_control_reliably(next, msg.forwarded(), now, out);
        } else {
            out.push(Action::Send {
                face: next,
                msg: msg.forwarded(),
            });
        }
    }

    /// Consumer Interests use live trace faces and the FIB next hop together.
    pub(crate) fn route_via_trace(
        &self,
        msg: &mut Message,
        ingress: Option<FaceId>,
        now: SimTime,
    ) -> InterestDecision {
        let mut faces: Vec<FaceId> = Vec::new();
        let mut stale = false;
        for f in self.traces.live(&msg.name, now) {
            if Some(f) == ingress {
                continue;
            }
            if self.is_up(f) {
                if !faces.contains(&f) {
                    faces.push(f);
                }
            } else {
                stale = true;
            }
        }
        if let Some(f) = self
            .fib
            .longest_prefix_match(&msg.name)
            .and_then(|e| self.strategy_choice(e, ingress))
        {
            if !faces.contains(&f) {
                faces.push(f);
            }
        }
        match faces.len() {
            0 if stale => InterestDecision::Dropped(DropReason::StaleTrace),
            0 => InterestDecision::Dropped(DropReason::NoRoute),
            1 => InterestDecision::ForwardedVia(faces[0]),
            _ => InterestDecision::Broadcast(faces),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::name;

    #[test]
    fn newer_trace_replaces_older_faces() {
        let mut t = TraceTable {
            lifetime: SimTime::from_millis(1500),
            ..Default::default()
        };
        let p = name("/p");
        assert!(t.install(&p, FaceId(1), SeqNum(1), SimTime::ZERO));
        assert!(!t.install(&p, FaceId(1), SeqNum(1), SimTime::from_millis(500)));
        assert_eq!(t.live(&name("/p/3"), SimTime::from_millis(1900)).collect::<Vec<_>>(), vec![FaceId(1)]);
        assert!(t.install(&p, FaceId(2), SeqNum(2), SimTime::from_secs(1)));
        assert_eq!(t.live(&p, SimTime::from_secs(1)).collect::<Vec<_>>(), vec![FaceId(2)]);
        // late keep-alive of the old trace is ignored
        assert!(!t.install(&p, FaceId(1), SeqNum(1), SimTime::from_secs(1)));
    }

    #[test]
    fn traces_expire() {
        let mut t = TraceTable {
            lifetime: SimTime::from_millis(1500),
            ..Default::default()
        };
        let p = name("/p");
        t.install(&p, FaceId(1), SeqNum(1), SimTime::ZERO);
        assert_eq!(t.live(&p, SimTime::from_millis(1499)).count(), 1);
        assert_eq!(t.live(&p, SimTime::from_millis(1500)).count(), 0);
    }
}
