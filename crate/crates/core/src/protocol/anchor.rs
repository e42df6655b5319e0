//! Anchor-based mobility: a fixed anchor learns the producer's point of
//! attachment from hop-by-hop location updates and relays consumer Interests
//! there by locator.

use std::collections::BTreeMap;

use crate::forwarder::{Action, DropReason, InterestDecision, NodeEngine, Notice};
use crate::ids::{FaceId, NodeId};
use crate::name::Name;
use crate::tables::{FaceKind, Message, SeqNum, Special};
use crate::time::SimTime;

#[derive(Debug, Clone, Default)]
pub struct AnchorTables {
    /// Anchor node of each mobile prefix; installed on every router.
    pub anchor_of: BTreeMap<Name, NodeId>,
    /// At the anchor: current point of attachment per prefix.
    pub bindings: BTreeMap<Name, (NodeId, SeqNum)>,
    /// At a point of attachment: association face of the registered producer.
    pub local: BTreeMap<Name, FaceId>,
    /// Highest location update seen per prefix, to suppress retransmitted
    /// duplicates.
    pub seen: BTreeMap<Name, SeqNum>,
}

fn longest<'a, V>(map: &'a BTreeMap<Name, V>, name: &Name) -> Option<(&'a Name, &'a V)> {
    map.iter()
        .filter(|(p, _)| p.is_prefix_of(name))
        .max_by_key(|(p, _)| p.len())
}

impl AnchorTables {
    pub fn binding_for(&self, name: &Name) -> Option<NodeId> {
        longest(&self.bindings, name).map(|(_, (poa, _))| *poa)
    }
}

impl NodeEngine {
    /// Location update received on `ingress`. Acknowledged, recorded, and
    /// relayed reliably one hop closer to the anchor.
    pub fn on_anchor_update(
        &mut self,
        msg: Message,
        ingress: FaceId,
        now: SimTime,
        out: &mut Vec<Action>,
    ) {
        let Some(seq) = msg.seq.filter(|s| *s > SeqNum::ROUTING) else {
            out.push(Action::Notice(Notice::ProtocolError));
            return;
        };
        out.push(Action::Send {
            face: ingress,
            msg: Message::ack(msg.name.clone(), seq, Special::AnchorUpdate),
        });
        let prefix = msg.name.clone();
        if self.face(ingress).kind == FaceKind::Association {
            self.anchor.local.insert(prefix.clone(), ingress);
        }
        if self.anchor.seen.get(&prefix).is_some_and(|s| *s >= seq) {
            return;
        }
        self.anchor.seen.insert(prefix.clone(), seq);
        let Some(&anchor) = self.anchor.anchor_of.get(&prefix) else {
            return;
        };
        if anchor == self.id {
            let poa = msg.locator.unwrap_or(self.id);
            self.anchor.bindings.insert(prefix.clone(), (poa, seq));
            out.push(Action::Notice(Notice::FibChanged { prefix }));
            return;
        }
        if let Some(next) = self.unicast.get(anchor.index()).copied().flatten() {
            self.send_control_reliably(next, msg.forwarded(), now, out);
        }
    }

    /// Interest routing under the anchor scheme: toward the anchor by FIB,
    /// then by locator to the bound point of attachment.
    pub(crate) fn route_via_anchor(&self, msg: &mut Message, ingress: Option<FaceId>) -> InterestDecision {
        if msg.locator.is_none() {
            if let Some(poa) = self.anchor.binding_for(&msg.name) {
                msg.locator = Some(poa);
            }
        }
        match msg.locator {
            Some(l) if l == self.id => match longest(&self.anchor.local, &msg.name) {
                Some((_, &f)) if self.is_up(f) => InterestDecision::ForwardedVia(f),
                _ => InterestDecision::Dropped(DropReason::NoBinding),
            },
            Some(l) => match self.unicast.get(l.index()).copied().flatten() {
                Some(f) if self.is_up(f) => InterestDecision::ForwardedVia(f),
                _ => InterestDecision::Dropped(DropReason::NoRoute),
            },
            None => {
                let Some(entry) = self.fib.longest_prefix_match(&msg.name) else {
                    return InterestDecision::Dropped(DropReason::NoRoute);
                };
                match self.strategy_choice(entry, ingress) {
                    Some(f) => InterestDecision::ForwardedVia(f),
                    None => InterestDecision::Dropped(DropReason::NoBinding),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forwarder::{ForwarderConfig, InterestMode};
    use crate::ids::{LinkId, StationId};
    use crate::name::name;
    use crate::sim::topology::RouterClass;
    use crate::tables::{FibEntry, MessageKind, Peer};

    /// Chain PoA(0) - mid(1) - anchor(2), engines only.
    fn chain() -> Vec<NodeEngine> {
        let cfg = ForwarderConfig::default();
        let mut v: Vec<NodeEngine> = (0..3)
            .map(|i| NodeEngine::new(NodeId(i), RouterClass::Generic, cfg.clone()))
            .collect();
        // node 0: f0 up, f1 association
        v[0].add_face(FaceKind::Wired, LinkId(0), Peer::Node(NodeId(1)));
        v[0].add_face(FaceKind::Association, LinkId(9), Peer::Station(StationId(0)));
        // node 1: f0 down, f1 up
        v[1].add_face(FaceKind::Wired, LinkId(0), Peer::Node(NodeId(0)));
        v[1].add_face(FaceKind::Wired, LinkId(1), Peer::Node(NodeId(2)));
        v[2].add_face(FaceKind::Wired, LinkId(1), Peer::Node(NodeId(1)));
        v[0].unicast = vec![None, Some(FaceId(0)), Some(FaceId(0))];
        v[1].unicast = vec![Some(FaceId(0)), None, Some(FaceId(1))];
        v[2].unicast = vec![Some(FaceId(0)), Some(FaceId(0)), None];
        for n in v.iter_mut() {
            n.mode = InterestMode::Anchor;
            n.anchor.anchor_of.insert(name("/p"), NodeId(2));
        }
        v[0].fib.insert(FibEntry::new(name("/p"), vec![FaceId(0)], SeqNum(0)));
        v[1].fib.insert(FibEntry::new(name("/p"), vec![FaceId(1)], SeqNum(0)));
        v
    }

    #[test]
    fn update_climbs_to_anchor_and_binds() {
        let mut v = chain();
        let mut out = vec![];
        let mut u = Message::control(Special::AnchorUpdate, name("/p"), SeqNum(1));
        u.locator = Some(NodeId(0));
        v[0].on_anchor_update(u, FaceId(1), SimTime::ZERO, &mut out);
        let fwd = out
            .iter()
            .find_map(|a| match a {
                Action::Send { face, msg } if msg.kind == MessageKind::Interest => Some((*face, msg.clone())),
                _ => None,
            })
            .unwrap();
        assert_eq!(fwd.0, FaceId(0));
        assert_eq!(v[0].anchor.local.get(&name("/p")), Some(&FaceId(1)));
        out.clear();
        v[1].on_anchor_update(fwd.1.clone(), FaceId(0), SimTime::ZERO, &mut out);
        let fwd2 = fwd.1.forwarded();
        out.clear();
        v[2].on_anchor_update(fwd2, FaceId(0), SimTime::ZERO, &mut out);
        assert_eq!(v[2].anchor.bindings.get(&name("/p")), Some(&(NodeId(0), SeqNum(1))));
        // retransmitted copy is acknowledged but not relayed again
        out.clear();
        v[1].on_anchor_update(fwd.1, FaceId(0), SimTime::ZERO, &mut out);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn interest_is_tunnelled_by_locator() {
        let mut v = chain();
        v[2].anchor.bindings.insert(name("/p"), (NodeId(0), SeqNum(1)));
        v[0].anchor.local.insert(name("/p"), FaceId(1));
        let mut i = Message::interest(name("/p/1"), 1, SimTime::from_secs(1));
        assert_eq!(v[1].route_via_anchor(&mut i, Some(FaceId(0))), InterestDecision::ForwardedVia(FaceId(1)));
        assert_eq!(v[2].route_via_anchor(&mut i, Some(FaceId(0))), InterestDecision::ForwardedVia(FaceId(0)));
        assert_eq!(i.locator, Some(NodeId(0)));
        assert_eq!(v[1].route_via_anchor(&mut i, Some(FaceId(1))), InterestDecision::ForwardedVia(FaceId(0)));
        assert_eq!(v[0].route_via_anchor(&mut i, Some(FaceId(0))), InterestDecision::ForwardedVia(FaceId(1)));
        v[0].set_face_state(FaceId(1), crate::tables::FaceState::Down);
        assert_eq!(
            v[0].route_via_anchor(&mut i, Some(FaceId(0))),
            InterestDecision::Dropped(DropReason::NoBinding)
        );
    }
}
