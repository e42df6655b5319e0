//! Per-node forwarding engine.
//!
//! [`NodeEngine`] holds the tables of one router and implements update
//! processing ([`NodeEngine::forward_update`]), notification processing
//! ([`NodeEngine::in_apply`]), consumer Interest forwarding with one-hop
//! discovery ([`NodeEngine::forward_interest`]), hop-by-hop acknowledgement
//! and retransmission of updates, and reverse-path Data delivery.
//!
//! The engine performs no I/O and owns no clock: every handler receives the
//! current time and appends [`Action`]s that the caller turns into link
//! transmissions and timer events.

use std::collections::BTreeMap;

use crate::ids::{FaceId, LinkId, NodeId};
use crate::name::Name;
use crate::protocol::anchor::AnchorTables;
use crate::protocol::tracing::TraceTable;
use crate::sim::topology::RouterClass;
use crate::tables::{
    ContentStore, Face, FaceKind, FaceState, Fib, FibEntry, Message, MessageKind, PacketTag,
    Peer, Pending, Pit, PitInsert, SeqNum, Special,
};
use crate::time::SimTime;

/// Validity hook run on updates before any table access. The default accepts
/// everything; a deployment would verify prefix ownership here.
pub type ValidityHook = fn(&Message, FaceId) -> bool;

pub fn accept_all(_: &Message, _: FaceId) -> bool {
    true
}

#[derive(Debug, Clone)]
pub struct ForwarderConfig {
    /// Update retransmission timer.
    pub retx_timeout: SimTime,
    /// Retransmissions before a pending record is given up.
    pub max_retries: u32,
    /// Derive the retransmission timer from observed update/ack round trips.
    pub adaptive_retx: bool,
    /// One-hop discovery over neighbor links when no valid face exists.
    pub discovery: bool,
    pub cs_capacity: usize,
}

impl Default for ForwarderConfig {
    fn default() -> Self {
        ForwarderConfig {
            retx_timeout: SimTime::from_millis(60),
            max_retries: 8,
            adaptive_retx: false,
            discovery: true,
            cs_capacity: 0,
        }
    }
}

/// How consumer Interests pick their next hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterestMode {
    /// FIB lookup with discovery fallback.
    Fib,
    /// Tracing baseline: follow a live trace if any, else the FIB.
    TraceThenFib,
    /// Anchor baseline: FIB toward the anchor, which tunnels by locator.
    Anchor,
}

/// Identifies a retransmission timer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimerKey {
    pub prefix: Name,
    pub face: FaceId,
    /// `Update`/`Notification` timers belong to the TFIB; `Trace` and
    /// `AnchorUpdate` timers to the baseline control table.
    pub special: Special,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DropReason {
    /// No FIB entry matches.
    NoRoute,
    /// Entry exists but the strategy found no usable face.
    NoValidFace,
    /// Discovery Interest brought no sequence progression.
    StaleDiscovery,
    /// Discovery needed but the node has no neighbor links.
    NoNeighbors,
    /// Nonce already in the PIT.
    Duplicate,
    /// Tunnel endpoint without a producer binding, or the bound face is down.
    NoBinding,
    /// Trace points at a face that is down.
    StaleTrace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Notice {
    /// Malformed update (missing or zero sequence number).
    ProtocolError,
    /// Retransmissions exhausted for a pending record.
    GiveUp { prefix: Name, face: FaceId },
    InterestDropped {
        tag: Option<PacketTag>,
        reason: DropReason,
    },
    /// Data with no matching PIT entry.
    UnsolicitedData { tag: Option<PacketTag> },
    /// FIB state for a prefix changed (next hops or sequence number).
    FibChanged { prefix: Name },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Send { face: FaceId, msg: Message },
    ArmTimer {
        key: TimerKey,
        generation: u64,
        after: SimTime,
    },
    Notice(Notice),
}

/// Outcome of Interest forwarding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterestDecision {
    ForwardedVia(FaceId),
    /// Copies sent on every listed face: a tagged discovery Interest over
    /// neighbor links, or a trace-plus-FIB multicast.
    Broadcast(Vec<FaceId>),
    Dropped(DropReason),
}

#[derive(Debug, Clone, Copy)]
struct RttEstimate {
    srtt_us: f64,
}

#[derive(Debug, Clone)]
pub struct NodeEngine {
    pub id: NodeId,
    pub class: RouterClass,
    faces: Vec<Face>,
    pub fib: Fib,
    pub pit: Pit,
    pub cs: ContentStore,
    pub config: ForwarderConfig,
    pub mode: InterestMode,
    pub validity: ValidityHook,
    /// Next-hop face toward every other node, for anchor tunnels.
    pub unicast: Vec<Option<FaceId>>,
    pub anchor: AnchorTables,
    pub traces: TraceTable,
    /// Pending acknowledgements of baseline control messages.
    pub ctl_pending: BTreeMap<(Name, FaceId), Pending>,
    next_generation: u64,
    rtt: BTreeMap<FaceId, RttEstimate>,
    sent_at: BTreeMap<(Name, FaceId), SimTime>,
}

impl NodeEngine {
    pub fn new(id: NodeId, class: RouterClass, config: ForwarderConfig) -> Self {
        NodeEngine {
            id,
            class,
            faces: Vec::new(),
            fib: Fib::new(),
            pit: Pit::new(),
            cs: ContentStore::with_capacity(config.cs_capacity),
            config,
            mode: InterestMode::Fib,
            validity: accept_all,
            unicast: Vec::new(),
            anchor: AnchorTables::default(),
            traces: TraceTable::default(),
            ctl_pending: BTreeMap::new(),
            next_generation: 1,
            rtt: BTreeMap::new(),
            sent_at: BTreeMap::new(),
        }
    }

    pub fn add_face(&mut self, kind: FaceKind, link: LinkId, peer: Peer) -> FaceId {
        let id = FaceId(self.faces.len() as u32);
        self.faces.push(Face {
            id,
            kind,
            state: FaceState::Up,
            link,
            peer,
        });
        id
    }

    pub fn face(&self, id: FaceId) -> &Face {
        &self.faces[id.index()]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn set_face_state(&mut self, id: FaceId, state: FaceState) {
        self.faces[id.index()].state = state;
    }

    pub fn is_up(&self, id: FaceId) -> bool {
        self.faces.get(id.index()).is_some_and(Face::is_up)
    }

    pub fn neighbor_faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.faces
            .iter()
            .filter(|f| f.kind == FaceKind::Neighbor && f.is_up())
            .map(|f| f.id)
    }

    pub fn has_neighbor_links(&self) -> bool {
        self.faces.iter().any(|f| f.kind == FaceKind::Neighbor)
    }

    /// `true` iff at least one next hop of `entry` is up.
    pub fn has_valid_face(&self, entry: &FibEntry) -> bool {
        entry.nexthops.iter().any(|&f| self.is_up(f))
    }

    fn fresh_generation(&mut self) -> u64 {
        let g = self.next_generation;
        self.next_generation += 1;
        g
    }

    fn retx_timeout_for(&self, face: FaceId) -> SimTime {
        if !self.config.adaptive_retx {
            return self.config.retx_timeout;
        }
        match self.rtt.get(&face) {
            Some(r) => {
                let t = SimTime::from_micros((2.0 * r.srtt_us).round() as u64);
                t.max(SimTime::from_millis(2))
                    .min(self.config.retx_timeout + self.config.retx_timeout)
            }
            None => self.config.retx_timeout,
        }
    }

    /// Sends `msg` on `face` reliably: records (or replaces) the pending
    /// entry and arms a fresh timer. Faces that are down are skipped and any
    /// stale pending record on them is dropped.
    fn send_reliably(
        &mut self,
        prefix: &Name,
        face: FaceId,
        msg: Message,
        now: SimTime,
        out: &mut Vec<Action>,
    ) {
        let special = match msg.special {
            Special::Notification => Special::Notification,
            _ => Special::Update,
        };
        if !self.is_up(face) {
            if let Some(e) = self.fib.get_mut(prefix) {
                e.tfib.pending.remove(&face);
            }
            return;
        }
        let generation = self.fresh_generation();
        let after = self.retx_timeout_for(face);
        let Some(entry) = self.fib.get_mut(prefix) else {
            return;
        };
        entry.tfib.in_markers.remove(&face);
        entry.tfib.pending.insert(
            face,
            Pending {
                retries: 0,
                generation,
                message: msg.clone(),
            },
        );
        if self.config.adaptive_retx {
            self.sent_at.insert((prefix.clone(), face), now);
        }
        out.push(Action::Send { face, msg });
        out.push(Action::ArmTimer {
            key: TimerKey {
                prefix: prefix.clone(),
                face,
                special,
            },
            generation,
            after,
        });
    }

    /// Update processing for an Interest Update `u` received on `ingress`.
    ///
    /// Follows the versioned update rule: a fresher update takes over the
    /// entry and is propagated reliably along the previous next hops and any
    /// still-pending faces; an equal one adds `ingress` as an extra next hop;
    /// a stale one is sent back on `ingress` carrying the fresher sequence
    /// number. Updates with `seq >= entry.seq` are acknowledged.
    ///
    /// Two refinements keep the forwarding graph acyclic under concurrent
    /// updates: the pending-face resend skips `ingress`, and a pending record
    /// on `ingress` is cancelled when `ingress` becomes the new next hop.
    pub fn forward_update(
        &mut self,
        u: Message,
        ingress: FaceId,
        now: SimTime,
        out: &mut Vec<Action>,
    ) {
        if !(self.validity)(&u, ingress) {
            return;
        }
        let seq = match u.seq {
            Some(s) if s > SeqNum::ROUTING => s,
            _ => {
                out.push(Action::Notice(Notice::ProtocolError));
                return;
            }
        };
        let prefix = self.entry_prefix_or_create(&u.name, ingress);

        let entry_seq = self.fib.get(&prefix).map(|e| e.seq).unwrap_or_default();
        if seq >= entry_seq {
            out.push(Action::Send {
                face: ingress,
                msg: Message::ack(u.name.clone(), seq, Special::Update),
            });
        }

        if seq > entry_seq {
            let (pending_faces, nexthops) = {
                let e = self.fib.get_mut(&prefix).expect("entry exists");
                e.seq = seq;
                e.seq_hops = u.hops;
                // faces displaced by a notification still lead to where the
                // rest of the network last saw the producer
                let markers = std::mem::take(&mut e.tfib.in_markers);
                let mut nexthops = e.nexthops.clone();
                nexthops.extend(markers.into_iter().filter(|f| !e.nexthops.contains(f)));
                let p: Vec<FaceId> = e.tfib.pending.keys().copied().collect();
                (p, nexthops)
            };
            let fwd = u.forwarded();
            let mut sent: Vec<FaceId> = Vec::new();
            for f in pending_faces {
                if f == ingress {
                    continue;
                }
                self.send_reliably(&prefix, f, fwd.clone(), now, out);
                sent.push(f);
            }
            let mut ingress_is_nexthop = false;
            let current = self.fib.get(&prefix).map(|e| e.nexthops.clone()).unwrap_or_default();
            for f in nexthops {
                if f == ingress {
                    ingress_is_nexthop |= current.contains(&f);
                    continue;
                }
                if sent.contains(&f) {
                    continue;
                }
                self.send_reliably(&prefix, f, fwd.clone(), now, out);
                sent.push(f);
            }
            let e = self.fib.get_mut(&prefix).expect("entry exists");
            if !ingress_is_nexthop {
                e.tfib.pending.remove(&ingress);
                e.nexthops = vec![ingress];
            }
            out.push(Action::Notice(Notice::FibChanged { prefix }));
        } else if seq == entry_seq {
            let e = self.fib.get_mut(&prefix).expect("entry exists");
            if !e.nexthops.contains(&ingress) {
                e.add_nexthop(ingress);
                out.push(Action::Notice(Notice::FibChanged { prefix }));
            }
        } else {
            // the correction continues the newer update from here
            let seq_hops = self.fib.get(&prefix).map_or(0, |e| e.seq_hops);
            let mut back = u.forwarded();
            back.seq = Some(entry_seq);
            back.origin = entry_seq.0;
            back.hops = seq_hops.saturating_add(1);
            self.send_reliably(&prefix, ingress, back, now, out);
        }
    }

    /// Finds the entry matching `name`, creating `name -> [ingress]` at
    /// sequence 0 when nothing matches. Returns the entry's prefix.
    fn entry_prefix_or_create(&mut self, name: &Name, ingress: FaceId) -> Name {
        match self.fib.longest_prefix_match(name) {
            Some(e) => e.prefix.clone(),
            None => {
                self.fib
                    .insert(FibEntry::new(name.clone(), vec![ingress], SeqNum::ROUTING));
                name.clone()
            }
        }
    }

    /// Interest Notification received from the attached producer on
    /// `ingress`. Same versioning as updates, but nothing is propagated; the
    /// replaced next hops are kept as zero-timer markers.
    pub fn in_apply(&mut self, n: Message, ingress: FaceId, now: SimTime, out: &mut Vec<Action>) {
        if !(self.validity)(&n, ingress) {
            return;
        }
        let seq = match n.seq {
            Some(s) if s > SeqNum::ROUTING => s,
            _ => {
                out.push(Action::Notice(Notice::ProtocolError));
                return;
            }
        };
        let prefix = self.entry_prefix_or_create(&n.name, ingress);
        let entry_seq = self.fib.get(&prefix).map(|e| e.seq).unwrap_or_default();
        if seq >= entry_seq {
            out.push(Action::Send {
                face: ingress,
                msg: Message::ack(n.name.clone(), seq, Special::Notification),
            });
        }
        if seq > entry_seq {
            let e = self.fib.get_mut(&prefix).expect("entry exists");
            e.seq = seq;
            e.seq_hops = n.hops;
            let old = std::mem::replace(&mut e.nexthops, vec![ingress]);
            e.tfib.pending.remove(&ingress);
            e.tfib.in_markers.clear();
            for f in old {
                if f != ingress && !e.tfib.pending.contains_key(&f) {
                    e.tfib.in_markers.insert(f);
                }
            }
            out.push(Action::Notice(Notice::FibChanged { prefix }));
        } else if seq == entry_seq {
            let e = self.fib.get_mut(&prefix).expect("entry exists");
            if !e.nexthops.contains(&ingress) {
                e.add_nexthop(ingress);
                out.push(Action::Notice(Notice::FibChanged { prefix }));
            }
        } else {
            let mut back = n;
            back.seq = Some(entry_seq);
            self.send_reliably(&prefix, ingress, back, now, out);
        }
    }

    /// Removes the pending record acknowledged by `ack` on `face`. Idempotent.
    pub fn on_ack(&mut self, ack: &Message, face: FaceId, now: SimTime) {
        let Some(ack_seq) = ack.seq else { return };
        match ack.special {
            Special::Trace | Special::AnchorUpdate => {
                let key = (ack.name.clone(), face);
                if let Some(p) = self.ctl_pending.get(&key) {
                    if p.message.seq.unwrap_or_default() <= ack_seq {
                        self.ctl_pending.remove(&key);
                    }
                }
            }
            _ => {
                let Some(e) = self.fib.longest_prefix_match_mut(&ack.name) else {
                    return;
                };
                let acked = match e.tfib.pending.get(&face) {
                    Some(p) => p.message.seq.unwrap_or_default() <= ack_seq,
                    None => false,
                };
                if acked {
                    let p = e.tfib.pending.remove(&face).expect("checked");
                    if self.config.adaptive_retx && p.retries == 0 {
                        let prefix = e.prefix.clone();
                        if let Some(t0) = self.sent_at.remove(&(prefix, face)) {
                            let sample = (now - t0).as_micros() as f64;
                            let est = self.rtt.entry(face).or_insert(RttEstimate { srtt_us: sample });
                            est.srtt_us = 0.875 * est.srtt_us + 0.125 * sample;
                        }
                    }
                }
            }
        }
    }

    /// Retransmission timer expiry. Stale generations are ignored.
    pub fn on_retx_timeout(
        &mut self,
        key: &TimerKey,
        generation: u64,
        _now: SimTime,
        out: &mut Vec<Action>,
    ) {
        let up = self.is_up(key.face);
        let max_retries = self.config.max_retries;
        let after = self.retx_timeout_for(key.face);
        let fresh = self.next_generation;
        let (pending, entry_seq) = match key.special {
            Special::Trace | Special::AnchorUpdate => {
                (self.ctl_pending.get_mut(&(key.prefix.clone(), key.face)), None)
            }
            _ => match self.fib.get_mut(&key.prefix) {
                Some(e) => (e.tfib.pending.get_mut(&key.face), Some((e.seq, e.seq_hops))),
                None => (None, None),
            },
        };
        let Some(p) = pending else { return };
        if p.generation != generation {
            return;
        }
        if !up || p.retries >= max_retries {
            match key.special {
                Special::Trace | Special::AnchorUpdate => {
                    self.ctl_pending.remove(&(key.prefix.clone(), key.face));
                }
                _ => {
                    if let Some(e) = self.fib.get_mut(&key.prefix) {
                        e.tfib.pending.remove(&key.face);
                    }
                }
            }
            if up {
                out.push(Action::Notice(Notice::GiveUp {
                    prefix: key.prefix.clone(),
                    face: key.face,
                }));
            }
            return;
        }
        p.retries += 1;
        p.generation = fresh;
        if let Some((s, hops)) = entry_seq {
            if p.message.seq != Some(s) {
                p.message.seq = Some(s);
                p.message.origin = s.0;
                p.message.hops = hops.saturating_add(1);
            }
        }
        let msg = p.message.clone();
        self.next_generation += 1;
        out.push(Action::Send {
            face: key.face,
            msg,
        });
        out.push(Action::ArmTimer {
            key: key.clone(),
            generation: fresh,
            after,
        });
    }

    /// Interest forwarding decision for a consumer Interest (regular or
    /// discovery) that already passed CS/PIT processing. Never mutates FIB
    /// state; may rewrite `msg.seq` (cleared on discovery progression, set to
    /// the entry's sequence number when broadcasting).
    pub fn forward_interest(&self, msg: &mut Message, ingress: Option<FaceId>) -> InterestDecision {
        let Some(entry) = self.fib.longest_prefix_match(&msg.name) else {
            return InterestDecision::Dropped(DropReason::NoRoute);
        };
        if let Some(s) = msg.seq {
            if s >= entry.seq {
                return InterestDecision::Dropped(DropReason::StaleDiscovery);
            }
            msg.seq = None;
            msg.special = Special::None;
        }
        if self.has_valid_face(entry) {
            return match self.strategy_choice(entry, ingress) {
                Some(f) => InterestDecision::ForwardedVia(f),
                None => InterestDecision::Dropped(DropReason::NoValidFace),
            };
        }
        if !self.config.discovery {
            return InterestDecision::Dropped(DropReason::NoValidFace);
        }
        let neighbors: Vec<FaceId> = self
            .neighbor_faces()
            .filter(|&f| Some(f) != ingress)
            .collect();
        if neighbors.is_empty() {
            return InterestDecision::Dropped(DropReason::NoNeighbors);
        }
        msg.seq = Some(entry.seq);
        msg.special = Special::Discovery;
        InterestDecision::Broadcast(neighbors)
    }

    /// Routing decision for a consumer Interest under the node's
    /// [`InterestMode`].
    pub fn route_interest(
        &self,
        msg: &mut Message,
        ingress: Option<FaceId>,
        now: SimTime,
    ) -> InterestDecision {
        match self.mode {
            InterestMode::Fib => self.forward_interest(msg, ingress),
            InterestMode::TraceThenFib => self.route_via_trace(msg, ingress, now),
            InterestMode::Anchor => self.route_via_anchor(msg, ingress),
        }
    }

    /// Best-face strategy: first up next hop other than the ingress face.
    pub(crate) fn strategy_choice(&self, entry: &FibEntry, ingress: Option<FaceId>) -> Option<FaceId> {
        entry
            .nexthops
            .iter()
            .copied()
            .find(|&f| Some(f) != ingress && self.is_up(f))
    }

    fn discovery_progressed(&self, msg: &Message) -> bool {
        if msg.special != Special::Discovery || self.mode != InterestMode::Fib {
            return false;
        }
        match (msg.seq, self.fib.longest_prefix_match(&msg.name)) {
            (Some(s), Some(e)) => e.seq > s,
            _ => false,
        }
    }

    /// Full consumer-Interest pipeline: CS, PIT, then forwarding.
    pub fn on_interest(
        &mut self,
        mut msg: Message,
        ingress: FaceId,
        now: SimTime,
        out: &mut Vec<Action>,
    ) {
        if let Some(d) = self.cs.lookup(&msg.name) {
            let mut d = d.clone();
            d.tag = msg.tag;
            d.hops = msg.hops;
            out.push(Action::Send {
                face: ingress,
                msg: d,
            });
            return;
        }
        let key = pit_key(&msg);
        match self
            .pit
            .insert_or_aggregate(&key, msg.nonce, ingress, now, msg.lifetime)
        {
            PitInsert::New => {}
            PitInsert::Aggregated => return,
            PitInsert::Duplicate => {
                // a discovery copy of an Interest forwarded from here earlier
                // comes back after this node learned a newer location: let
                // it through once, as a regular Interest, toward that location
                if self.discovery_progressed(&msg) {
                    if let InterestDecision::ForwardedVia(face) = self.route_interest(&mut msg, Some(ingress), now) {
                        out.push(Action::Send {
                            face,
                            msg: msg.forwarded(),
                        });
                        return;
                    }
                }
                out.push(Action::Notice(Notice::InterestDropped {
                    tag: msg.tag,
                    reason: DropReason::Duplicate,
                }));
                return;
            }
        }
        match self.route_interest(&mut msg, Some(ingress), now) {
            InterestDecision::ForwardedVia(face) => out.push(Action::Send {
                face,
                msg: msg.forwarded(),
            }),
            InterestDecision::Broadcast(faces) => {
                let fwd = msg.forwarded();
                for face in faces {
                    out.push(Action::Send {
                        face,
                        msg: fwd.clone(),
                    });
                }
            }
            InterestDecision::Dropped(reason) => {
                out.push(Action::Notice(Notice::InterestDropped {
                    tag: msg.tag,
                    reason,
                }))
            }
        }
    }

    /// Reverse-path Data delivery: sends on every PIT in-face and consumes
    /// the entry; unsolicited Data is dropped.
    ///
    /// Tunnelled Data (carrying a locator) matches tunnelled PIT entries
    /// first; where the tunnel began, it falls back to the plain entry and
    /// drops the locator.
    pub fn forward_data(&mut self, mut d: Message, _ingress: FaceId, now: SimTime, out: &mut Vec<Action>) {
        let mut entry = self.pit.consume(&pit_key(&d), now);
        if entry.is_none() && d.locator.is_some() {
            entry = self.pit.consume(&d.name, now);
            if entry.is_some() {
                d.locator = None;
            }
        }
        let Some(entry) = entry else {
            out.push(Action::Notice(Notice::UnsolicitedData { tag: d.tag }));
            return;
        };
        self.cs.insert(&d);
        for (face, _) in entry.in_faces {
            out.push(Action::Send {
                face,
                msg: d.clone(),
            });
        }
    }

    /// Dispatches a received message to its handler.
    pub fn receive(&mut self, msg: Message, ingress: FaceId, now: SimTime, out: &mut Vec<Action>) {
        match (msg.kind, msg.special) {
            (MessageKind::Ack, _) => self.on_ack(&msg, ingress, now),
            (MessageKind::Data, _) => self.forward_data(msg, ingress, now, out),
            (MessageKind::Interest, Special::Update) => self.forward_update(msg, ingress, now, out),
            (MessageKind::Interest, Special::Notification) => self.in_apply(msg, ingress, now, out),
            (MessageKind::Interest, Special::Trace | Special::KeepAlive) => {
                self.on_trace(msg, ingress, now, out)
            }
            (MessageKind::Interest, Special::AnchorUpdate) => {
                self.on_anchor_update(msg, ingress, now, out)
            }
            (MessageKind::Interest, Special::None | Special::Discovery) => {
                self.on_interest(msg, ingress, now, out)
            }
        }
    }

    /// Number of live pending records (TFIB plus baseline control) for
    /// `prefix`.
    pub fn pending_count(&self, prefix: &Name) -> usize {
        let tfib = self.fib.get(prefix).map_or(0, |e| e.tfib.pending.len());
        let ctl = self
            .ctl_pending
            .keys()
            .filter(|(p, _)| p == prefix)
            .count();
        tfib + ctl
    }

    /// Reliable send for baseline control messages (trace, anchor update).
    pub(crate) fn send_control_reliably(
        &mut self,
        face: FaceId,
        msg: Message,
        now: SimTime,
        out: &mut Vec<Action>,
    ) {
        let _ = now;
        if !self.is_up(face) {
            return;
        }
        let generation = self.fresh_generation();
        let key = TimerKey {
            prefix: msg.name.clone(),
            face,
            special: msg.special,
        };
        self.ctl_pending.insert(
            (msg.name.clone(), face),
            Pending {
                retries: 0,
                generation,
                message: msg.clone(),
            },
        );
        out.push(Action::Send { face, msg });
        out.push(Action::ArmTimer {
            key,
            generation,
            after: self.config.retx_timeout,
        });
    }
}

/// PIT key of an Interest or Data. Tunnelled packets are kept apart from
/// plain ones so that a tunnel crossing its own upstream path is not taken
/// for a loop.
pub fn pit_key(msg: &Message) -> Name {
    match msg.locator {
        None => msg.name.clone(),
        Some(l) => {
            let tag = format!("\u{0}tunnel{}", l.0);
            Name::from_components(
                std::iter::once(tag.as_bytes()).chain(msg.name.components()),
            )
        }
    }
}
