//! Discrete-event simulation of routers, links and stations.
//!
//! [`Simulation`] owns one [`NodeEngine`] per router, the link models, the
//! stations (producers and consumers) and the event queue. Control messages
//! (updates, notifications, acks, traces) bypass data-plane queues and only
//! pay serialization and propagation; Interests and Data share a drop-tail
//! FIFO per link direction.
//!
//! A station's first mobility message after an association is carried by
//! the association itself: it is processed at the point of attachment at
//! the instant the attachment completes.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forwarder::{Action, DropReason, ForwarderConfig, InterestDecision, InterestMode, NodeEngine, Notice, TimerKey};
use crate::ids::{FaceId, LinkId, NodeId, StationId};
use crate::metrics::ledger::{HandoffRecord, LossCause, MetricsLedger, SignalKind, Sink};
use crate::mobility::handoff::HandoffRule;
use crate::mobility::rwp::RwpGeometric;
use crate::mobility::trace::{interpolate, TrackPoint};
use crate::name::Name;
use crate::protocol::global;
use crate::protocol::{
    mapme_deferred_update, mapme_on_attach, mapme_update_due, MapMeConfig, ProducerState, ProtocolKind,
};
use crate::sim::event::EventQueue;
use crate::sim::topology::{LinkKind, LinkParams, Topology};
use crate::tables::{FaceKind, FaceState, FibEntry, Message, MessageKind, PacketTag, Peer, SeqNum, Special};
use crate::time::SimTime;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub protocol: ProtocolKind,
    pub retx_timeout: SimTime,
    pub max_retries: u32,
    pub adaptive_retx: bool,
    pub cs_capacity: usize,
    /// Update period cap for the full forwarding-update protocol.
    pub t_u: SimTime,
    /// Keep-alive period of the trace-based baseline.
    pub t_ka: SimTime,
    /// Trace lifetime as a multiple of `t_ka`.
    pub trace_lifetime_factor: u32,
    /// Per-hop rewrite delay for global routing; `None` is instantaneous.
    pub gr_per_hop: Option<SimTime>,
    /// Anchor / rendezvous node; defaults to the topology root.
    pub anchor: Option<NodeId>,
    pub wireless: LinkParams,
    pub l2_gap: SimTime,
    pub mobility_step: SimTime,
    pub handoff: HandoffRule,
    pub interest_lifetime: SimTime,
    /// Observations before this instant are not recorded.
    pub warmup: SimTime,
    pub track_latency: bool,
    pub track_updates: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            protocol: ProtocolKind::MapMe,
            retx_timeout: SimTime::from_millis(60),
            max_retries: 8,
            adaptive_retx: false,
            cs_capacity: 0,
            t_u: SimTime::from_secs(1),
            t_ka: SimTime::from_millis(500),
            trace_lifetime_factor: 3,
            gr_per_hop: None,
            anchor: None,
            wireless: LinkParams::wireless_default(),
            l2_gap: SimTime::from_millis(50),
            mobility_step: SimTime::from_millis(20),
            handoff: HandoffRule::default(),
            interest_lifetime: SimTime::from_millis(4000),
            warmup: SimTime::ZERO,
            track_latency: true,
            track_updates: false,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn mapme_config(&self) -> MapMeConfig {
        match self.protocol {
            ProtocolKind::MapMeIu => MapMeConfig {
                retx_timeout: self.retx_timeout,
                ..MapMeConfig::updates_only()
            },
            _ => MapMeConfig {
                retx_timeout: self.retx_timeout,
                ..MapMeConfig::full(self.t_u)
            },
        }
    }
}

#[derive(Debug, Clone)]
pub enum Motion {
    Static,
    Rwp(RwpGeometric),
    /// Trace samples with time in seconds from the start of the run.
    Track(Vec<TrackPoint>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlayoutConfig {
    pub chunk_interval: SimTime,
    pub buffer: SimTime,
    pub resume: SimTime,
    /// Interest lifetime and retransmission period for missing chunks.
    pub retx_after: SimTime,
}

impl Default for PlayoutConfig {
    fn default() -> Self {
        PlayoutConfig {
            chunk_interval: SimTime::from_millis(10),
            buffer: SimTime::from_secs(5),
            resume: SimTime::from_secs(3),
            retx_after: SimTime::from_secs(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Traffic {
    None,
    /// One Interest every `interval`.
    Cbr { interval: SimTime },
    /// Streaming with a play-out buffer.
    Playout(PlayoutConfig),
}

#[derive(Debug, Clone)]
struct Outstanding {
    issued: SimTime,
    counted: bool,
    chunk: Option<u64>,
}

#[derive(Debug, Clone, Default)]
struct PlayoutState {
    session: u64,
    next_chunk: u64,
    /// Chunk id -> received.
    received: BTreeMap<u64, bool>,
    deadlines: BTreeMap<u64, SimTime>,
}

#[derive(Debug, Clone)]
pub struct ConsumerState {
    pub producer: StationId,
    pub prefix: Name,
    pub traffic: Traffic,
    next_req: u64,
    next_chunk_id: u64,
    outstanding: BTreeMap<u64, Outstanding>,
    playout: PlayoutState,
}

#[derive(Debug, Clone)]
pub enum Role {
    Producer(ProducerState),
    Consumer(ConsumerState),
}

#[derive(Debug, Clone)]
pub struct Station {
    pub id: StationId,
    pub role: Role,
    pub attached: Option<NodeId>,
    pub associating: Option<NodeId>,
    pub pos: Option<[f64; 2]>,
    motion: Motion,
    epoch: u64,
    rng: ChaCha8Rng,
    keepalive_running: bool,
}

impl Station {
    pub fn producer(&self) -> Option<&ProducerState> {
        match &self.role {
            Role::Producer(p) => Some(p),
            Role::Consumer(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    Node(NodeId, FaceId),
    Station(StationId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LinkClass {
    Wired,
    Neighbor,
    Wireless,
}

#[derive(Debug, Clone)]
struct LinkRt {
    class: LinkClass,
    ends: [End; 2],
    params: LinkParams,
    busy: [SimTime; 2],
    backlog: [VecDeque<SimTime>; 2],
    bytes: [u64; 2],
}

enum TxDrop {
    Random,
    Congestion,
}

#[derive(Debug, Clone)]
enum Event {
    Deliver {
        link: LinkId,
        dir: u8,
        msg: Message,
        epoch: u64,
    },
    NodeTimer {
        node: NodeId,
        key: TimerKey,
        generation: u64,
    },
    Move {
        station: StationId,
        to: NodeId,
        gap: SimTime,
    },
    Attach {
        station: StationId,
        ap: NodeId,
        epoch: u64,
    },
    MobilityStep {
        station: StationId,
    },
    ConsumerTick {
        station: StationId,
        session: u64,
    },
    InterestTimeout {
        station: StationId,
        req: u64,
    },
    PlayDeadline {
        station: StationId,
        chunk: u64,
        session: u64,
    },
    KeepAlive {
        station: StationId,
    },
    OwedUpdate {
        station: StationId,
        epoch: u64,
    },
    GrApply {
        node: NodeId,
        station: StationId,
        poa: NodeId,
        via: Option<LinkId>,
        stamp: SeqNum,
    },
}

#[derive(Debug, Clone)]
struct PendingHandoff {
    record: usize,
    producer: StationId,
}

pub struct Simulation {
    pub cfg: SimConfig,
    pub topo: Topology,
    nodes: Vec<NodeEngine>,
    links: Vec<LinkRt>,
    /// Face at each end of every topology link.
    link_faces: Vec<[FaceId; 2]>,
    assoc: BTreeMap<(StationId, NodeId), (LinkId, FaceId)>,
    stations: Vec<Station>,
    consumers_of: BTreeMap<StationId, Vec<StationId>>,
    queue: EventQueue<Event>,
    loss_rng: ChaCha8Rng,
    seed_rng: ChaCha8Rng,
    pub ledger: MetricsLedger,
    first_drop: HashMap<PacketTag, LossCause>,
    pending_handoffs: Vec<PendingHandoff>,
    latency_dirty: bool,
    changed: bool,
    inflight_control: u64,
    iu_hops: BTreeMap<(Name, u64), u16>,
    unicast_ready: bool,
    scratch: Vec<Action>,
}

impl Simulation {
    pub fn new(topo: Topology, cfg: SimConfig) -> Self {
        let mut seed_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let loss_rng = ChaCha8Rng::seed_from_u64(seed_rng.gen());
        let fcfg = ForwarderConfig {
            retx_timeout: cfg.retx_timeout,
            max_retries: cfg.max_retries,
            adaptive_retx: cfg.adaptive_retx,
            discovery: cfg.protocol == ProtocolKind::MapMe && cfg.mapme_config().enable_discovery,
            cs_capacity: cfg.cs_capacity,
        };
        let mode = match cfg.protocol {
            ProtocolKind::Anchor => InterestMode::Anchor,
            ProtocolKind::Tracing => InterestMode::TraceThenFib,
            _ => InterestMode::Fib,
        };
        let mut nodes: Vec<NodeEngine> = topo
            .nodes
            .iter()
            .map(|n| {
                let mut e = NodeEngine::new(n.id, n.class, fcfg.clone());
                e.mode = mode;
                e.traces.lifetime = SimTime::from_micros(cfg.t_ka.as_micros() * cfg.trace_lifetime_factor as u64);
                e
            })
            .collect();
        let mut links = Vec::with_capacity(topo.links.len());
        let mut link_faces = Vec::with_capacity(topo.links.len());
        for l in &topo.links {
            let kind = match l.kind {
                LinkKind::Wired => FaceKind::Wired,
                LinkKind::Neighbor => FaceKind::Neighbor,
            };
            let fa = nodes[l.a.index()].add_face(kind, l.id, Peer::Node(l.b));
            let fb = nodes[l.b.index()].add_face(kind, l.id, Peer::Node(l.a));
            link_faces.push([fa, fb]);
            links.push(LinkRt {
                class: match l.kind {
                    LinkKind::Wired => LinkClass::Wired,
                    LinkKind::Neighbor => LinkClass::Neighbor,
                },
                ends: [End::Node(l.a, fa), End::Node(l.b, fb)],
                params: l.params,
                busy: [SimTime::ZERO; 2],
                backlog: Default::default(),
                bytes: [0; 2],
            });
        }
        let ledger = MetricsLedger::default();
        Simulation {
            cfg,
            topo,
            nodes,
            links,
            link_faces,
            assoc: BTreeMap::new(),
            stations: Vec::new(),
            consumers_of: BTreeMap::new(),
            queue: EventQueue::new(),
            loss_rng,
            seed_rng,
            ledger,
            first_drop: HashMap::new(),
            pending_handoffs: Vec::new(),
            latency_dirty: false,
            changed: false,
            inflight_control: 0,
            iu_hops: BTreeMap::new(),
            unicast_ready: false,
            scratch: Vec::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.queue.now()
    }

    pub fn node(&self, n: NodeId) -> &NodeEngine {
        &self.nodes[n.index()]
    }

    pub fn nodes(&self) -> &[NodeEngine] {
        &self.nodes
    }

    pub fn station(&self, s: StationId) -> &Station {
        &self.stations[s.index()]
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    /// Highest router hop count reached by any copy of each update, keyed
    /// by prefix and the sequence number the producer gave it.
    pub fn iu_hops(&self) -> &BTreeMap<(Name, u64), u16> {
        &self.iu_hops
    }

    /// Face of `node` on topology link `link`.
    pub fn face_on_link(&self, node: NodeId, link: LinkId) -> FaceId {
        let l = &self.topo.links[link.index()];
        let [fa, fb] = self.link_faces[link.index()];
        if l.a == node {
            fa
        } else {
            fb
        }
    }

    /// Association face of `station` at `ap`, if it was ever created.
    pub fn assoc_face(&self, station: StationId, ap: NodeId) -> Option<FaceId> {
        self.assoc.get(&(station, ap)).map(|&(_, f)| f)
    }

    fn rebuild_unicast(&mut self) {
        if self.unicast_ready {
            return;
        }
        let n = self.topo.node_count();
        for v in self.nodes.iter_mut() {
            v.unicast = vec![None; n];
        }
        for d in 0..n {
            let tree = self.topo.shortest_path_tree(NodeId(d as u32));
            for u in 0..n {
                if let Some((_, l)) = tree.parent[u] {
                    let f = self.face_on_link(NodeId(u as u32), l);
                    self.nodes[u].unicast[d] = Some(f);
                }
            }
        }
        self.unicast_ready = true;
    }

    fn ensure_assoc(&mut self, s: StationId, ap: NodeId) -> (LinkId, FaceId) {
        if let Some(&v) = self.assoc.get(&(s, ap)) {
            return v;
        }
        let link = LinkId(self.links.len() as u32);
        let face = self.nodes[ap.index()].add_face(FaceKind::Association, link, Peer::Station(s));
        self.nodes[ap.index()].set_face_state(face, FaceState::Down);
        self.links.push(LinkRt {
            class: LinkClass::Wireless,
            ends: [End::Node(ap, face), End::Station(s)],
            params: self.cfg.wireless,
            busy: [SimTime::ZERO; 2],
            backlog: Default::default(),
            bytes: [0; 2],
        });
        self.assoc.insert((s, ap), (link, face));
        (link, face)
    }

    fn new_station(&mut self, role: Role, motion: Motion) -> StationId {
        let id = StationId(self.stations.len() as u32);
        let rng = ChaCha8Rng::seed_from_u64(self.seed_rng.gen());
        self.stations.push(Station {
            id,
            role,
            attached: None,
            associating: None,
            pos: None,
            motion,
            epoch: 0,
            rng,
            keepalive_running: false,
        });
        id
    }

    /// Adds a producer serving `prefix`, initially associated with
    /// `first_ap` (or, with a positional motion and `None`, the AP chosen by
    /// the handoff rule). Installs the initial routing state for the active
    /// protocol and attaches at the current instant.
    pub fn add_producer(&mut self, prefix: Name, first_ap: Option<NodeId>, motion: Motion) -> Result<StationId> {
        let id = self.new_station(Role::Producer(ProducerState::new(prefix.clone())), motion);
        self.init_position(id);
        let ap = match first_ap.or_else(|| self.select_ap(id)) {
            Some(ap) => ap,
            None => {
                return Err(crate::error::Error::Config(format!(
                    "producer {id} starts out of range of every access point"
                )))
            }
        };
        let (_, face) = self.ensure_assoc(id, ap);
        match self.cfg.protocol {
            ProtocolKind::MapMe | ProtocolKind::MapMeIu | ProtocolKind::GlobalRouting => {
                self.install_tree(&prefix, ap, Some(face));
            }
            ProtocolKind::Anchor | ProtocolKind::Tracing => {
                let anchor = self.cfg.anchor.or(self.topo.root).unwrap_or(NodeId(0));
                self.install_tree(&prefix, anchor, None);
                if self.cfg.protocol == ProtocolKind::Anchor {
                    self.rebuild_unicast();
                    for n in self.nodes.iter_mut() {
                        n.anchor.anchor_of.insert(prefix.clone(), anchor);
                    }
                } else {
                    self.nodes[anchor.index()].traces.rv_for.insert(prefix.clone());
                }
            }
        }
        let epoch = self.stations[id.index()].epoch;
        self.stations[id.index()].associating = Some(ap);
        self.schedule(self.now(), Event::Attach { station: id, ap, epoch })?;
        self.schedule_mobility(id)?;
        Ok(id)
    }

    /// Routing-installed entries (sequence 0) toward `root`; at the root the
    /// entry points at `root_face` if given, else has no next hop.
    fn install_tree(&mut self, prefix: &Name, root: NodeId, root_face: Option<FaceId>) {
        let tree = self.topo.shortest_path_tree(root);
        for u in 0..self.topo.node_count() {
            let node = NodeId(u as u32);
            let nexthops = match tree.parent[u] {
                Some((_, l)) => vec![self.face_on_link(node, l)],
                None if node == root => root_face.into_iter().collect(),
                None => continue,
            };
            self.nodes[u]
                .fib
                .insert(FibEntry::new(prefix.clone(), nexthops, SeqNum::ROUTING));
        }
    }

    /// Adds a consumer of `producer`'s prefix at `ap` (or at the AP chosen
    /// by the handoff rule for a positional motion).
    pub fn add_consumer(
        &mut self,
        producer: StationId,
        ap: Option<NodeId>,
        traffic: Traffic,
        motion: Motion,
    ) -> Result<StationId> {
        let prefix = self.stations[producer.index()]
            .producer()
            .expect("consumers follow a producer")
            .prefix
            .clone();
        let id = self.new_station(
            Role::Consumer(ConsumerState {
                producer,
                prefix,
                traffic,
                next_req: 0,
                next_chunk_id: 0,
                outstanding: BTreeMap::new(),
                playout: PlayoutState::default(),
            }),
            motion,
        );
        self.consumers_of.entry(producer).or_default().push(id);
        self.init_position(id);
        let ap = match ap.or_else(|| self.select_ap(id)) {
            Some(ap) => ap,
            None => {
                return Err(crate::error::Error::Config(format!(
                    "consumer {id} starts out of range of every access point"
                )))
            }
        };
        self.ensure_assoc(id, ap);
        let epoch = self.stations[id.index()].epoch;
        self.stations[id.index()].associating = Some(ap);
        self.schedule(self.now(), Event::Attach { station: id, ap, epoch })?;
        self.schedule_mobility(id)?;
        if traffic != Traffic::None {
            // first request one tick after start
            let at = self.now() + SimTime::from_millis(1);
            self.schedule(at, Event::ConsumerTick { station: id, session: 0 })?;
        }
        Ok(id)
    }

    fn init_position(&mut self, s: StationId) {
        let st = &mut self.stations[s.index()];
        st.pos = match &st.motion {
            Motion::Static => None,
            Motion::Rwp(r) => Some(r.pos),
            Motion::Track(t) => Some(interpolate(t, 0.0)),
        };
    }

    fn schedule_mobility(&mut self, s: StationId) -> Result<()> {
        if !matches!(self.stations[s.index()].motion, Motion::Static) {
            let at = self.now() + self.cfg.mobility_step;
            self.schedule(at, Event::MobilityStep { station: s })?;
        }
        Ok(())
    }

    /// Detaches `station` at `at` and associates it with `to` after `gap`.
    pub fn schedule_move(&mut self, station: StationId, at: SimTime, to: NodeId, gap: SimTime) -> Result<()> {
        self.schedule(at, Event::Move { station, to, gap })
    }

    fn schedule(&mut self, at: SimTime, e: Event) -> Result<()> {
        self.queue.schedule(at, e)
    }

    fn schedule_ok(&mut self, at: SimTime, e: Event) {
        self.queue.schedule(at, e).expect("events are scheduled at or after now");
    }

    pub fn pending_events(&self) -> usize {
        self.queue.len()
    }

    pub fn next_event_time(&self) -> Option<SimTime> {
        self.queue.peek_time()
    }

    /// Processes one event. Returns `false` when the queue is empty.
    pub fn step(&mut self) -> bool {
        let Some((_, e)) = self.queue.pop() else {
            return false;
        };
        self.handle(e);
        if self.latency_dirty {
            self.latency_dirty = false;
            self.check_handoffs();
        }
        true
    }

    /// Processes all events due by `t` and advances the clock to `t`.
    pub fn run_until(&mut self, t: SimTime) {
        while self.queue.peek_time().is_some_and(|at| at <= t) {
            self.step();
        }
        let _ = self.queue.run_until(t, |_, _, _| unreachable!("queue drained up to t"));
    }

    /// `true` once since the last call if routing state changed.
    pub fn take_changed(&mut self) -> bool {
        std::mem::take(&mut self.changed)
    }

    /// No control message in flight and no pending retransmission anywhere.
    pub fn is_quiescent(&self) -> bool {
        self.inflight_control == 0
            && self
                .nodes
                .iter()
                .all(|n| n.ctl_pending.is_empty() && n.fib.entries().all(|e| e.tfib.pending.is_empty()))
    }

    fn observing(&self) -> bool {
        self.now() >= self.cfg.warmup
    }

    fn handle(&mut self, e: Event) {
        match e {
            Event::Deliver { link, dir, msg, epoch } => self.deliver(link, dir as usize, msg, epoch),
            Event::NodeTimer { node, key, generation } => {
                let mut out = std::mem::take(&mut self.scratch);
                let now = self.now();
                self.nodes[node.index()].on_retx_timeout(&key, generation, now, &mut out);
                self.apply_actions(node, &mut out);
                self.scratch = out;
            }
            Event::Move { station, to, gap } => {
                self.detach(station);
                self.begin_association(station, to, gap);
            }
            Event::Attach { station, ap, epoch } => self.attach(station, ap, epoch),
            Event::MobilityStep { station } => self.mobility_step(station),
            Event::ConsumerTick { station, session } => self.consumer_tick(station, session),
            Event::InterestTimeout { station, req } => self.interest_timeout(station, req),
            Event::PlayDeadline { station, chunk, session } => self.play_deadline(station, chunk, session),
            Event::KeepAlive { station } => self.keepalive(station),
            Event::OwedUpdate { station, epoch } => self.owed_update(station, epoch),
            Event::GrApply {
                node,
                station,
                poa,
                via,
                stamp,
            } => self.gr_apply(node, station, poa, via, stamp),
        }
    }

    // ----- links -------------------------------------------------------

    fn sink_of(&self, end: End) -> Sink {
        match end {
            End::Node(n, _) => Sink::Router(self.topo.class(n)),
            End::Station(_) => Sink::Mobile,
        }
    }

    fn count_signal(&mut self, msg: &Message, sink: Sink) {
        if let Some(kind) = SignalKind::of(msg) {
            if self.observing() {
                self.ledger.record_signal(kind, sink);
            }
        }
    }

    /// Transmits `msg` from end `1 - dir`... i.e. from `ends[dir]` to the
    /// other end of `link`.
    fn transmit(&mut self, link: LinkId, dir: usize, msg: Message, epoch: u64) {
        let now = self.now();
        let receiver = self.links[link.index()].ends[1 - dir];
        let sink = self.sink_of(receiver);
        self.count_signal(&msg, sink);
        let control = msg.is_control();
        let size = msg.size_bytes();
        let l = &mut self.links[link.index()];
        let p = l.params;
        let loss = if control {
            1.0 - (1.0 - p.loss) * (1.0 - p.control_loss)
        } else {
            p.loss
        };
        let mut outcome: std::result::Result<SimTime, TxDrop> = Ok(SimTime::ZERO);
        if loss > 0.0 && self.loss_rng.gen::<f64>() < loss {
            outcome = Err(TxDrop::Random);
        }
        if outcome.is_ok() {
            let ser = SimTime::serialization(size, p.capacity_bps);
            if control {
                outcome = Ok(now + ser + p.delay);
            } else {
                let q = &mut l.backlog[dir];
                while q.front().is_some_and(|&t| t <= now) {
                    q.pop_front();
                }
                if p.queue_limit.is_some_and(|lim| q.len() >= lim) {
                    outcome = Err(TxDrop::Congestion);
                } else {
                    let start = now.max(l.busy[dir]);
                    let done = start + ser;
                    l.busy[dir] = done;
                    q.push_back(done);
                    outcome = Ok(done + p.delay);
                }
            }
        }
        let class = l.class;
        match outcome {
            Ok(at) => {
                if class != LinkClass::Wireless {
                    l.bytes[dir] += size as u64;
                }
                if control {
                    self.inflight_control += 1;
                }
                self.schedule_ok(
                    at,
                    Event::Deliver {
                        link,
                        dir: dir as u8,
                        msg,
                        epoch,
                    },
                );
            }
            Err(kind) => {
                if let Some(tag) = msg.tag {
                    let cause = match (kind, class) {
                        (TxDrop::Congestion, _) => LossCause::Congestion,
                        (TxDrop::Random, LinkClass::Wireless) => LossCause::Wireless,
                        (TxDrop::Random, _) => LossCause::Timeout,
                    };
                    self.first_drop.entry(tag).or_insert(cause);
                }
            }
        }
    }

    fn send_from_node(&mut self, node: NodeId, face: FaceId, msg: Message) {
        let f = self.nodes[node.index()].face(face);
        if !f.is_up() {
            if let Some(tag) = msg.tag {
                self.first_drop.entry(tag).or_insert(LossCause::Wireless);
            }
            return;
        }
        let link = f.link;
        let dir = match self.links[link.index()].ends[0] {
            End::Node(n, fc) if n == node && fc == face => 0,
            _ => 1,
        };
        let epoch = match f.peer {
            Peer::Station(s) => self.stations[s.index()].epoch,
            Peer::Node(_) => 0,
        };
        self.transmit(link, dir, msg, epoch);
    }

    fn send_from_station(&mut self, s: StationId, msg: Message) {
        let st = &self.stations[s.index()];
        let Some(ap) = st.attached else {
            if let Some(tag) = msg.tag {
                self.first_drop.entry(tag).or_insert(LossCause::Wireless);
            }
            return;
        };
        let epoch = st.epoch;
        let (link, _) = self.assoc[&(s, ap)];
        self.transmit(link, 1, msg, epoch);
    }

    fn deliver(&mut self, link: LinkId, dir: usize, msg: Message, epoch: u64) {
        if msg.is_control() {
            self.inflight_control -= 1;
        }
        let to = self.links[link.index()].ends[1 - dir];
        let from = self.links[link.index()].ends[dir];
        // association churn: anything sent under an older association is lost
        let stale = match (from, to) {
            (End::Station(s), _) | (_, End::Station(s)) => self.stations[s.index()].epoch != epoch,
            _ => false,
        };
        if stale {
            if let Some(tag) = msg.tag {
                self.first_drop.entry(tag).or_insert(LossCause::Wireless);
            }
            return;
        }
        match to {
            End::Node(node, face) => self.node_receive(node, face, msg),
            End::Station(s) => self.station_receive(s, msg),
        }
    }

    // ----- routers -----------------------------------------------------

    fn node_receive(&mut self, node: NodeId, face: FaceId, msg: Message) {
        if self.cfg.track_updates && msg.kind == MessageKind::Interest && msg.special == Special::Update {
            let e = self.iu_hops.entry((msg.name.clone(), msg.origin)).or_insert(0);
            *e = (*e).max(msg.hops);
        }
        let mut out = std::mem::take(&mut self.scratch);
        let now = self.now();
        self.nodes[node.index()].receive(msg, face, now, &mut out);
        self.apply_actions(node, &mut out);
        self.scratch = out;
    }

    /// A mobility message carried by the association: counted as received
    /// at the point of attachment and processed there immediately.
    fn inject(&mut self, ap: NodeId, face: FaceId, msg: Message) {
        let sink = Sink::Router(self.topo.class(ap));
        self.count_signal(&msg, sink);
        self.node_receive(ap, face, msg);
    }

    fn apply_actions(&mut self, node: NodeId, out: &mut Vec<Action>) {
        let now = self.now();
        let actions: Vec<Action> = std::mem::take(out);
        for a in actions {
            match a {
                Action::Send { face, msg } => self.send_from_node(node, face, msg),
                Action::ArmTimer { key, generation, after } => {
                    self.schedule_ok(now + after, Event::NodeTimer { node, key, generation })
                }
                Action::Notice(n) => self.notice(n),
            }
        }
    }

    fn notice(&mut self, n: Notice) {
        match n {
            Notice::ProtocolError => self.ledger.protocol_errors += 1,
            Notice::GiveUp { .. } => self.ledger.give_ups += 1,
            Notice::FibChanged { .. } => {
                self.latency_dirty = true;
                self.changed = true;
            }
            Notice::UnsolicitedData { .. } => {}
            Notice::InterestDropped { tag, reason } => {
                let Some(tag) = tag else { return };
                if reason == DropReason::Duplicate {
                    return;
                }
                let cause = if self.producer_detached(tag.consumer) {
                    LossCause::Wireless
                } else {
                    LossCause::Mobility
                };
                self.first_drop.entry(tag).or_insert(cause);
            }
        }
    }

    fn producer_detached(&self, consumer: StationId) -> bool {
        match &self.stations.get(consumer.index()).map(|s| &s.role) {
            Some(Role::Consumer(c)) => self.stations[c.producer.index()].attached.is_none(),
            _ => false,
        }
    }

    // ----- stations ----------------------------------------------------

    fn station_receive(&mut self, s: StationId, msg: Message) {
        let now = self.now();
        match (&self.stations[s.index()].role, msg.kind) {
            (Role::Producer(_), MessageKind::Interest) if !msg.is_control() => {
                let d = Message::data_for(&msg, now);
                self.send_from_station(s, d);
            }
            (Role::Consumer(_), MessageKind::Data) => self.consumer_data(s, msg),
            _ => {}
        }
    }

    fn detach(&mut self, s: StationId) {
        let st = &mut self.stations[s.index()];
        st.associating = None;
        let Some(ap) = st.attached.take() else { return };
        st.epoch += 1;
        if let Some(&(_, face)) = self.assoc.get(&(s, ap)) {
            self.nodes[ap.index()].set_face_state(face, FaceState::Down);
        }
        self.changed = true;
    }

    fn owed_update(&mut self, s: StationId, epoch: u64) {
        let now = self.now();
        let st = &mut self.stations[s.index()];
        let Some(ap) = st.attached else { return };
        if st.epoch != epoch {
            return;
        }
        let Role::Producer(p) = &mut st.role else { return };
        let Some(m) = mapme_deferred_update(p, now) else { return };
        let face = self.assoc[&(s, ap)].1;
        self.inject(ap, face, m);
    }

    fn begin_association(&mut self, s: StationId, ap: NodeId, gap: SimTime) {
        let st = &mut self.stations[s.index()];
        st.associating = Some(ap);
        let epoch = st.epoch;
        let at = self.now() + gap;
        self.schedule_ok(at, Event::Attach { station: s, ap, epoch });
    }

    fn attach(&mut self, s: StationId, ap: NodeId, epoch: u64) {
        {
            let st = &self.stations[s.index()];
            if st.epoch != epoch || st.associating != Some(ap) || st.attached.is_some() {
                return;
            }
        }
        let (_, face) = self.ensure_assoc(s, ap);
        self.nodes[ap.index()].set_face_state(face, FaceState::Up);
        let now = self.now();
        let observing = self.observing();
        self.changed = true;
        self.latency_dirty = true;
        let st = &mut self.stations[s.index()];
        st.associating = None;
        st.attached = Some(ap);
        st.epoch += 1;
        if !matches!(st.role, Role::Producer(_)) {
            return;
        }
        let Role::Producer(p) = &mut st.role else { unreachable!() };
        let first = p.history.is_empty();
        p.history.push(ap);
        let prefix = p.prefix.clone();
        if !first && observing {
            self.ledger.handovers += 1;
        }
        if !first && observing && self.cfg.track_latency {
            self.open_handoff(s, now);
        }
        match self.cfg.protocol {
            ProtocolKind::MapMe | ProtocolKind::MapMeIu => {
                let cfg = self.cfg.mapme_config();
                let Role::Producer(p) = &mut self.stations[s.index()].role else { unreachable!() };
                let msgs = mapme_on_attach(p, &cfg, now);
                let due = mapme_update_due(p, &cfg);
                for m in msgs {
                    self.inject(ap, face, m);
                }
                if let Some(at) = due {
                    let epoch = self.stations[s.index()].epoch;
                    self.schedule_ok(at.max(now), Event::OwedUpdate { station: s, epoch });
                }
            }
            ProtocolKind::Anchor => {
                let Role::Producer(p) = &mut self.stations[s.index()].role else { unreachable!() };
                let seq = p.advance();
                let mut m = Message::control(Special::AnchorUpdate, prefix, seq);
                m.locator = Some(ap);
                self.inject(ap, face, m);
            }
            ProtocolKind::Tracing => {
                let Role::Producer(p) = &mut self.stations[s.index()].role else { unreachable!() };
                let seq = p.advance();
                self.inject(ap, face, Message::control(Special::Trace, prefix, seq));
                let st = &mut self.stations[s.index()];
                if !st.keepalive_running {
                    st.keepalive_running = true;
                    let at = now + self.cfg.t_ka;
                    self.schedule_ok(at, Event::KeepAlive { station: s });
                }
            }
            ProtocolKind::GlobalRouting => {
                let Role::Producer(p) = &mut self.stations[s.index()].role else { unreachable!() };
                let stamp = p.advance();
                for r in global::plan(&self.topo, ap, self.cfg.gr_per_hop) {
                    if r.delay == SimTime::ZERO {
                        self.gr_apply(r.node, s, ap, r.via, stamp);
                    } else {
                        self.schedule_ok(
                            now + r.delay,
                            Event::GrApply {
                                node: r.node,
                                station: s,
                                poa: ap,
                                via: r.via,
                                stamp,
                            },
                        );
                    }
                }
            }
        }
        self.check_handoffs();
    }

    fn gr_apply(&mut self, node: NodeId, s: StationId, poa: NodeId, via: Option<LinkId>, stamp: SeqNum) {
        let face = match via {
            Some(l) => self.face_on_link(node, l),
            None => self.ensure_assoc(s, poa).1,
        };
        let prefix = self.stations[s.index()].producer().expect("producer").prefix.clone();
        let fib = &mut self.nodes[node.index()].fib;
        if fib.get(&prefix).is_none() {
            fib.insert(FibEntry::new(prefix.clone(), vec![], SeqNum::ROUTING));
        }
        let e = fib.get_mut(&prefix).expect("inserted");
        if stamp <= e.seq {
            return;
        }
        e.seq = stamp;
        if e.nexthops != [face] {
            e.nexthops = vec![face];
            if self.observing() {
                self.ledger
                    .record_signal(SignalKind::GrUpdate, Sink::Router(self.topo.class(node)));
            }
        }
        self.changed = true;
        self.latency_dirty = true;
    }

    fn keepalive(&mut self, s: StationId) {
        let st = &self.stations[s.index()];
        if let (Some(_), Role::Producer(p)) = (st.attached, &st.role) {
            let m = Message::control(Special::KeepAlive, p.prefix.clone(), p.seq);
            self.send_from_station(s, m);
        }
        let at = self.now() + self.cfg.t_ka;
        self.schedule_ok(at, Event::KeepAlive { station: s });
    }

    fn candidate_aps(&self, pos: [f64; 2]) -> Vec<(NodeId, [f64; 2])> {
        let ap_pos = |n: NodeId| self.topo.nodes[n.index()].pos;
        if let Some(g) = self.topo.grid {
            let c = (pos[0] / g.cell_side).floor() as isize;
            let r = (pos[1] / g.cell_side).floor() as isize;
            let reach = (self.cfg.handoff.coverage / g.cell_side).ceil() as isize + 1;
            let mut v = Vec::new();
            for rr in (r - reach).max(0)..=(r + reach).min(g.rows as isize - 1) {
                for cc in (c - reach).max(0)..=(c + reach).min(g.cols as isize - 1) {
                    let n = self.topo.access[rr as usize * g.cols + cc as usize];
                    if let Some(p) = ap_pos(n) {
                        v.push((n, p));
                    }
                }
            }
            v
        } else {
            self.topo
                .access
                .iter()
                .filter_map(|&n| ap_pos(n).map(|p| (n, p)))
                .collect()
        }
    }

    fn select_ap(&self, s: StationId) -> Option<NodeId> {
        let st = &self.stations[s.index()];
        let pos = st.pos?;
        let current = st
            .attached
            .and_then(|a| self.topo.nodes[a.index()].pos.map(|p| (a, p)));
        self.cfg.handoff.select(pos, current, self.candidate_aps(pos))
    }

    fn mobility_step(&mut self, s: StationId) {
        let now = self.now();
        let dt = self.cfg.mobility_step.as_secs_f64();
        let st = &mut self.stations[s.index()];
        let mut more = true;
        let pos = match &mut st.motion {
            Motion::Static => return,
            Motion::Rwp(r) => r.step(dt, &mut st.rng),
            Motion::Track(t) => {
                let secs = now.as_secs_f64();
                more = t.last().is_some_and(|p| p.t > secs);
                interpolate(t, secs)
            }
        };
        st.pos = Some(pos);
        if st.associating.is_none() {
            let target = self.select_ap(s);
            let attached = self.stations[s.index()].attached;
            match (attached, target) {
                (Some(c), Some(t)) if c != t => {
                    self.detach(s);
                    self.begin_association(s, t, self.cfg.l2_gap);
                }
                (Some(_), None) => self.detach(s),
                (None, Some(t)) => self.begin_association(s, t, self.cfg.l2_gap),
                _ => {}
            }
        }
        if more {
            let at = now + self.cfg.mobility_step;
            self.schedule_ok(at, Event::MobilityStep { station: s });
        }
    }

    // ----- consumers ---------------------------------------------------

    fn consumer_mut(&mut self, s: StationId) -> &mut ConsumerState {
        match &mut self.stations[s.index()].role {
            Role::Consumer(c) => c,
            Role::Producer(_) => panic!("{s} is not a consumer"),
        }
    }

    fn issue_interest(&mut self, s: StationId, name: Name, lifetime: SimTime, chunk: Option<u64>) {
        let now = self.now();
        let observing = self.observing();
        let nonce: u32 = self.stations[s.index()].rng.gen();
        let c = self.consumer_mut(s);
        let req = c.next_req;
        c.next_req += 1;
        c.outstanding.insert(
            req,
            Outstanding {
                issued: now,
                counted: observing,
                chunk,
            },
        );
        if observing {
            self.ledger.issued += 1;
        }
        let mut m = Message::interest(name, nonce, lifetime);
        m.tag = Some(PacketTag { consumer: s, request: req });
        self.send_from_station(s, m);
        self.schedule_ok(now + lifetime, Event::InterestTimeout { station: s, req });
    }

    fn consumer_tick(&mut self, s: StationId, session: u64) {
        let now = self.now();
        let c = self.consumer_mut(s);
        let traffic = c.traffic;
        let prefix = c.prefix.clone();
        match traffic {
            Traffic::None => {}
            Traffic::Cbr { interval } => {
                let req = c.next_req;
                self.issue_interest(s, prefix.child(req.to_string()), self.cfg.interest_lifetime, None);
                self.schedule_ok(now + interval, Event::ConsumerTick { station: s, session });
            }
            Traffic::Playout(p) => {
                if c.playout.session != session {
                    return;
                }
                let chunk = c.next_chunk_id;
                c.next_chunk_id += 1;
                c.playout.next_chunk += 1;
                c.playout.received.insert(chunk, false);
                let deadline = now + p.buffer;
                c.playout.deadlines.insert(chunk, deadline);
                self.issue_interest(s, prefix.child(format!("c{chunk}")), p.retx_after, Some(chunk));
                self.schedule_ok(deadline, Event::PlayDeadline { station: s, chunk, session });
                self.schedule_ok(now + p.chunk_interval, Event::ConsumerTick { station: s, session });
            }
        }
    }

    fn resolve_loss(&mut self, s: StationId, req: u64, counted: bool) {
        let cause = self
            .first_drop
            .remove(&PacketTag { consumer: s, request: req })
            .unwrap_or(LossCause::Timeout);
        if counted {
            self.ledger.record_loss(cause);
        }
    }

    fn interest_timeout(&mut self, s: StationId, req: u64) {
        let now = self.now();
        let c = self.consumer_mut(s);
        let Some(o) = c.outstanding.remove(&req) else { return };
        let traffic = c.traffic;
        let prefix = c.prefix.clone();
        let retry = match (o.chunk, traffic) {
            (Some(chunk), Traffic::Playout(p)) => {
                let pending = c.playout.received.get(&chunk) == Some(&false);
                let deadline = c.playout.deadlines.get(&chunk).copied();
                (pending && deadline.is_some_and(|d| now < d)).then_some((chunk, p))
            }
            _ => None,
        };
        self.resolve_loss(s, req, o.counted);
        if let Some((chunk, p)) = retry {
            self.issue_interest(s, prefix.child(format!("c{chunk}")), p.retx_after, Some(chunk));
        }
    }

    fn consumer_data(&mut self, s: StationId, msg: Message) {
        let Some(tag) = msg.tag else { return };
        let now = self.now();
        let c = self.consumer_mut(s);
        let Some(o) = c.outstanding.remove(&tag.request) else { return };
        if let Some(chunk) = o.chunk {
            if let Some(r) = c.playout.received.get_mut(&chunk) {
                *r = true;
            }
        }
        self.first_drop.remove(&tag);
        if o.counted {
            self.ledger.delivered += 1;
            self.ledger.delays_ms.push((now - o.issued).as_millis_f64());
            self.ledger.hop_counts.push(msg.hops as u32);
        }
    }

    fn play_deadline(&mut self, s: StationId, chunk: u64, session: u64) {
        let now = self.now();
        let observing = self.observing();
        let c = self.consumer_mut(s);
        if c.playout.session != session {
            return;
        }
        let received = c.playout.received.remove(&chunk).unwrap_or(true);
        c.playout.deadlines.remove(&chunk);
        if received {
            return;
        }
        let Traffic::Playout(p) = c.traffic else { return };
        // stall: drop the session and restart at the live point
        c.playout.session += 1;
        c.playout.received.clear();
        c.playout.deadlines.clear();
        let next = c.playout.session;
        if observing {
            *self.ledger.playout_failures.entry(s).or_default() += 1;
        }
        self.schedule_ok(now + p.resume, Event::ConsumerTick { station: s, session: next });
    }

    // ----- handoff latency -------------------------------------------

    fn open_handoff(&mut self, producer: StationId, now: SimTime) {
        // an unfinished previous handoff is censored here
        let mut i = 0;
        while i < self.pending_handoffs.len() {
            if self.pending_handoffs[i].producer == producer {
                let p = self.pending_handoffs.remove(i);
                let r = &mut self.ledger.handoffs[p.record];
                r.latency = Some(now - r.at);
                r.censored = true;
            } else {
                i += 1;
            }
        }
        self.ledger.handoffs.push(HandoffRecord {
            station: producer,
            at: now,
            latency: None,
            censored: false,
        });
        self.pending_handoffs.push(PendingHandoff {
            record: self.ledger.handoffs.len() - 1,
            producer,
        });
    }

    fn check_handoffs(&mut self) {
        if self.pending_handoffs.is_empty() {
            return;
        }
        let now = self.now();
        let mut i = 0;
        while i < self.pending_handoffs.len() {
            let p = self.pending_handoffs[i].clone();
            if self.producer_reachable_by_all(p.producer) {
                self.pending_handoffs.remove(i);
                let r = &mut self.ledger.handoffs[p.record];
                r.latency = Some(now - r.at);
            } else {
                i += 1;
            }
        }
    }

    /// Whether every associated consumer of `producer` would reach it with
    /// an Interest sent now, following current forwarding decisions.
    pub fn producer_reachable_by_all(&self, producer: StationId) -> bool {
        let Some(consumers) = self.consumers_of.get(&producer) else {
            return true;
        };
        consumers.iter().all(|&c| {
            let st = &self.stations[c.index()];
            match st.attached {
                Some(ap) => self.interest_reaches(ap, producer),
                None => true,
            }
        })
    }

    /// Follows forwarding decisions for a fresh Interest entering at `ap`.
    /// Branches (discovery, multicast) succeed if any copy arrives.
    pub fn interest_reaches(&self, ap: NodeId, producer: StationId) -> bool {
        let Some(p) = self.stations[producer.index()].producer() else {
            return false;
        };
        let now = self.now();
        let probe = Message::interest(p.prefix.child("probe"), 0, self.cfg.interest_lifetime);
        let mut stack: Vec<(NodeId, Option<FaceId>, Message)> = vec![(ap, None, probe)];
        let mut seen: BTreeSet<(NodeId, Option<SeqNum>, Option<NodeId>)> = BTreeSet::new();
        while let Some((node, ingress, mut msg)) = stack.pop() {
            if !seen.insert((node, msg.seq, msg.locator)) {
                continue;
            }
            let engine = &self.nodes[node.index()];
            let faces = match engine.route_interest(&mut msg, ingress, now) {
                InterestDecision::ForwardedVia(f) => vec![f],
                InterestDecision::Broadcast(fs) => fs,
                InterestDecision::Dropped(_) => continue,
            };
            for f in faces {
                let face = engine.face(f);
                if !face.is_up() {
                    continue;
                }
                match face.peer {
                    Peer::Station(s) if s == producer => return true,
                    Peer::Station(_) => {}
                    Peer::Node(peer) => {
                        let lt = &self.links[face.link.index()];
                        let in_face = match lt.ends {
                            [End::Node(a, fa), End::Node(_, fb)] => {
                                if a == peer {
                                    fa
                                } else {
                                    fb
                                }
                            }
                            _ => continue,
                        };
                        stack.push((peer, Some(in_face), msg.forwarded()));
                    }
                }
            }
        }
        false
    }

    // ----- results -----------------------------------------------------

    /// Closes the run: censors open handoffs, records in-flight Interests
    /// and link byte counts, and returns the ledger.
    pub fn finish(mut self) -> MetricsLedger {
        let now = self.now();
        for p in std::mem::take(&mut self.pending_handoffs) {
            let r = &mut self.ledger.handoffs[p.record];
            r.latency = Some(now - r.at);
            r.censored = true;
        }
        let mut in_flight = 0;
        for st in &self.stations {
            if let Role::Consumer(c) = &st.role {
                in_flight += c.outstanding.values().filter(|o| o.counted).count() as u64;
            }
        }
        self.ledger.in_flight_at_end = in_flight;
        for (i, l) in self.links.iter().enumerate() {
            if l.class != LinkClass::Wireless {
                self.ledger.link_bytes.insert(LinkId(i as u32), l.bytes);
            }
        }
        self.ledger.duration = now.saturating_sub(self.cfg.warmup);
        self.ledger
    }

    /// Next-hop view of the forwarding state for `prefix`.
    pub fn forwarding_graph(&self, prefix: &Name, producer: StationId) -> crate::sim::analysis::ForwardingGraph {
        let n = self.nodes.len();
        let mut next = vec![Vec::new(); n];
        let mut to_producer = vec![false; n];
        for (i, e) in self.nodes.iter().enumerate() {
            let Some(entry) = e.fib.get(prefix) else { continue };
            for &f in &entry.nexthops {
                match e.face(f).peer {
                    Peer::Node(p) => {
                        if !next[i].contains(&p) {
                            next[i].push(p);
                        }
                    }
                    Peer::Station(s) if s == producer => to_producer[i] = true,
                    Peer::Station(_) => {}
                }
            }
        }
        crate::sim::analysis::ForwardingGraph { next, to_producer }
    }
}
