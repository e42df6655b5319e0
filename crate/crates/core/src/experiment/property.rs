//! Randomized checks of the update protocol on tree topologies: producer
//! movements with lossy signaling, with the forwarding state inspected at
//! every instant the network goes quiet.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::experiment::config::MobilityModel;
use crate::ids::NodeId;
use crate::mobility::{graph_uniform_jump, GraphRwp};
use crate::name::name;
use crate::protocol::ProtocolKind;
use crate::sim::engine::{Motion, SimConfig, Simulation};
use crate::sim::topology::{random_tree, LinkParams};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeSuite {
    pub sequences: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub moves: usize,
    /// Loss probability of each signaling message on wired links.
    pub signal_loss: f64,
    /// Link delays are drawn uniformly from this range, in ms.
    pub delay_ms: (u64, u64),
    /// Producer dwell time before the next move is drawn from this range,
    /// in ms. Short dwells make updates overlap.
    pub dwell_ms: (u64, u64),
    pub model: MobilityModel,
    pub seed: u64,
}

impl Default for TreeSuite {
    fn default() -> Self {
        TreeSuite {
            sequences: 200,
            min_nodes: 10,
            max_nodes: 50,
            moves: 20,
            signal_loss: 0.1,
            delay_ms: (1, 10),
            dwell_ms: (0, 40),
            model: MobilityModel::UniformJump,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub sequences: u64,
    /// Quiescent instants inspected.
    pub checks: u64,
    pub cycles: u64,
    pub unreachable: u64,
    pub not_tree: u64,
    /// Updates compared with the completion bound.
    pub bound_checks: u64,
    pub bound_violations: u64,
    /// Largest measured hop count over its bound, as (measured, bound).
    pub tightest: Option<(u32, u32)>,
    pub give_ups: u64,
}

/// One movement sequence on one random tree.
pub fn run_sequence(s: &TreeSuite, index: usize, report: &mut SuiteReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_mul(1_000_003).wrapping_add(index as u64));
    let n = rng.gen_range(s.min_nodes..=s.max_nodes);
    let base = LinkParams {
        control_loss: s.signal_loss,
        capacity_bps: None,
        queue_limit: None,
        ..LinkParams::wired_default()
    };
    let topo = random_tree(n, &mut rng, s.delay_ms, base);
    let dist: Vec<Vec<Option<u32>>> = (0..n).map(|i| topo.bfs(NodeId(i as u32))).collect();
    let p0 = NodeId(rng.gen_range(0..n as u32));
    let mut path = vec![p0];
    let mut walker = GraphRwp::default();
    for _ in 0..s.moves {
        let cur = *path.last().expect("non-empty");
        let next = match s.model {
            MobilityModel::RwpGraph => walker.next(cur, &topo, &mut rng),
            _ => graph_uniform_jump(cur, n, &mut rng),
        };
        path.push(next);
    }
    let cfg = SimConfig {
        protocol: ProtocolKind::MapMeIu,
        l2_gap: SimTime::ZERO,
        track_latency: false,
        track_updates: true,
        seed: rng.gen(),
        ..SimConfig::default()
    };
    let mut sim = Simulation::new(topo, cfg);
    let prefix = name("/p");
    let producer = sim
        .add_producer(prefix.clone(), Some(p0), Motion::Static)
        .expect("p0 is a router");
    let mut t = SimTime::ZERO;
    for &next in &path[1..] {
        t = t + SimTime::from_micros(rng.gen_range(s.dwell_ms.0 * 1000..=s.dwell_ms.1 * 1000));
        sim.schedule_move(producer, t, next, SimTime::ZERO).expect("future instant");
    }
    let check = |sim: &Simulation, report: &mut SuiteReport| {
        let Some(target) = sim.station(producer).producer().and_then(|p| p.current_poa()) else {
            return;
        };
        let g = sim.forwarding_graph(&prefix, producer);
        report.checks += 1;
        if !g.is_acyclic() {
            report.cycles += 1;
        }
        if !g.all_reach(target) {
            report.unreachable += 1;
        }
        if !g.is_tree_toward(target) {
            report.not_tree += 1;
        }
    };
    while sim.step() {
        if sim.is_quiescent() && sim.take_changed() {
            check(&sim, report);
        }
    }
    check(&sim, report);
    // update k was stamped k + 1 (the first attachment is stamp 1)
    for k in 1..path.len() {
        let Some(&hops) = sim.iu_hops().get(&(prefix.clone(), k as u64 + 1)) else {
            continue;
        };
        let bound = 2 * (0..k)
            .map(|j| dist[path[k].index()][path[j].index()].expect("tree is connected"))
            .max()
            .unwrap_or(0);
        report.bound_checks += 1;
        if hops as u32 > bound {
            report.bound_violations += 1;
        }
        if bound > 0 {
            let r = hops as f64 / bound as f64;
            if report.tightest.is_none_or(|(h, b)| r > h as f64 / b as f64) {
                report.tightest = Some((hops as u32, bound));
            }
        }
    }
    report.give_ups += sim.finish().give_ups;
    report.sequences += 1;
}

pub fn run_suite(s: &TreeSuite) -> SuiteReport {
    let mut report = SuiteReport::default();
    for i in 0..s.sequences {
        run_sequence(s, i, &mut report);
    }
    report
}
