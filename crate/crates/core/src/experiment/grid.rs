//! Grid scenario: producers roam the interior cells of the access grid while
//! static consumers fetch from them at a constant rate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::experiment::config::{ExperimentConfig, MobilityModel, TopologyConfig};
use crate::ids::NodeId;
use crate::metrics::ledger::{LossCause, MetricsLedger, Sink};
use crate::metrics::stats::{mean, Estimate};
use crate::mobility::{manhattan_trace, Arena, HandoffRule, RwpGeometric};
use crate::name::name;
use crate::protocol::ProtocolKind;
use crate::sim::engine::{Motion, SimConfig, Simulation, Traffic};
use crate::sim::topology::{build_grid_fattree, GridFatTree, LinkParams, RouterClass, Topology};
use crate::tables::Message;
use crate::time::SimTime;

pub fn wired_params(t: &TopologyConfig) -> LinkParams {
    LinkParams {
        delay: SimTime::from_millis_f64(t.wired_delay_ms),
        capacity_bps: t.wired_capacity_bps,
        queue_limit: t.wired_queue,
        ..LinkParams::wired_default()
    }
}

pub fn wireless_params(t: &TopologyConfig) -> LinkParams {
    LinkParams {
        delay: SimTime::from_millis_f64(t.wireless_delay_ms),
        capacity_bps: t.wireless_capacity_bps,
        loss: t.wireless_loss,
        ..LinkParams::wireless_default()
    }
}

pub fn grid_topology(t: &TopologyConfig) -> Topology {
    build_grid_fattree(&GridFatTree {
        rows: t.rows,
        cols: t.cols,
        cell_side: t.cell_side_m,
        wired: wired_params(t),
        neighbor_links: t.neighbor_links,
        ..GridFatTree::default()
    })
}

/// Simulation settings for one run of `protocol`.
pub fn sim_config(cfg: &ExperimentConfig, protocol: ProtocolKind, seed: u64) -> SimConfig {
    let p = &cfg.protocol;
    let m = &cfg.mobility;
    SimConfig {
        protocol,
        retx_timeout: SimTime::from_millis_f64(p.tau_ms),
        max_retries: p.max_retries,
        t_u: SimTime::from_secs_f64(p.t_u_s),
        t_ka: SimTime::from_secs_f64(p.t_ka_s),
        gr_per_hop: p.gr_per_hop_ms.map(SimTime::from_millis_f64),
        anchor: p.anchor.map(NodeId),
        wireless: wireless_params(&cfg.topology),
        l2_gap: SimTime::from_millis_f64(m.l2_gap_ms),
        mobility_step: SimTime::from_millis_f64(m.step_ms),
        handoff: HandoffRule {
            hysteresis: m.hysteresis_m,
            coverage: m.coverage_m,
        },
        interest_lifetime: SimTime::from_millis_f64(cfg.traffic.interest_lifetime_ms),
        warmup: SimTime::from_secs_f64(cfg.traffic.warmup_s),
        seed,
        ..SimConfig::default()
    }
}

/// Interest spacing giving `rate_bps` of Data.
pub fn cbr_interval(rate_bps: u64) -> SimTime {
    let bits = Message::DATA_BYTES as u64 * 8 * 1_000_000;
    SimTime::from_micros(bits.div_ceil(rate_bps))
}

/// Grid simulation with `traffic.pairs` producers moving at `speed` m/s
/// in the interior cells,
/// each with one consumer at a uniformly drawn access point. Nothing has
/// run yet.
pub fn grid_setup(cfg: &ExperimentConfig, protocol: ProtocolKind, speed: f64, seed: u64) -> Result<Simulation> {
    let topo = grid_topology(&cfg.topology);
    let t = &cfg.topology;
    let arena = Arena::interior(t.rows, t.cols, t.cell_side_m, cfg.mobility.interior_cells);
    let aps = topo.access.clone();
    let mut sim = Simulation::new(topo, sim_config(cfg, protocol, seed));
    // placement draws are independent of the simulation's own streams and
    // shared by all protocols for a given seed
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let traffic = Traffic::Cbr {
        interval: cbr_interval(cfg.traffic.cbr_rate_bps),
    };
    for i in 0..cfg.traffic.pairs {
        let motion = match cfg.mobility.model {
            MobilityModel::Manhattan => {
                let span = cfg.traffic.warmup_s + cfg.traffic.duration_s;
                Motion::Track(manhattan_trace(t.rows, t.cols, t.cell_side_m, arena, speed, span, &mut rng))
            }
            _ => Motion::Rwp(RwpGeometric::new(arena, speed, &mut rng)),
        };
        let p = sim.add_producer(name(&format!("/p{i}")), None, motion)?;
        let ap = aps[rng.gen_range(0..aps.len())];
        sim.add_consumer(p, Some(ap), traffic, Motion::Static)?;
    }
    Ok(sim)
}

/// End of the measured window.
pub fn grid_end(cfg: &ExperimentConfig) -> SimTime {
    SimTime::from_secs_f64(cfg.traffic.warmup_s + cfg.traffic.duration_s)
}

/// One run of [`grid_setup`] to the end of the measured window.
pub fn grid_run(cfg: &ExperimentConfig, protocol: ProtocolKind, speed: f64, seed: u64) -> Result<MetricsLedger> {
    let mut sim = grid_setup(cfg, protocol, speed, seed)?;
    sim.run_until(grid_end(cfg));
    Ok(sim.finish())
}

/// Per-run figures kept for aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub loss_rate: f64,
    pub loss_by: [f64; 4],
    pub delay_ms: f64,
    pub hops: f64,
    pub handovers: u64,
    pub signaling: u64,
    /// Access, edge, backhaul, core, mobile.
    pub signaling_by_sink: [u64; 5],
    pub latencies_ms: Vec<f64>,
    pub censored: u64,
    /// Highest utilization of any wired link, either direction.
    pub max_link_util: f64,
    pub link_util: Vec<f64>,
    pub protocol_errors: u64,
}

pub const SINKS: [Sink; 5] = [
    Sink::Router(RouterClass::Access),
    Sink::Router(RouterClass::Edge),
    Sink::Router(RouterClass::Backhaul),
    Sink::Router(RouterClass::Core),
    Sink::Mobile,
];

impl RunSummary {
    pub fn of(l: &MetricsLedger, topo: &Topology) -> Self {
        let issued = l.issued.max(1) as f64;
        let secs = l.duration.as_secs_f64().max(f64::MIN_POSITIVE);
        let link_util: Vec<f64> = topo
            .links
            .iter()
            .map(|spec| {
                let b = l.link_bytes.get(&spec.id).copied().unwrap_or([0, 0]);
                match spec.params.capacity_bps {
                    Some(c) => b[0].max(b[1]) as f64 * 8.0 / (secs * c as f64),
                    None => 0.0,
                }
            })
            .collect();
        RunSummary {
            loss_rate: l.loss_rate(),
            loss_by: LossCause::ALL.map(|c| l.lost_by(c) as f64 / issued),
            delay_ms: l.mean_delay_ms(),
            hops: l.mean_hops(),
            handovers: l.handovers,
            signaling: l.signal_total(),
            signaling_by_sink: SINKS.map(|s| l.signal_at(s)),
            latencies_ms: l
                .handoffs
                .iter()
                .filter(|h| !h.censored)
                .filter_map(|h| h.latency.map(|d| d.as_millis_f64()))
                .collect(),
            censored: l.handoffs.iter().filter(|h| h.censored).count() as u64,
            max_link_util: link_util.iter().copied().fold(0.0, f64::max),
            link_util,
            protocol_errors: l.protocol_errors,
        }
    }

    pub fn signaling_per_handover(&self) -> f64 {
        if self.handovers == 0 {
            f64::NAN
        } else {
            self.signaling as f64 / self.handovers as f64
        }
    }
}

/// Ensemble of runs for one protocol and speed.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub protocol: ProtocolKind,
    pub speed: f64,
    pub t_u_s: f64,
    pub runs: Vec<RunSummary>,
}

impl Ensemble {
    pub fn est(&self, f: impl Fn(&RunSummary) -> f64) -> Estimate {
        let v: Vec<f64> = self.runs.iter().map(f).filter(|x| x.is_finite()).collect();
        Estimate::of(&v)
    }

    pub fn mean_of(&self, f: impl Fn(&RunSummary) -> f64) -> f64 {
        self.est(f).mean
    }

    pub fn latencies(&self) -> Vec<f64> {
        self.runs.iter().flat_map(|r| r.latencies_ms.iter().copied()).collect()
    }

    pub fn mean_link_util(&self) -> Vec<f64> {
        let n = self.runs.first().map_or(0, |r| r.link_util.len());
        (0..n)
            .map(|i| mean(&self.runs.iter().map(|r| r.link_util[i]).collect::<Vec<_>>()))
            .collect()
    }
}

/// Runs `runs` seeds of `protocol` at `speed`.
pub fn ensemble(cfg: &ExperimentConfig, protocol: ProtocolKind, speed: f64, seeds: &[u64]) -> Result<Ensemble> {
    let topo = grid_topology(&cfg.topology);
    let mut runs = Vec::with_capacity(seeds.len());
    for &s in seeds {
        let l = grid_run(cfg, protocol, speed, s)?;
        runs.push(RunSummary::of(&l, &topo));
    }
    Ok(Ensemble {
        protocol,
        speed,
        t_u_s: cfg.protocol.t_u_s,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_megabit_is_a_hundred_interests_per_second() {
        assert_eq!(cbr_interval(1_000_000), SimTime::from_millis(10));
    }

    #[test]
    fn static_producers_lose_nothing() {
        let mut cfg = ExperimentConfig::default();
        cfg.traffic.pairs = 2;
        cfg.traffic.duration_s = 3.0;
        cfg.traffic.warmup_s = 1.0;
        // a crawl: no producer leaves its first cell within four seconds
        let l = grid_run(&cfg, ProtocolKind::MapMe, 0.001, 5).unwrap();
        assert_eq!(l.handovers, 0);
        assert_eq!(l.lost_total(), 0);
        assert!(l.delivered > 500);
    }
}
