//! Trace-driven scenario: producers follow recorded tracks over a city-scale
//! grid and each streams to play-out consumers at random access points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::experiment::config::ExperimentConfig;
use crate::experiment::grid::{cbr_interval, grid_topology, sim_config};
use crate::metrics::ledger::MetricsLedger;
use crate::mobility::{Arena, MobilityTrace};
use crate::name::name;
use crate::protocol::ProtocolKind;
use crate::sim::engine::{Motion, PlayoutConfig, Simulation, Traffic};
use crate::time::SimTime;

/// Arena covering the whole grid.
pub fn grid_arena(cfg: &ExperimentConfig) -> Arena {
    let t = &cfg.topology;
    Arena {
        min: [0.0, 0.0],
        max: [t.cols as f64 * t.cell_side_m, t.rows as f64 * t.cell_side_m],
    }
}

pub fn load_trace(cfg: &ExperimentConfig, path: &std::path::Path) -> Result<MobilityTrace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MobilityTrace::parse(&text, Some(grid_arena(cfg)))
}

/// Simulated span for `trace`: the configured duration, cut short if the
/// trace ends first. The second value is `true` when it was cut.
pub fn effective_duration(cfg: &ExperimentConfig, trace: &MobilityTrace) -> (f64, bool) {
    let want = cfg.traffic.warmup_s + cfg.traffic.duration_s;
    let have = trace.end_time();
    if have < want {
        (have, true)
    } else {
        (want, false)
    }
}

/// One run with the first `producers` tracks of `trace`.
pub fn trace_run(
    cfg: &ExperimentConfig,
    trace: &MobilityTrace,
    protocol: ProtocolKind,
    producers: usize,
    seed: u64,
) -> Result<MetricsLedger> {
    if trace.tracks.len() < producers {
        return Err(Error::Config(format!(
            "trace has {} stations, {producers} producers requested",
            trace.tracks.len()
        )));
    }
    let topo = grid_topology(&cfg.topology);
    let aps = topo.access.clone();
    let mut sim = Simulation::new(topo, sim_config(cfg, protocol, seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6A09_E667_F3BC_C909);
    let pl = &cfg.playout;
    let traffic = Traffic::Playout(PlayoutConfig {
        chunk_interval: cbr_interval(cfg.traffic.cbr_rate_bps),
        buffer: SimTime::from_secs_f64(pl.buffer_s),
        resume: SimTime::from_secs_f64(pl.resume_s),
        retx_after: SimTime::from_secs_f64(pl.retx_s),
    });
    for (i, track) in trace.tracks.values().take(producers).enumerate() {
        let p = sim.add_producer(name(&format!("/v{i}")), None, Motion::Track(track.clone()))?;
        for _ in 0..pl.consumers_per_producer {
            let ap = aps[rng.gen_range(0..aps.len())];
            sim.add_consumer(p, Some(ap), traffic, Motion::Static)?;
        }
    }
    let (span, _) = effective_duration(cfg, trace);
    sim.run_until(SimTime::from_secs_f64(span));
    Ok(sim.finish())
}

/// Play-out failures of every consumer in a run, zero included.
pub fn failures_per_consumer(l: &MetricsLedger, producers: usize, per_producer: usize) -> Vec<u64> {
    // stations are numbered producer, its consumers, next producer, ...
    (0..producers)
        .flat_map(|p| (0..per_producer).map(move |c| p * (per_producer + 1) + 1 + c))
        .map(|s| {
            l.playout_failures
                .get(&crate::ids::StationId(s as u32))
                .copied()
                .unwrap_or(0)
        })
        .collect()
}
