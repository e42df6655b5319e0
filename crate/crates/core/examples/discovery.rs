//! Two quick moves inside one update period: the second is announced by a
//! notification only, and Interests reaching a stale access point are
//! steered along the neighbor links. Compared with the updates-only
//! variant on the same script.

use mapme::metrics::LossCause;
use mapme::sim::engine::{Motion, SimConfig, Simulation, Traffic};
use mapme::sim::topology::{build_grid_fattree, GridFatTree};
use mapme::{name, ProtocolKind, SimTime};

fn run(protocol: ProtocolKind) -> mapme::metrics::MetricsLedger {
    let topo = build_grid_fattree(&GridFatTree::default());
    let aps = topo.access.clone();
    let cfg = SimConfig {
        protocol,
        t_u: SimTime::from_secs(1),
        ..SimConfig::default()
    };
    let mut sim = Simulation::new(topo, cfg);
    let p = sim.add_producer(name("/p"), Some(aps[14]), Motion::Static).unwrap();
    let cbr = Traffic::Cbr {
        interval: SimTime::from_millis(5),
    };
    sim.add_consumer(p, Some(aps[0]), cbr, Motion::Static).unwrap();
    let gap = sim.cfg.l2_gap;
    sim.schedule_move(p, SimTime::from_millis(2000), aps[15], gap).unwrap();
    sim.schedule_move(p, SimTime::from_millis(2300), aps[16], gap).unwrap();
    sim.run_until(SimTime::from_secs(5));
    sim.finish()
}

fn main() {
    for protocol in [ProtocolKind::MapMe, ProtocolKind::MapMeIu] {
        let l = run(protocol);
        let lat: Vec<String> = l
            .handoffs
            .iter()
            .map(|h| h.latency.map_or("-".into(), |d| format!("{:.3}ms", d.as_millis_f64())))
            .collect();
        println!(
            "{:>8}: issued {} lost {} (mobility {}), handoff latency {:?}",
            protocol.key(),
            l.issued,
            l.lost_total(),
            l.lost_by(LossCause::Mobility),
            lat
        );
    }
}
