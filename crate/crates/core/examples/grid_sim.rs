//! One short run of every protocol on the access grid with roaming
//! producers at a single speed.
//!
//! `cargo run --release --example grid_sim -- 10`

use mapme::experiment::grid::{grid_run, grid_topology, RunSummary};
use mapme::experiment::{ExperimentConfig, Scenario};
use mapme::ProtocolKind;

fn main() -> mapme::Result<()> {
    let speed: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let mut cfg = ExperimentConfig::preset(Scenario::GridSim);
    cfg.traffic.duration_s = 30.0;
    let topo = grid_topology(&cfg.topology);
    println!("speed {speed} m/s, {} s", cfg.traffic.duration_s);
    println!("protocol  loss%  delay_ms  hops  handovers  signaling/handover");
    for p in ProtocolKind::ALL {
        let l = grid_run(&cfg, p, speed, 1)?;
        let r = RunSummary::of(&l, &topo);
        println!(
            "{:>8} {:>6.3} {:>9.2} {:>5.2} {:>10} {:>19.1}",
            p.key(),
            100.0 * r.loss_rate,
            r.delay_ms,
            r.hops,
            r.handovers,
            r.signaling_per_handover()
        );
    }
    Ok(())
}
