//! Path stretch after successive producer movements on the small ISP map.
//!
//! `cargo run --release --example stretch_eval -- 200`

use std::path::PathBuf;

use mapme::experiment::config::{MobilityModel, TopologySource};
use mapme::experiment::stretch::{stretch_eval, StretchParams};
use mapme::experiment::{load_topology, ExperimentConfig, Scenario};
use mapme::ProtocolKind;

fn main() -> mapme::Result<()> {
    let runs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let mut cfg = ExperimentConfig::preset(Scenario::StretchEval);
    cfg.topology.source = TopologySource::EdgeList;
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/topologies/isp_small.txt");
    cfg.topology.path = Some(path.to_string_lossy().into_owned());
    let topo = load_topology(&cfg)?;
    let params = StretchParams {
        model: MobilityModel::RwpGraph,
        movements: 20,
        runs,
        seed: 1,
        anchor: None,
    };
    let report = stretch_eval(&topo, &cfg.protocols, &params)?;
    println!("{} routers, {runs} runs", topo.node_count());
    for p in &cfg.protocols {
        let curve = report.curve(*p).expect("protocol evaluated");
        let at = |k: usize| format!("{:.3}±{:.3}", curve[k - 1].mean, curve[k - 1].ci95);
        println!("{:>8}: k=1 {}  k=5 {}  k=20 {}", p.key(), at(1), at(5), at(20));
    }
    println!("bound violations {}", report.bound_violations);
    assert_eq!(report.curve(ProtocolKind::GlobalRouting).unwrap()[19].mean, 1.0);
    Ok(())
}
