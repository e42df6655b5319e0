use mapme::experiment::config::MobilityModel;
use mapme::experiment::{ExperimentConfig, Scenario, TopologySource};
use mapme::sim::edgelist::load_edge_list;
use mapme::sim::topology::LinkParams;
use mapme::ProtocolKind;
use proptest::prelude::*;

#[test]
fn presets_validate() {
    ExperimentConfig::preset(Scenario::GridSim).validate().unwrap();
    let mut s = ExperimentConfig::preset(Scenario::StretchEval);
    assert_eq!(s.topology.source, TopologySource::EdgeList);
    assert!(s.validate().is_err(), "edge list without a path");
    s.topology.path = Some("x.txt".into());
    s.validate().unwrap();
}

#[test]
fn overrides_reach_nested_fields() {
    let mut c = ExperimentConfig::preset(Scenario::GridSim);
    c.apply_override("traffic.pairs=7").unwrap();
    c.apply_override("mobility.model=manhattan").unwrap();
    c.apply_override("protocols=[\"gr\"]").unwrap();
    assert_eq!(c.traffic.pairs, 7);
    assert_eq!(c.mobility.model, MobilityModel::Manhattan);
    assert_eq!(c.protocols, vec![ProtocolKind::GlobalRouting]);
    assert!(c.apply_override("traffic.pairs=many").is_err());
    assert!(c.apply_override("no_equals_sign").is_err());
}

#[test]
fn stretch_eval_refuses_the_timed_variant() {
    let mut c = ExperimentConfig::preset(Scenario::StretchEval);
    c.topology.path = Some("x.txt".into());
    c.protocols.push(ProtocolKind::MapMe);
    assert!(c.validate().is_err());
}

#[test]
fn bundled_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/configs");
    for f in ["stretch_eval.json", "grid_sim.json", "trace_sim.json"] {
        let text = std::fs::read_to_string(dir.join(f)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["scenario"].is_string(), "{f}");
    }
}

#[test]
fn bundled_topologies_are_connected() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/topologies");
    for (f, n) in [("isp_small.txt", 53), ("isp_medium.txt", 98), ("isp_large.txt", 186)] {
        let text = std::fs::read_to_string(dir.join(f)).unwrap();
        let t = load_edge_list(&text, LinkParams::wired_default()).unwrap();
        assert_eq!(t.node_count(), n, "{f}");
        assert!(t.is_connected(), "{f}");
    }
}

proptest! {
    #[test]
    fn override_roundtrips_integers(pairs in 1usize..500, seed in any::<u32>()) {
        let mut c = ExperimentConfig::preset(Scenario::GridSim);
        c.apply_override(&format!("traffic.pairs={pairs}")).unwrap();
        c.apply_override(&format!("seed={seed}")).unwrap();
        prop_assert_eq!(c.traffic.pairs, pairs);
        prop_assert_eq!(c.seed, seed as u64);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back.traffic.pairs, pairs);
    }

    #[test]
    fn connected_edge_lists_keep_every_edge(n in 2u32..20, extra in proptest::collection::vec((0u32..20, 0u32..20), 0..30)) {
        // a chain through every label keeps the graph connected
        let mut edges: Vec<(u32, u32)> = (1..n).map(|i| (i - 1, i)).collect();
        edges.extend(extra.iter().map(|&(a, b)| (a % n, b % n)));
        let text: String = edges.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
        let t = load_edge_list(&text, LinkParams::wired_default()).unwrap();
        let mut uniq: Vec<(u32, u32)> = edges.iter().filter(|(a, b)| a != b).map(|&(a, b)| (a.min(b), a.max(b))).collect();
        uniq.sort();
        uniq.dedup();
        prop_assert_eq!(t.node_count(), n as usize);
        prop_assert_eq!(t.links.len(), uniq.len());
        prop_assert!(t.is_connected());
    }
}
