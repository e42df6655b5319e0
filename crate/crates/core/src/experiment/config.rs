//! Experiment configuration: a JSON document where every field has a
//! default, plus `key.path=value` overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::protocol::ProtocolKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    StretchEval,
    GridSim,
    TraceSim,
}

impl Scenario {
    pub fn key(self) -> &'static str {
        match self {
            Scenario::StretchEval => "stretch-eval",
            Scenario::GridSim => "grid-sim",
            Scenario::TraceSim => "trace-sim",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologySource {
    /// Built-in access grid under an aggregation tree.
    FatTree,
    /// Edge-list file named by `topology.path`.
    EdgeList,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    pub source: TopologySource,
    pub path: Option<String>,
    pub rows: usize,
    pub cols: usize,
    pub cell_side_m: f64,
    pub neighbor_links: bool,
    pub wired_delay_ms: f64,
    /// `None` is unlimited.
    pub wired_capacity_bps: Option<u64>,
    pub wired_queue: Option<usize>,
    pub wireless_delay_ms: f64,
    pub wireless_capacity_bps: Option<u64>,
    pub wireless_loss: f64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            source: TopologySource::FatTree,
            path: None,
            rows: 6,
            cols: 6,
            cell_side_m: 80.0,
            neighbor_links: true,
            wired_delay_ms: 5.0,
            wired_capacity_bps: Some(10_000_000),
            wired_queue: Some(100),
            wireless_delay_ms: 2.0,
            wireless_capacity_bps: Some(50_000_000),
            wireless_loss: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MobilityModel {
    /// Geometric random waypoint (grid-sim).
    Rwp,
    /// Random walk between centres of 4-neighbor cells (grid-sim).
    Manhattan,
    /// Jump to a uniformly random node (stretch-eval).
    UniformJump,
    /// One shortest-path hop per movement toward a random waypoint
    /// (stretch-eval).
    RwpGraph,
    /// Positions read from `mobility.trace` (trace-sim).
    Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityConfig {
    pub model: MobilityModel,
    pub speeds_mps: Vec<f64>,
    pub trace: Option<String>,
    /// Movements per run (stretch-eval).
    pub movements: usize,
    /// Width of the square of interior cells producers roam in (grid-sim).
    pub interior_cells: usize,
    pub l2_gap_ms: f64,
    pub step_ms: f64,
    pub hysteresis_m: f64,
    pub coverage_m: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        MobilityConfig {
            model: MobilityModel::Rwp,
            speeds_mps: vec![1.0, 5.0, 10.0, 15.0],
            trace: None,
            movements: 40,
            interior_cells: 4,
            l2_gap_ms: 50.0,
            step_ms: 20.0,
            hysteresis_m: 5.0,
            coverage_m: 120.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub t_u_s: f64,
    pub tau_ms: f64,
    pub max_retries: u32,
    pub t_ka_s: f64,
    /// Per-hop delay of global-routing rewrites; `None` is instantaneous.
    pub gr_per_hop_ms: Option<f64>,
    /// Anchor / rendezvous node id; defaults to the topology root
    /// (stretch-eval draws one at random per run).
    pub anchor: Option<u32>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            t_u_s: 1.0,
            tau_ms: 60.0,
            max_retries: 8,
            t_ka_s: 0.5,
            gr_per_hop_ms: None,
            anchor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    /// Producer/consumer pairs (grid-sim).
    pub pairs: usize,
    pub cbr_rate_bps: u64,
    pub duration_s: f64,
    pub warmup_s: f64,
    pub interest_lifetime_ms: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            pairs: 5,
            cbr_rate_bps: 1_000_000,
            duration_s: 60.0,
            warmup_s: 5.0,
            interest_lifetime_ms: 4000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlayoutSettings {
    pub buffer_s: f64,
    pub resume_s: f64,
    pub retx_s: f64,
    /// Producer counts swept by trace-sim.
    pub producers: Vec<usize>,
    pub consumers_per_producer: usize,
}

impl Default for PlayoutSettings {
    fn default() -> Self {
        PlayoutSettings {
            buffer_s: 5.0,
            resume_s: 3.0,
            retx_s: 1.0,
            producers: vec![1, 5, 10, 20, 50],
            consumers_per_producer: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub protocols: Vec<ProtocolKind>,
    pub seed: u64,
    pub runs: usize,
    pub topology: TopologyConfig,
    pub mobility: MobilityConfig,
    pub protocol: ProtocolConfig,
    pub traffic: TrafficConfig,
    pub playout: PlayoutSettings,
    /// Extra grid-sim pass over these update periods (full protocol only).
    pub t_u_sweep_s: Vec<f64>,
    pub svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: Scenario::GridSim,
            protocols: ProtocolKind::ALL.to_vec(),
            seed: 1,
            runs: 10,
            topology: TopologyConfig::default(),
            mobility: MobilityConfig::default(),
            protocol: ProtocolConfig::default(),
            traffic: TrafficConfig::default(),
            playout: PlayoutSettings::default(),
            t_u_sweep_s: Vec::new(),
            svg: false,
        }
    }
}

impl ExperimentConfig {
    /// Defaults suited to `scenario`.
    pub fn preset(scenario: Scenario) -> Self {
        let mut c = ExperimentConfig {
            scenario,
            ..Self::default()
        };
        match scenario {
            Scenario::StretchEval => {
                c.protocols = vec![
                    ProtocolKind::MapMeIu,
                    ProtocolKind::Anchor,
                    ProtocolKind::Tracing,
                    ProtocolKind::GlobalRouting,
                ];
                c.runs = 1000;
                c.topology.source = TopologySource::EdgeList;
                c.mobility.model = MobilityModel::RwpGraph;
            }
            Scenario::GridSim => {}
            Scenario::TraceSim => {
                c.topology.rows = 27;
                c.topology.cols = 27;
                c.mobility.model = MobilityModel::Trace;
                c.traffic.duration_s = 240.0;
                c.traffic.warmup_s = 0.0;
                c.runs = 1;
            }
        }
        c
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Applies a `dotted.key=value` override. The value is read as JSON when
    /// it parses, else as a string.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, raw) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {spec:?} is not key=value")))?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
        let mut doc = serde_json::to_value(&*self)?;
        let mut slot = &mut doc;
        for part in key.split('.') {
            slot = slot
                .as_object_mut()
                .and_then(|o| o.get_mut(part))
                .ok_or_else(|| Error::Config(format!("unknown config key {key:?}")))?;
        }
        *slot = value;
        *self = serde_json::from_value(doc).map_err(|e| Error::Config(format!("{key}: {e}")))?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.protocols.is_empty() {
            return bad("no protocol selected".into());
        }
        if self.topology.rows == 0 || self.topology.cols == 0 {
            return bad("grid needs at least one cell".into());
        }
        if self.topology.source == TopologySource::EdgeList && self.topology.path.is_none() {
            return bad("topology.path is required for an edge-list topology".into());
        }
        if !(0.0..=1.0).contains(&self.topology.wireless_loss) {
            return bad("topology.wireless_loss must lie in [0, 1]".into());
        }
        if self.traffic.duration_s <= 0.0 || self.traffic.warmup_s < 0.0 {
            return bad("traffic.duration_s must be positive and warmup_s non-negative".into());
        }
        if self.traffic.cbr_rate_bps == 0 {
            return bad("traffic.cbr_rate_bps must be positive".into());
        }
        if self.mobility.speeds_mps.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
            return bad("speeds must be positive".into());
        }
        match self.scenario {
            Scenario::StretchEval => {
                if !matches!(self.mobility.model, MobilityModel::UniformJump | MobilityModel::RwpGraph) {
                    return bad("stretch-eval needs uniform-jump or rwp-graph mobility".into());
                }
                if self.protocols.contains(&ProtocolKind::MapMe) {
                    return bad("stretch-eval abstracts timing; use mapme-iu instead of mapme".into());
                }
            }
            Scenario::GridSim => {
                if !matches!(self.mobility.model, MobilityModel::Rwp | MobilityModel::Manhattan) {
                    return bad("grid-sim needs rwp or manhattan mobility".into());
                }
                if self.topology.source != TopologySource::FatTree {
                    return bad("grid-sim runs on the built-in fat-tree".into());
                }
                if self.mobility.interior_cells == 0
                    || self.mobility.interior_cells > self.topology.rows.min(self.topology.cols)
                {
                    return bad("mobility.interior_cells must fit in the grid".into());
                }
            }
            Scenario::TraceSim => {
                if self.mobility.trace.is_none() {
                    return bad("trace-sim needs mobility.trace".into());
                }
                if self.topology.source != TopologySource::FatTree {
                    return bad("trace-sim runs on the built-in fat-tree".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let text = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), c);
    }

    #[test]
    fn dotted_overrides() {
        let mut c = ExperimentConfig::default();
        c.apply_override("traffic.pairs=3").unwrap();
        c.apply_override("protocols=[\"ab\",\"gr\"]").unwrap();
        c.apply_override("topology.path=data/x.txt").unwrap();
        c.apply_override("protocol.gr_per_hop_ms=2.5").unwrap();
        assert_eq!(c.traffic.pairs, 3);
        assert_eq!(c.protocols, vec![ProtocolKind::Anchor, ProtocolKind::GlobalRouting]);
        assert_eq!(c.topology.path.as_deref(), Some("data/x.txt"));
        assert_eq!(c.protocol.gr_per_hop_ms, Some(2.5));
        assert!(c.apply_override("traffic.nope=1").is_err());
        assert!(c.apply_override("traffic.pairs=many").is_err());
        assert!(c.apply_override("runs").is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"traffic": {"pears": 2}}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::preset(Scenario::TraceSim);
        assert!(c.validate().is_err());
        c.mobility.trace = Some("t.csv".into());
        c.validate().unwrap();
        let mut s = ExperimentConfig::preset(Scenario::StretchEval);
        assert!(s.validate().is_err());
        s.topology.path = Some("x".into());
        s.validate().unwrap();
    }
}
