//! Experiment configuration and the three scenario drivers.
//!
//! Each driver writes a run directory holding the resolved configuration
//! (`config.json`), the seed list (`seeds.txt`), its CSV tables and a
//! `manifest.json` with the SHA-256 of every file. Running the echoed
//! configuration again reproduces the same bytes.

pub mod config;
pub mod grid;
pub mod output;
pub mod property;
pub mod stretch;
pub mod tracesim;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, MobilityModel, Scenario, TopologySource};

use crate::error::{Error, Result};
use crate::ids::NodeId;
use crate::metrics::export::{num, svg_lines, Table};
use crate::metrics::stats::{ecdf, Estimate};
use crate::protocol::ProtocolKind;
use crate::sim::edgelist::load_edge_list;
use crate::sim::topology::Topology;
use output::RunDir;

/// Seeds of the ensemble, one per run.
pub fn seeds(cfg: &ExperimentConfig) -> Vec<u64> {
    (0..cfg.runs).map(|r| stretch::run_seed(cfg.seed, r)).collect()
}

/// Makes relative file paths in `cfg` relative to `base` when the file
/// exists there.
pub fn resolve_paths(cfg: &mut ExperimentConfig, base: &Path) {
    let fix = |p: &mut Option<String>| {
        if let Some(s) = p {
            let path = Path::new(s.as_str());
            if path.is_relative() && !path.exists() {
                let alt = base.join(path);
                if alt.exists() {
                    *s = alt.to_string_lossy().into_owned();
                }
            }
        }
    };
    fix(&mut cfg.topology.path);
    fix(&mut cfg.mobility.trace);
}

pub fn load_topology(cfg: &ExperimentConfig) -> Result<Topology> {
    match cfg.topology.source {
        TopologySource::FatTree => Ok(grid::grid_topology(&cfg.topology)),
        TopologySource::EdgeList => {
            let path = PathBuf::from(cfg.topology.path.as_deref().unwrap_or_default());
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            load_edge_list(&text, grid::wired_params(&cfg.topology))
        }
    }
}

fn start(cfg: &ExperimentConfig, out: &Path) -> Result<RunDir> {
    cfg.validate()?;
    let mut dir = RunDir::create(out)?;
    dir.write_text("config.json", &(serde_json::to_string_pretty(cfg)? + "\n"))?;
    dir.write_seeds(&seeds(cfg))?;
    Ok(dir)
}

/// Runs the scenario named in `cfg` into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    match cfg.scenario {
        Scenario::StretchEval => run_stretch_eval(cfg, out).map(|_| out.to_path_buf()),
        Scenario::GridSim => run_grid_sim(cfg, out).map(|_| out.to_path_buf()),
        Scenario::TraceSim => run_trace_sim(cfg, out).map(|_| out.to_path_buf()),
    }
}

/// Stretch after each movement, for every protocol, over `runs` seeds.
pub fn run_stretch_eval(cfg: &ExperimentConfig, out: &Path) -> Result<stretch::StretchReport> {
    let mut dir = start(cfg, out)?;
    let topo = load_topology(cfg)?;
    if !topo.is_connected() {
        return Err(Error::Config("topology is not connected".into()));
    }
    let params = stretch::StretchParams {
        model: cfg.mobility.model,
        movements: cfg.mobility.movements,
        runs: cfg.runs,
        seed: cfg.seed,
        anchor: cfg.protocol.anchor.map(NodeId),
    };
    let report = stretch::stretch_eval(&topo, &cfg.protocols, &params)?;

    let mut curve = Table::new(&["protocol", "k", "mean", "ci95", "runs"]);
    let mut series = Vec::new();
    for (pi, &p) in report.protocols.iter().enumerate() {
        let mut pts = Vec::new();
        for k in 1..=params.movements {
            let e = report.estimate(pi, k);
            curve.push(vec![p.key().into(), k.to_string(), num(e.mean), num(e.ci95), e.n.to_string()]);
            pts.push((k as f64, e.mean));
        }
        series.push((p.key().to_owned(), pts));
    }
    dir.write_table("stretch.csv", &curve)?;

    let ab = report.run_means(ProtocolKind::Anchor).map(|v| Estimate::of(&v));
    let mut summary = Table::new(&["protocol", "mean", "ci95", "runs", "reduction_vs_ab_pct"]);
    for &p in &report.protocols {
        let e = Estimate::of(&report.run_means(p).expect("protocol in report"));
        let red = ab.map_or(f64::NAN, |a| 100.0 * (a.mean - e.mean) / a.mean);
        summary.push(vec![p.key().into(), num(e.mean), num(e.ci95), e.n.to_string(), num(red)]);
    }
    dir.write_table("stretch_summary.csv", &summary)?;

    let mut checks = Table::new(&["check", "count"]);
    checks.push(vec!["bound_violations".into(), report.bound_violations.to_string()]);
    checks.push(vec![
        "reachability_violations".into(),
        report.reachability_violations.to_string(),
    ]);
    dir.write_table("checks.csv", &checks)?;
    if cfg.svg {
        dir.write_text("stretch.svg", &svg_lines("Path stretch", "movements k", "stretch", &series))?;
    }
    dir.finish()?;
    Ok(report)
}

/// Every protocol at every speed, plus the optional update-period sweep.
pub fn run_grid_sim(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<grid::Ensemble>> {
    let mut dir = start(cfg, out)?;
    let seeds = seeds(cfg);
    let topo = grid::grid_topology(&cfg.topology);
    let mut warnings = Vec::new();
    if let Some(cap) = cfg.topology.wired_capacity_bps {
        let offered = cfg.traffic.cbr_rate_bps.saturating_mul(cfg.traffic.pairs as u64);
        if offered > cap {
            let w = format!("offered load {offered} b/s exceeds wired capacity {cap} b/s");
            log::warn!("{w}");
            warnings.push(w);
        }
    }
    let mut ensembles = Vec::new();
    for &p in &cfg.protocols {
        for &v in &cfg.mobility.speeds_mps {
            log::info!("grid-sim {p} at {v} m/s");
            ensembles.push(grid::ensemble(cfg, p, v, &seeds)?);
        }
    }
    let mut sweep = Vec::new();
    if !cfg.t_u_sweep_s.is_empty() {
        let v = cfg.mobility.speeds_mps.iter().copied().fold(f64::NAN, f64::max);
        for &tu in &cfg.t_u_sweep_s {
            let mut c = cfg.clone();
            c.protocol.t_u_s = tu;
            let mut e = grid::ensemble(&c, ProtocolKind::MapMe, v, &seeds)?;
            e.t_u_s = tu;
            sweep.push(e);
        }
    }

    let mut summary = Table::new(&[
        "protocol",
        "speed_mps",
        "t_u_s",
        "runs",
        "handovers",
        "loss_rate",
        "loss_ci95",
        "loss_wireless",
        "loss_mobility",
        "loss_congestion",
        "loss_timeout",
        "delay_ms",
        "delay_ci95",
        "hops",
        "hops_ci95",
        "latency_ms",
        "latency_zero_frac",
        "censored",
        "signaling",
        "signaling_per_handover",
        "max_link_util",
        "protocol_errors",
    ]);
    let mut signaling = Table::new(&["protocol", "speed_mps", "sink", "per_handover"]);
    let mut latency = Table::new(&["protocol", "speed_mps", "latency_ms", "cdf"]);
    let mut links = Table::new(&["protocol", "speed_mps", "link", "a", "b", "utilization"]);
    for e in ensembles.iter().chain(&sweep) {
        let lat = e.latencies();
        let zero = lat.iter().filter(|&&x| x == 0.0).count() as f64 / lat.len().max(1) as f64;
        let loss = e.est(|r| r.loss_rate);
        let delay = e.est(|r| r.delay_ms);
        let hops = e.est(|r| r.hops);
        summary.push(vec![
            e.protocol.key().into(),
            num(e.speed),
            num(e.t_u_s),
            e.runs.len().to_string(),
            num(e.mean_of(|r| r.handovers as f64)),
            num(loss.mean),
            num(loss.ci95),
            num(e.mean_of(|r| r.loss_by[0])),
            num(e.mean_of(|r| r.loss_by[1])),
            num(e.mean_of(|r| r.loss_by[2])),
            num(e.mean_of(|r| r.loss_by[3])),
            num(delay.mean),
            num(delay.ci95),
            num(hops.mean),
            num(hops.ci95),
            num(crate::metrics::stats::mean(&lat)),
            num(zero),
            num(e.mean_of(|r| r.censored as f64)),
            num(e.mean_of(|r| r.signaling as f64)),
            num(e.mean_of(|r| r.signaling_per_handover())),
            num(e.mean_of(|r| r.max_link_util)),
            e.runs.iter().map(|r| r.protocol_errors).sum::<u64>().to_string(),
        ]);
    }
    for e in &ensembles {
        let ho: f64 = e.runs.iter().map(|r| r.handovers as f64).sum();
        for (i, s) in grid::SINKS.iter().enumerate() {
            let n: f64 = e.runs.iter().map(|r| r.signaling_by_sink[i] as f64).sum();
            let v = if ho > 0.0 { n / ho } else { f64::NAN };
            signaling.push(vec![e.protocol.key().into(), num(e.speed), s.key().into(), num(v)]);
        }
        for (x, f) in ecdf(&e.latencies()) {
            latency.push(vec![e.protocol.key().into(), num(e.speed), num(x), num(f)]);
        }
        for (l, u) in topo.links.iter().zip(e.mean_link_util()) {
            links.push(vec![
                e.protocol.key().into(),
                num(e.speed),
                l.id.0.to_string(),
                l.a.0.to_string(),
                l.b.0.to_string(),
                num(u),
            ]);
        }
    }
    dir.write_table("summary.csv", &summary)?;
    dir.write_table("signaling.csv", &signaling)?;
    dir.write_table("latency.csv", &latency)?;
    dir.write_table("links.csv", &links)?;
    if !sweep.is_empty() {
        let mut t = Table::new(&["t_u_s", "speed_mps", "signaling_per_handover", "hops", "loss_rate"]);
        for e in &sweep {
            t.push(vec![
                num(e.t_u_s),
                num(e.speed),
                num(e.mean_of(|r| r.signaling_per_handover())),
                num(e.mean_of(|r| r.hops)),
                num(e.mean_of(|r| r.loss_rate)),
            ]);
        }
        dir.write_table("tu_sweep.csv", &t)?;
    }
    if !warnings.is_empty() {
        dir.write_text("warnings.txt", &(warnings.join("\n") + "\n"))?;
    }
    if cfg.svg {
        let series: Vec<(String, Vec<(f64, f64)>)> = cfg
            .protocols
            .iter()
            .map(|&p| {
                let pts = ensembles
                    .iter()
                    .filter(|e| e.protocol == p)
                    .map(|e| (e.speed, e.mean_of(|r| r.loss_rate)))
                    .collect();
                (p.key().to_owned(), pts)
            })
            .collect();
        dir.write_text("loss.svg", &svg_lines("Interest loss", "speed (m/s)", "loss rate", &series))?;
    }
    dir.finish()?;
    Ok(ensembles)
}

/// Play-out failures per consumer for each producer count.
pub fn run_trace_sim(cfg: &ExperimentConfig, out: &Path) -> Result<Table> {
    let mut dir = start(cfg, out)?;
    let path = PathBuf::from(cfg.mobility.trace.as_deref().unwrap_or_default());
    let trace = tracesim::load_trace(cfg, &path)?;
    let (span, cut) = tracesim::effective_duration(cfg, &trace);
    let mut warnings = Vec::new();
    if cut {
        let w = format!("trace ends at {span:.3} s; run truncated");
        log::warn!("{w}");
        warnings.push(w);
    }
    let per = cfg.playout.consumers_per_producer;
    let mut detail = Table::new(&["protocol", "producers", "run", "consumer", "failures"]);
    let mut summary = Table::new(&[
        "protocol",
        "producers",
        "runs",
        "failures_per_consumer",
        "ci95",
        "loss_rate",
        "handovers_per_producer",
    ]);
    for &p in &cfg.protocols {
        for &n in &cfg.playout.producers {
            let mut all = Vec::new();
            let mut loss = Vec::new();
            let mut ho = Vec::new();
            for (r, &seed) in seeds(cfg).iter().enumerate() {
                log::info!("trace-sim {p} with {n} producers, run {r}");
                let l = tracesim::trace_run(cfg, &trace, p, n, seed)?;
                for (c, f) in tracesim::failures_per_consumer(&l, n, per).into_iter().enumerate() {
                    detail.push(vec![p.key().into(), n.to_string(), r.to_string(), c.to_string(), f.to_string()]);
                    all.push(f as f64);
                }
                loss.push(l.loss_rate());
                ho.push(l.handovers as f64 / n.max(1) as f64);
            }
            let e = Estimate::of(&all);
            summary.push(vec![
                p.key().into(),
                n.to_string(),
                cfg.runs.to_string(),
                num(e.mean),
                num(e.ci95),
                num(crate::metrics::stats::mean(&loss)),
                num(crate::metrics::stats::mean(&ho)),
            ]);
        }
    }
    dir.write_table("playout.csv", &detail)?;
    dir.write_table("summary.csv", &summary)?;
    if !warnings.is_empty() {
        dir.write_text("warnings.txt", &(warnings.join("\n") + "\n"))?;
    }
    dir.finish()?;
    Ok(summary)
}
