//! Trace-driven play-out: vehicles from the bundled street trace publish
//! streams, static consumers play them out. Writes CSV files to a
//! directory given as the first argument (default: a temporary one).

use std::path::PathBuf;

use mapme::experiment::{run_trace_sim, ExperimentConfig, Scenario};

fn main() -> mapme::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("mapme-trace-sim"));
    let mut cfg = ExperimentConfig::preset(Scenario::TraceSim);
    let trace = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/traces/manhattan.csv");
    cfg.mobility.trace = Some(trace.to_string_lossy().into_owned());
    cfg.traffic.duration_s = 60.0;
    cfg.playout.producers = vec![1, 5];
    let table = run_trace_sim(&cfg, &out)?;
    println!("{}", table.headers.join(","));
    for row in &table.rows {
        println!("{}", row.join(","));
    }
    println!("written to {}", out.display());
    Ok(())
}
