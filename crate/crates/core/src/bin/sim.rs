use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mapme::experiment::{self, ExperimentConfig, Scenario};

#[derive(Parser)]
#[command(name = "sim", version, about = "Producer mobility experiments")]
struct Cli {
    #[command(subcommand)]
    scenario: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Path stretch after k movements, with instantaneous updates
    StretchEval(Args),
    /// Event-driven run on the access grid with roaming producers
    GridSim(Args),
    /// Trace-driven run with play-out consumers
    TraceSim(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON configuration; missing fields take scenario defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration field, e.g. `traffic.pairs=3`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
}

fn build(scenario: Scenario, a: &Args) -> mapme::Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| mapme::Error::io(p, e))?;
            // start from the scenario preset so a partial file only overrides
            let mut doc = serde_json::to_value(ExperimentConfig::preset(scenario))?;
            let user: serde_json::Value = serde_json::from_str(&text)?;
            merge(&mut doc, user);
            let mut c: ExperimentConfig = serde_json::from_value(doc)?;
            let base = p.parent().map(PathBuf::from).unwrap_or_default();
            experiment::resolve_paths(&mut c, &base);
            c
        }
        None => ExperimentConfig::preset(scenario),
    };
    if cfg.scenario != scenario {
        return Err(mapme::Error::Config(format!(
            "config is for {}, command is {}",
            cfg.scenario.key(),
            scenario.key()
        )));
    }
    for s in &a.set {
        cfg.apply_override(s)?;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(r) = a.runs {
        cfg.runs = r;
    }
    Ok(cfg)
}

fn merge(base: &mut serde_json::Value, over: serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (scenario, args) = match &cli.scenario {
        Cmd::StretchEval(a) => (Scenario::StretchEval, a),
        Cmd::GridSim(a) => (Scenario::GridSim, a),
        Cmd::TraceSim(a) => (Scenario::TraceSim, a),
    };
    let result = build(scenario, args).and_then(|cfg| experiment::run(&cfg, &args.out));
    match result {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sim: {e}");
            ExitCode::FAILURE
        }
    }
}
