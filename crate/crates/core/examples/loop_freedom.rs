//! Random producer movements on random trees with lossy signaling. The
//! forwarding state is checked for cycles and reachability each time the
//! network goes quiet.

use mapme::experiment::config::MobilityModel;
use mapme::experiment::property::{run_suite, TreeSuite};

fn main() {
    for model in [MobilityModel::UniformJump, MobilityModel::RwpGraph] {
        let s = TreeSuite {
            sequences: 50,
            model,
            ..TreeSuite::default()
        };
        let r = run_suite(&s);
        println!(
            "{model:?}: {} sequences, {} checks, {} cycles, {} unreachable, {} not a tree, {}/{} over bound",
            r.sequences, r.checks, r.cycles, r.unreachable, r.not_tree, r.bound_violations, r.bound_checks
        );
    }
}
