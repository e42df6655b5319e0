//! Prints a topology as JSON: the access grid by default, or an edge list
//! file given as the first argument.

use mapme::sim::edgelist::load_edge_list;
use mapme::sim::topology::{build_grid_fattree, GridFatTree, LinkParams};

fn main() -> mapme::Result<()> {
    let topo = match std::env::args().nth(1) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| mapme::Error::io(&path, e))?;
            load_edge_list(&text, LinkParams::wired_default())?
        }
        None => build_grid_fattree(&GridFatTree::default()),
    };
    eprintln!("{} nodes, {} links", topo.node_count(), topo.links.len());
    println!("{}", topo.to_json());
    Ok(())
}
