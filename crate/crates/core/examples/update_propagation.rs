//! A producer hops around a small ring; after each move every router's FIB
//! entry and its distance to the producer are printed.

use mapme::experiment::stretch::InstantNetwork;
use mapme::sim::edgelist::load_edge_list;
use mapme::sim::topology::LinkParams;
use mapme::{name, NodeId};

const RING: &str = "0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n0 3\n";

fn main() -> mapme::Result<()> {
    let topo = load_edge_list(RING, LinkParams::wired_default())?;
    let prefix = name("/camera");
    let mut net = InstantNetwork::new(&topo, prefix.clone(), NodeId(0));
    for to in [1, 2, 5, 4] {
        net.move_to(NodeId(to));
        println!("producer at n{to}, {} update messages so far", net.messages);
        for n in 0..topo.node_count() {
            let node = NodeId(n as u32);
            let e = net.node(node).fib.get(&prefix).expect("route installed");
            let hops = net.realized_hops(node).map_or("-".to_string(), |h| h.to_string());
            println!("  n{n}: seq {:>2} nexthops {:?} hops {hops}", e.seq.0, e.nexthops);
        }
        assert!(net.forwarding_graph().is_acyclic());
    }
    Ok(())
}
