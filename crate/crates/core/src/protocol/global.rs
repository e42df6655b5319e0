//! Ideal global routing: every router's entry for the prefix is rewritten to
//! the shortest-path next hop toward the producer's current point of
//! attachment.

use crate::ids::{LinkId, NodeId};
use crate::sim::topology::Topology;
use crate::time::SimTime;

/// One rewrite: `node` forwards on `via` (`None` at the point of attachment,
/// which uses the association face), applied after `delay`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rewrite {
    pub node: NodeId,
    pub via: Option<LinkId>,
    pub hops: u32,
    pub delay: SimTime,
}

/// Rewrites for a producer now attached at `poa`. With `per_hop` set, a node
/// `h` hops away is updated `h * per_hop` after the attachment; otherwise all
/// updates are immediate.
pub fn plan(topo: &Topology, poa: NodeId, per_hop: Option<SimTime>) -> Vec<Rewrite> {
    let tree = topo.shortest_path_tree(poa);
    (0..topo.node_count())
        .filter_map(|i| {
            let node = NodeId(i as u32);
            let hops = tree.dist[i]?;
            let via = tree.parent[i].map(|(_, l)| l);
            let delay = per_hop.map_or(SimTime::ZERO, |d| SimTime::from_micros(d.as_micros() * hops as u64));
            Some(Rewrite { node, via, hops, delay })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::topology::{LinkParams, RouterClass};

    #[test]
    fn delayed_plan_scales_with_distance() {
        let mut t = Topology::new();
        let n: Vec<NodeId> = (0..4).map(|_| t.add_node(RouterClass::Generic, None)).collect();
        for w in n.windows(2) {
            t.add_wired(w[0], w[1], LinkParams::wired_default());
        }
        let p = plan(&t, n[0], Some(SimTime::from_millis(5)));
        assert_eq!(p[3].hops, 3);
        assert_eq!(p[3].delay, SimTime::from_millis(15));
        assert_eq!(p[0].via, None);
        assert!(plan(&t, n[0], None).iter().all(|r| r.delay == SimTime::ZERO));
    }
}
