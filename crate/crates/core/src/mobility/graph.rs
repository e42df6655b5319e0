//! Producer movements on a router graph.

use rand::Rng;

use crate::ids::NodeId;
use crate::sim::topology::Topology;

/// Uniformly random node other than `current`.
pub fn graph_uniform_jump<R: Rng>(current: NodeId, n: usize, rng: &mut R) -> NodeId {
    assert!(n >= 2, "need at least two nodes");
    let k = rng.gen_range(0..n - 1) as u32;
    if k >= current.0 {
        NodeId(k + 1)
    } else {
        NodeId(k)
    }
}

/// Random waypoint on a graph: one shortest-path hop per move toward a
/// uniformly drawn waypoint, lowest-id neighbor first on ties.
#[derive(Debug, Clone, Default)]
pub struct GraphRwp {
    pub waypoint: Option<NodeId>,
}

impl GraphRwp {
    pub fn next<R: Rng>(&mut self, current: NodeId, topo: &Topology, rng: &mut R) -> NodeId {
        let n = topo.node_count();
        let w = match self.waypoint {
            Some(w) if w != current => w,
            _ => {
                let w = graph_uniform_jump(current, n, rng);
                self.waypoint = Some(w);
                w
            }
        };
        let dist = topo.bfs(w);
        let d = dist[current.index()].expect("connected graph");
        topo.wired_neighbors(current)
            .iter()
            .map(|&(v, _)| v)
            .find(|v| dist[v.index()] == Some(d - 1))
            .expect("a neighbor is one hop closer")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::topology::{random_tree, LinkParams, RouterClass};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> Topology {
        let mut t = Topology::new();
        let v: Vec<NodeId> = (0..n).map(|_| t.add_node(RouterClass::Generic, None)).collect();
        for w in v.windows(2) {
            t.add_wired(w[0], w[1], LinkParams::wired_default());
        }
        t
    }

    #[test]
    fn two_nodes_always_jump_to_the_other() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(graph_uniform_jump(NodeId(0), 2, &mut rng), NodeId(1));
        }
    }

    #[test]
    fn uniform_jump_frequencies_within_three_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 7;
        let draws = 100_000;
        let mut counts = vec![0u32; n];
        for _ in 0..draws {
            let v = graph_uniform_jump(NodeId(3), n, &mut rng);
            counts[v.index()] += 1;
        }
        assert_eq!(counts[3], 0);
        let p = 1.0 / (n - 1) as f64;
        let expect = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            if i != 3 {
                assert!((c as f64 - expect).abs() < 3.0 * sigma, "node {i}: {c}");
            }
        }
    }

    #[test]
    fn rwp_steps_toward_waypoint() {
        let t = path(4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut m = GraphRwp {
            waypoint: Some(NodeId(3)),
        };
        assert_eq!(m.next(NodeId(0), &t, &mut rng), NodeId(1));
    }

    #[test]
    fn rwp_leg_length_matches_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random_tree(30, &mut rng, (1, 1), LinkParams::wired_default());
        let mut m = GraphRwp::default();
        let mut cur = NodeId(0);
        for _ in 0..20 {
            // the first hop of a leg draws the waypoint
            let start = cur;
            let next = m.next(cur, &t, &mut rng);
            let w = m.waypoint.unwrap();
            let d = t.bfs(w);
            let mut steps = 1;
            cur = next;
            while cur != w {
                let nx = m.next(cur, &t, &mut rng);
                assert_eq!(d[nx.index()].unwrap() + 1, d[cur.index()].unwrap());
                cur = nx;
                steps += 1;
            }
            assert_eq!(steps, d[start.index()].unwrap());
        }
    }
}
