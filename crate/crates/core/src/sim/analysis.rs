//! Structural checks on the forwarding state of one prefix.

use std::collections::VecDeque;

use crate::ids::NodeId;

/// Next hops toward a producer, by router.
#[derive(Debug, Clone)]
pub struct ForwardingGraph {
    /// Routers each router forwards to.
    pub next: Vec<Vec<NodeId>>,
    /// Routers with a next hop on the producer's association face.
    pub to_producer: Vec<bool>,
}

impl ForwardingGraph {
    pub fn len(&self) -> usize {
        self.next.len()
    }

    pub fn is_empty(&self) -> bool {
        self.next.is_empty()
    }

    /// No directed cycle among router next hops.
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm on the next-hop relation
        let n = self.len();
        let mut indeg = vec![0usize; n];
        for v in &self.next {
            for w in v {
                indeg[w.index()] += 1;
            }
        }
        let mut q: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(u) = q.pop_front() {
            seen += 1;
            for w in &self.next[u] {
                indeg[w.index()] -= 1;
                if indeg[w.index()] == 0 {
                    q.push_back(w.index());
                }
            }
        }
        seen == n
    }

    /// Routers from which some next-hop path reaches `target`.
    pub fn reaching(&self, target: NodeId) -> Vec<bool> {
        let n = self.len();
        let mut rev = vec![Vec::new(); n];
        for (u, v) in self.next.iter().enumerate() {
            for w in v {
                rev[w.index()].push(u);
            }
        }
        let mut ok = vec![false; n];
        ok[target.index()] = true;
        let mut q = VecDeque::from([target.index()]);
        while let Some(u) = q.pop_front() {
            for &p in &rev[u] {
                if !ok[p] {
                    ok[p] = true;
                    q.push_back(p);
                }
            }
        }
        ok
    }

    /// Every router reaches `target` by following next hops.
    pub fn all_reach(&self, target: NodeId) -> bool {
        self.reaching(target).into_iter().all(|b| b)
    }

    /// The next hops form a spanning tree directed toward `target`, which
    /// itself forwards only to the producer.
    pub fn is_tree_toward(&self, target: NodeId) -> bool {
        self.to_producer[target.index()]
            && self.next[target.index()].is_empty()
            && self
                .next
                .iter()
                .enumerate()
                .all(|(i, v)| i == target.index() || v.len() == 1)
            && self.is_acyclic()
            && self.all_reach(target)
    }
}
