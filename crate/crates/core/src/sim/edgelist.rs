//! Plain-text edge lists: one `u v [weight]` per line, `#` comments.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::ids::NodeId;
use crate::sim::topology::{LinkParams, RouterClass, Topology};

/// Parses an undirected edge list and keeps its largest connected component.
///
/// Duplicate edges and self-loops are dropped. Surviving nodes are renumbered
/// `0..n` in increasing order of their original label. Weights are validated
/// but routing is by hop count. Every node is an access node; the root is
/// node 0.
pub fn load_edge_list(text: &str, params: LinkParams) -> Result<Topology> {
    let mut edges: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut labels: BTreeSet<u64> = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: &str| Error::Parse {
            line: i + 1,
            msg: format!("{msg}: {raw:?}"),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err("expected `u v [weight]`"));
        }
        let u: u64 = fields[0].parse().map_err(|_| parse_err("bad node label"))?;
        let v: u64 = fields[1].parse().map_err(|_| parse_err("bad node label"))?;
        if let Some(w) = fields.get(2) {
            let w: f64 = w.parse().map_err(|_| parse_err("bad weight"))?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(parse_err("weight must be positive"));
            }
        }
        labels.insert(u);
        labels.insert(v);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    if labels.is_empty() {
        return Err(Error::Config("edge list has no nodes".into()));
    }

    let mut adj: BTreeMap<u64, Vec<u64>> = labels.iter().map(|&l| (l, Vec::new())).collect();
    for &(u, v) in &edges {
        adj.get_mut(&u).expect("label").push(v);
        adj.get_mut(&v).expect("label").push(u);
    }
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut best: Vec<u64> = Vec::new();
    for &start in &labels {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = vec![start];
        seen.insert(start);
        let mut q = VecDeque::from([start]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[&u] {
                if seen.insert(v) {
                    comp.push(v);
                    q.push_back(v);
                }
            }
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best.sort_unstable();
    let index: BTreeMap<u64, NodeId> = best
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, NodeId(i as u32)))
        .collect();

    let mut t = Topology::new();
    for _ in &best {
        t.add_node(RouterClass::Generic, None);
    }
    for &(u, v) in &edges {
        if let (Some(&a), Some(&b)) = (index.get(&u), index.get(&v)) {
            t.add_wired(a, b, params);
        }
    }
    t.access = (0..best.len() as u32).map(NodeId).collect();
    t.root = Some(NodeId(0));
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> Result<Topology> {
        load_edge_list(s, LinkParams::wired_default())
    }

    #[test]
    fn path_graph() {
        let t = load("0 1\n1 2").unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.links.len(), 2);
    }

    #[test]
    fn keeps_largest_component() {
        let t = load("# two parts\n0 1\n2 3\n3 4\n").unwrap();
        assert_eq!(t.node_count(), 3);
        assert!(t.is_connected());
    }

    #[test]
    fn duplicates_collapse() {
        let t = load("0 1\n1 0\n0 1 2.5\n1 1\n").unwrap();
        assert_eq!(t.node_count(), 2);
        assert_eq!(t.links.len(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match load("0 1\n\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("# nothing\n"), Err(Error::Config(_))));
        assert!(matches!(load("0 1 -1\n"), Err(Error::Parse { line: 1, .. })));
    }
}
