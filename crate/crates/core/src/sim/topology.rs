//! Router graphs: the access grid with its aggregation tree, random trees for
//! property tests, and shortest-path routing trees.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ids::{LinkId, NodeId};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouterClass {
    Access,
    Edge,
    Backhaul,
    Core,
    /// Routers of graphs without a level structure.
    Generic,
}

impl RouterClass {
    pub fn key(self) -> &'static str {
        match self {
            RouterClass::Access => "access",
            RouterClass::Edge => "edge",
            RouterClass::Backhaul => "backhaul",
            RouterClass::Core => "core",
            RouterClass::Generic => "generic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkKind {
    Wired,
    /// Dedicated one-hop link between adjacent points of attachment.
    Neighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub delay: SimTime,
    /// `None` is unbounded.
    pub capacity_bps: Option<u64>,
    /// Loss probability for every message.
    pub loss: f64,
    /// Additional loss probability for control messages only.
    pub control_loss: f64,
    /// Data-plane drop-tail limit in packets; `None` is unbounded.
    pub queue_limit: Option<usize>,
}

impl LinkParams {
    pub fn wired_default() -> Self {
        LinkParams {
            delay: SimTime::from_millis(5),
            capacity_bps: Some(10_000_000),
            loss: 0.0,
            control_loss: 0.0,
            queue_limit: Some(100),
        }
    }

    pub fn neighbor_default() -> Self {
        LinkParams {
            delay: SimTime::from_millis(1),
            ..Self::wired_default()
        }
    }

    pub fn wireless_default() -> Self {
        LinkParams {
            delay: SimTime::from_millis(2),
            capacity_bps: Some(50_000_000),
            ..Self::wired_default()
        }
    }

    /// Delay plus serialization of `bytes`.
    pub fn transit(&self, bytes: u32) -> SimTime {
        self.delay + SimTime::serialization(bytes, self.capacity_bps)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: NodeId,
    pub class: RouterClass,
    /// Position in metres, for points of attachment on a grid.
    pub pos: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkSpec {
    pub id: LinkId,
    pub a: NodeId,
    pub b: NodeId,
    pub kind: LinkKind,
    pub params: LinkParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub rows: usize,
    pub cols: usize,
    pub cell_side: f64,
}

/// Shortest-path tree rooted at some node, over wired links.
#[derive(Debug, Clone)]
pub struct SpTree {
    pub root: NodeId,
    /// Hop distance to the root; `None` if unreachable.
    pub dist: Vec<Option<u32>>,
    /// Next hop toward the root and the link to it.
    pub parent: Vec<Option<(NodeId, LinkId)>>,
}

impl SpTree {
    /// Hops along tree edges between `a` and `b`.
    pub fn tree_distance(&self, a: NodeId, b: NodeId) -> u32 {
        let path_a = self.path_to_root(a);
        let path_b = self.path_to_root(b);
        let mut i = path_a.len();
        let mut j = path_b.len();
        while i > 0 && j > 0 && path_a[i - 1] == path_b[j - 1] {
            i -= 1;
            j -= 1;
        }
        (i + j) as u32
    }

    /// `node`, its parent, ..., root.
    pub fn path_to_root(&self, node: NodeId) -> Vec<NodeId> {
        let mut v = vec![node];
        let mut cur = node;
        while let Some((p, _)) = self.parent[cur.index()] {
            v.push(p);
            cur = p;
        }
        v
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Topology {
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<LinkSpec>,
    /// Nodes producers and consumers may associate with.
    pub access: Vec<NodeId>,
    pub grid: Option<GridInfo>,
    /// Aggregation root, where anchors and rendezvous nodes sit by default.
    pub root: Option<NodeId>,
    #[serde(skip)]
    adj: Vec<Vec<(NodeId, LinkId)>>,
}

impl Topology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn class(&self, n: NodeId) -> RouterClass {
        self.nodes[n.index()].class
    }

    pub fn add_node(&mut self, class: RouterClass, pos: Option<[f64; 2]>) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(NodeSpec { id, class, pos });
        self.adj.push(Vec::new());
        id
    }

    fn add_link(&mut self, a: NodeId, b: NodeId, kind: LinkKind, params: LinkParams) -> LinkId {
        let id = LinkId(self.links.len() as u32);
        self.links.push(LinkSpec { id, a, b, kind, params });
        if kind == LinkKind::Wired {
            self.adj[a.index()].push((b, id));
            self.adj[b.index()].push((a, id));
            self.adj[a.index()].sort();
            self.adj[b.index()].sort();
        }
        id
    }

    pub fn add_wired(&mut self, a: NodeId, b: NodeId, params: LinkParams) -> LinkId {
        self.add_link(a, b, LinkKind::Wired, params)
    }

    pub fn add_neighbor(&mut self, a: NodeId, b: NodeId, params: LinkParams) -> LinkId {
        self.add_link(a, b, LinkKind::Neighbor, params)
    }

    /// Wired neighbors of `n`, sorted by node id.
    pub fn wired_neighbors(&self, n: NodeId) -> &[(NodeId, LinkId)] {
        &self.adj[n.index()]
    }

    /// Rebuilds adjacency after deserialization.
    pub fn reindex(&mut self) {
        self.adj = vec![Vec::new(); self.nodes.len()];
        for l in &self.links {
            if l.kind == LinkKind::Wired {
                self.adj[l.a.index()].push((l.b, l.id));
                self.adj[l.b.index()].push((l.a, l.id));
            }
        }
        for v in &mut self.adj {
            v.sort();
        }
    }

    /// Hop distances from `root` over wired links.
    pub fn bfs(&self, root: NodeId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.node_count()];
        let mut q = VecDeque::new();
        dist[root.index()] = Some(0);
        q.push_back(root);
        while let Some(u) = q.pop_front() {
            let d = dist[u.index()].expect("queued nodes have a distance");
            for &(v, _) in self.wired_neighbors(u) {
                if dist[v.index()].is_none() {
                    dist[v.index()] = Some(d + 1);
                    q.push_back(v);
                }
            }
        }
        dist
    }

    /// Shortest-path tree toward `root`. Each node's parent is its
    /// lowest-id neighbor one hop closer to the root.
    pub fn shortest_path_tree(&self, root: NodeId) -> SpTree {
        let dist = self.bfs(root);
        let parent = (0..self.node_count())
            .map(|i| {
                let d = dist[i]?;
                if d == 0 {
                    return None;
                }
                self.adj[i]
                    .iter()
                    .find(|(v, _)| dist[v.index()] == Some(d - 1))
                    .copied()
            })
            .collect();
        SpTree { root, dist, parent }
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.bfs(NodeId(0)).iter().all(Option::is_some)
    }

    /// Pretty JSON document of nodes and links.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Link {
            id: LinkId,
            a: NodeId,
            b: NodeId,
            kind: LinkKind,
            delay_ms: f64,
            capacity_bps: Option<u64>,
            loss: f64,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            nodes: &'a [NodeSpec],
            links: Vec<Link>,
            access: &'a [NodeId],
            grid: Option<GridInfo>,
            root: Option<NodeId>,
        }
        let doc = Doc {
            nodes: &self.nodes,
            links: self
                .links
                .iter()
                .map(|l| Link {
                    id: l.id,
                    a: l.a,
                    b: l.b,
                    kind: l.kind,
                    delay_ms: l.params.delay.as_millis_f64(),
                    capacity_bps: l.params.capacity_bps,
                    loss: l.params.loss,
                })
                .collect(),
            access: &self.access,
            grid: self.grid,
            root: self.root,
        };
        serde_json::to_string_pretty(&doc).expect("topology serializes")
    }

    /// Access point index nearest to `(x, y)` on a grid topology.
    pub fn grid_cell(&self, x: f64, y: f64) -> Option<NodeId> {
        let g = self.grid?;
        let c = ((x / g.cell_side).floor() as isize).clamp(0, g.cols as isize - 1) as usize;
        let r = ((y / g.cell_side).floor() as isize).clamp(0, g.rows as isize - 1) as usize;
        Some(self.access[r * g.cols + c])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridFatTree {
    pub rows: usize,
    pub cols: usize,
    pub cell_side: f64,
    pub wired: LinkParams,
    pub neighbor: LinkParams,
    pub neighbor_links: bool,
}

impl Default for GridFatTree {
    fn default() -> Self {
        GridFatTree {
            rows: 6,
            cols: 6,
            cell_side: 80.0,
            wired: LinkParams::wired_default(),
            neighbor: LinkParams::neighbor_default(),
            neighbor_links: true,
        }
    }
}

impl GridFatTree {
    /// Large grid preset used for city-scale trace runs.
    pub fn city() -> Self {
        GridFatTree {
            rows: 27,
            cols: 27,
            ..Self::default()
        }
    }
}

/// Access grid under a three-level aggregation tree.
///
/// Access points sit at cell centres, row-major. Each 2x2 block of cells
/// hangs off one edge router, each row of edge routers off one backhaul
/// router, and all backhaul routers off a single core root, so every access
/// point is three wired hops from the root. Adjacent access points are
/// joined by neighbor links when enabled.
pub fn build_grid_fattree(p: &GridFatTree) -> Topology {
    assert!(p.rows >= 1 && p.cols >= 1, "grid needs at least one cell");
    let mut t = Topology::new();
    let mut aps = Vec::with_capacity(p.rows * p.cols);
    for r in 0..p.rows {
        for c in 0..p.cols {
            let pos = [(c as f64 + 0.5) * p.cell_side, (r as f64 + 0.5) * p.cell_side];
            aps.push(t.add_node(RouterClass::Access, Some(pos)));
        }
    }
    let er = p.rows.div_ceil(2);
    let ec = p.cols.div_ceil(2);
    let edges: Vec<NodeId> = (0..er * ec).map(|_| t.add_node(RouterClass::Edge, None)).collect();
    let backhaul: Vec<NodeId> = (0..er).map(|_| t.add_node(RouterClass::Backhaul, None)).collect();
    let core = t.add_node(RouterClass::Core, None);
    for r in 0..p.rows {
        for c in 0..p.cols {
            t.add_wired(aps[r * p.cols + c], edges[(r / 2) * ec + c / 2], p.wired);
        }
    }
    for r in 0..er {
        for c in 0..ec {
            t.add_wired(edges[r * ec + c], backhaul[r], p.wired);
        }
    }
    for &b in &backhaul {
        t.add_wired(b, core, p.wired);
    }
    if p.neighbor_links {
        for r in 0..p.rows {
            for c in 0..p.cols {
                let a = aps[r * p.cols + c];
                if c + 1 < p.cols {
                    t.add_neighbor(a, aps[r * p.cols + c + 1], p.neighbor);
                }
                if r + 1 < p.rows {
                    t.add_neighbor(a, aps[(r + 1) * p.cols + c], p.neighbor);
                }
            }
        }
    }
    t.access = aps;
    t.grid = Some(GridInfo {
        rows: p.rows,
        cols: p.cols,
        cell_side: p.cell_side,
    });
    t.root = Some(core);
    t
}

/// Uniform random recursive tree on `n` nodes: node `i` links to a uniform
/// node among `0..i`. Link delays are drawn from `delay_ms` (inclusive).
/// Every node is an access node; node 0 is the root.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R, delay_ms: (u64, u64), base: LinkParams) -> Topology {
    assert!(n >= 1);
    let mut t = Topology::new();
    for _ in 0..n {
        t.add_node(RouterClass::Generic, None);
    }
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let delay = SimTime::from_micros(rng.gen_range(delay_ms.0 * 1000..=delay_ms.1 * 1000));
        t.add_wired(NodeId(j as u32), NodeId(i as u32), LinkParams { delay, ..base });
    }
    t.access = (0..n as u32).map(NodeId).collect();
    t.root = Some(NodeId(0));
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_grid_shape() {
        let t = build_grid_fattree(&GridFatTree::default());
        let count = |c| t.nodes.iter().filter(|n| n.class == c).count();
        assert_eq!(count(RouterClass::Access), 36);
        assert_eq!(count(RouterClass::Edge), 9);
        assert_eq!(count(RouterClass::Backhaul), 3);
        assert_eq!(count(RouterClass::Core), 1);
        let root = t.root.unwrap();
        let d = t.bfs(root);
        // three wired hops; the wireless hop from the mobile makes four
        for &ap in &t.access {
            assert_eq!(d[ap.index()], Some(3));
        }
        let neighbors = t.links.iter().filter(|l| l.kind == LinkKind::Neighbor).count();
        assert_eq!(neighbors, 2 * 6 * 5);
        assert!(t.is_connected());
    }

    #[test]
    fn one_cell_grid_is_a_chain() {
        let t = build_grid_fattree(&GridFatTree {
            rows: 1,
            cols: 1,
            ..Default::default()
        });
        assert_eq!(t.node_count(), 4);
        assert_eq!(t.bfs(t.root.unwrap())[0], Some(3));
    }

    #[test]
    fn sp_tree_prefers_lowest_id_parent() {
        // square 0-1, 0-2, 1-3, 2-3: node 3 has two parents at distance 1
        let mut t = Topology::new();
        let n: Vec<NodeId> = (0..4).map(|_| t.add_node(RouterClass::Generic, None)).collect();
        let w = LinkParams::wired_default();
        t.add_wired(n[0], n[2], w);
        t.add_wired(n[0], n[1], w);
        t.add_wired(n[2], n[3], w);
        t.add_wired(n[1], n[3], w);
        let sp = t.shortest_path_tree(n[0]);
        assert_eq!(sp.parent[3].unwrap().0, n[1]);
        assert_eq!(sp.dist[3], Some(2));
        assert_eq!(sp.tree_distance(n[1], n[2]), 2);
        assert_eq!(sp.tree_distance(n[3], n[3]), 0);
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 10, 50] {
            let t = random_tree(n, &mut rng, (1, 10), LinkParams::wired_default());
            assert_eq!(t.links.len(), n - 1);
            assert!(t.is_connected());
        }
    }

    #[test]
    fn json_dump_lists_everything() {
        let t = build_grid_fattree(&GridFatTree::default());
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 49);
        assert_eq!(v["links"][0]["delay_ms"], 5.0);
    }

    #[test]
    fn grid_cell_lookup() {
        let t = build_grid_fattree(&GridFatTree::default());
        assert_eq!(t.grid_cell(10.0, 10.0), Some(t.access[0]));
        assert_eq!(t.grid_cell(85.0, 170.0), Some(t.access[2 * 6 + 1]));
        assert_eq!(t.grid_cell(1e6, -5.0), Some(t.access[5]));
    }
}
