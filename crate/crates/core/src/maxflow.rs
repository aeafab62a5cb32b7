//! Integer max-flow / min-cut on a directed network.
//!
//! The solver is the Boykov-Kolmogorov augmenting-path scheme: two search
//! trees grow from the source and the sink, meet on an unsaturated arc, push
//! the bottleneck, and then repair the trees by re-adopting orphaned vertices
//! instead of rebuilding them from scratch.

use std::collections::VecDeque;

use thiserror::Error;

/// Capacity and flow unit. Partition networks use integer microseconds.
pub type Capacity = i64;

/// Capacities at or above this value are treated as unbreakable. It is large
/// enough to dominate any finite desk-scale cut and small enough that
/// hundreds of them still sum inside an `i64`.
pub const INFINITE: Capacity = 1 << 53;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("source and sink must differ")]
    SourceIsSink,
    #[error("negative capacity {0}")]
    NegativeCapacity(Capacity),
    #[error("minimum cut is unbounded (every s-t cut crosses an infinite arc)")]
    Unbounded,
}

pub type ArcId = usize;

/// Residual network: arcs are stored in pairs, `a` and `a ^ 1` being each
/// other's reverse with independent capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    n: usize,
    source: usize,
    sink: usize,
    head: Vec<usize>,
    cap: Vec<Capacity>,
    adj: Vec<Vec<ArcId>>,
}

impl FlowNetwork {
    pub fn new(n: usize, source: usize, sink: usize) -> Result<Self, FlowError> {
        if source >= n {
            return Err(FlowError::VertexOutOfRange(source));
        }
        if sink >= n {
            return Err(FlowError::VertexOutOfRange(sink));
        }
        if source == sink {
            return Err(FlowError::SourceIsSink);
        }
        Ok(FlowNetwork { n, source, sink, head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n] })
    }

    /// Adds `from -> to` with capacity `cap` and its reverse with `rev_cap`.
    /// Returns the id of the forward arc; the reverse is `id ^ 1`.
    pub fn add_arc_pair(
        &mut self,
        from: usize,
        to: usize,
        cap: Capacity,
        rev_cap: Capacity,
    ) -> Result<ArcId, FlowError> {
        for v in [from, to] {
            if v >= self.n {
                return Err(FlowError::VertexOutOfRange(v));
            }
        }
        for c in [cap, rev_cap] {
            if c < 0 {
                return Err(FlowError::NegativeCapacity(c));
            }
        }
        let id = self.head.len();
        self.head.push(to);
        self.cap.push(cap.min(INFINITE));
        self.adj[from].push(id);
        self.head.push(from);
        self.cap.push(rev_cap.min(INFINITE));
        self.adj[to].push(id + 1);
        Ok(id)
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: Capacity) -> Result<ArcId, FlowError> {
        self.add_arc_pair(from, to, cap, 0)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.head.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arc_from(&self, a: ArcId) -> usize {
        self.head[a ^ 1]
    }

    pub fn arc_to(&self, a: ArcId) -> usize {
        self.head[a]
    }

    pub fn capacity(&self, a: ArcId) -> Capacity {
        self.cap[a]
    }

    /// Iterates over every stored arc as `(id, from, to, capacity)`.
    pub fn arcs(&self) -> impl Iterator<Item = (ArcId, usize, usize, Capacity)> + '_ {
        (0..self.head.len()).map(move |a| (a, self.arc_from(a), self.arc_to(a), self.cap[a]))
    }
}

/// Result of a max-flow computation.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxFlow {
    pub value: Capacity,
    /// `source_side[v]` is true when `v` is reachable from the source in the
    /// final residual network (the minimal source set among all min cuts).
    pub source_side: Vec<bool>,
    /// Final residual capacity of every arc.
    pub residual: Vec<Capacity>,
}

impl MaxFlow {
    /// Arcs of `net` crossing from the source side to the sink side.
    pub fn cut_arcs<'a>(&'a self, net: &'a FlowNetwork) -> impl Iterator<Item = ArcId> + 'a {
        net.arcs().filter(move |&(_, u, v, c)| c > 0 && self.source_side[u] && !self.source_side[v]).map(|(a, ..)| a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tree {
    Free,
    Source,
    Sink,
}

struct Solver<'a> {
    net: &'a FlowNetwork,
    res: Vec<Capacity>,
    tree: Vec<Tree>,
    /// Source tree: arc `parent -> v`. Sink tree: arc `v -> parent`.
    parent: Vec<Option<ArcId>>,
    active: VecDeque<usize>,
    queued: Vec<bool>,
    orphans: VecDeque<usize>,
    flow: Capacity,
}

/// Computes a maximum flow without modifying `net`.
///
/// Deterministic: the search visits arcs in insertion order.
pub fn max_flow(net: &FlowNetwork) -> Result<MaxFlow, FlowError> {
    let mut s = Solver {
        net,
        res: net.cap.clone(),
        tree: vec![Tree::Free; net.n],
        parent: vec![None; net.n],
        active: VecDeque::new(),
        queued: vec![false; net.n],
        orphans: VecDeque::new(),
        flow: 0,
    };
    s.run()?;
    let source_side = s.residual_reach();
    Ok(MaxFlow { value: s.flow, source_side, residual: s.res })
}

impl Solver<'_> {
    fn run(&mut self) -> Result<(), FlowError> {
        let (src, snk) = (self.net.source, self.net.sink);
        self.tree[src] = Tree::Source;
        self.tree[snk] = Tree::Sink;
        self.activate(src);
        self.activate(snk);

        while let Some(p) = self.active.pop_front() {
            self.queued[p] = false;
            if self.tree[p] == Tree::Free {
                continue;
            }
            if let Some(bridge) = self.grow(p) {
                self.augment(bridge)?;
                self.adopt();
                // p may still have unexplored neighbours
                if self.tree[p] != Tree::Free && !self.queued[p] {
                    self.queued[p] = true;
                    self.active.push_front(p);
                }
            }
        }
        Ok(())
    }

    fn activate(&mut self, v: usize) {
        if !self.queued[v] {
            self.queued[v] = true;
            self.active.push_back(v);
        }
    }

    /// Expands `p` into free neighbours; returns a source-to-sink bridge arc
    /// as soon as the two trees touch.
    fn grow(&mut self, p: usize) -> Option<ArcId> {
        let net = self.net;
        for &a in &net.adj[p] {
            let q = net.head[a];
            match self.tree[p] {
                Tree::Source => {
                    if self.res[a] == 0 {
                        continue;
                    }
                    match self.tree[q] {
                        Tree::Free => {
                            self.tree[q] = Tree::Source;
                            self.parent[q] = Some(a);
                            self.activate(q);
                        }
                        Tree::Sink => return Some(a),
                        Tree::Source => {}
                    }
                }
                Tree::Sink => {
                    let back = a ^ 1;
                    if self.res[back] == 0 {
                        continue;
                    }
                    match self.tree[q] {
                        Tree::Free => {
                            self.tree[q] = Tree::Sink;
                            self.parent[q] = Some(back);
                            self.activate(q);
                        }
                        Tree::Source => return Some(back),
                        Tree::Sink => {}
                    }
                }
                Tree::Free => unreachable!("free vertices are never expanded"),
            }
        }
        None
    }

    fn augment(&mut self, bridge: ArcId) -> Result<(), FlowError> {
        let net = self.net;
        let mut path = vec![bridge];
        let mut v = net.head[bridge ^ 1];
        while let Some(a) = self.parent[v] {
            path.push(a);
            v = net.head[a ^ 1];
        }
        let mut v = net.head[bridge];
        while let Some(a) = self.parent[v] {
            path.push(a);
            v = net.head[a];
        }
        let delta = path.iter().map(|&a| self.res[a]).min().unwrap_or(0);
        if delta >= INFINITE {
            return Err(FlowError::Unbounded);
        }
        for &a in &path {
            if self.res[a] < INFINITE {
                self.res[a] -= delta;
            }
            self.res[a ^ 1] = self.res[a ^ 1].saturating_add(delta).min(INFINITE);
        }
        self.flow = self.flow.saturating_add(delta);
        if self.flow >= INFINITE {
            return Err(FlowError::Unbounded);
        }
        for &a in &path[1..] {
            if self.res[a] == 0 {
                let from = net.head[a ^ 1];
                let to = net.head[a];
                // the child end of a saturated tree arc is orphaned
                let child = if self.tree[to] == Tree::Source && self.parent[to] == Some(a) { to } else { from };
                self.parent[child] = None;
                self.orphans.push_back(child);
            }
        }
        Ok(())
    }

    fn root_of(&self, t: Tree) -> usize {
        match t {
            Tree::Source => self.net.source,
            Tree::Sink => self.net.sink,
            Tree::Free => unreachable!(),
        }
    }

    /// Follows parent arcs from `v`; true when they lead to the tree root.
    fn rooted(&self, mut v: usize, t: Tree) -> bool {
        let root = self.root_of(t);
        loop {
            if v == root {
                return true;
            }
            match self.parent[v] {
                None => return false,
                Some(a) => {
                    v = match t {
                        Tree::Source => self.net.head[a ^ 1],
                        _ => self.net.head[a],
                    }
                }
            }
        }
    }

    fn adopt(&mut self) {
        let net = self.net;
        while let Some(p) = self.orphans.pop_front() {
            let t = self.tree[p];
            let mut new_parent = None;
            for &a in &net.adj[p] {
                let q = net.head[a];
                if self.tree[q] != t {
                    continue;
                }
                let link = match t {
                    Tree::Source => a ^ 1,
                    _ => a,
                };
                if self.res[link] > 0 && self.rooted(q, t) {
                    new_parent = Some(link);
                    break;
                }
            }
            if new_parent.is_some() {
                self.parent[p] = new_parent;
                continue;
            }
            for &a in &net.adj[p] {
                let q = net.head[a];
                if self.tree[q] != t {
                    continue;
                }
                let link = match t {
                    Tree::Source => a ^ 1,
                    _ => a,
                };
                if self.res[link] > 0 {
                    self.activate(q);
                }
                if let Some(pa) = self.parent[q] {
                    let up = match t {
                        Tree::Source => net.head[pa ^ 1],
                        _ => net.head[pa],
                    };
                    if up == p {
                        self.parent[q] = None;
                        self.orphans.push_back(q);
                    }
                }
            }
            self.tree[p] = Tree::Free;
        }
    }

    fn residual_reach(&self) -> Vec<bool> {
        let net = self.net;
        let mut seen = vec![false; net.n];
        let mut queue = VecDeque::from([net.source]);
        seen[net.source] = true;
        while let Some(u) = queue.pop_front() {
            for &a in &net.adj[u] {
                let v = net.head[a];
                if !seen[v] && self.res[a] > 0 {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}
