//! Layer-level DAG of an encoder network.
//!
//! Every vertex is one indivisible layer carrying measured compute times on
//! the edge device and on the cloud, plus the size of its output activation,
//! all keyed by input resolution. Two zero-cost virtual vertices mark the
//! start and the end of the network so that a split can be expressed as an
//! s-t cut.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type LayerId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("profile declares no resolutions")]
    EmptyResolutions,
    #[error("resolution `{0}` declared twice")]
    DuplicateResolution(String),
    #[error("resolution `{label}` is invalid: {reason}")]
    InvalidResolution { label: String, reason: String },
    #[error("profile contains no layers")]
    EmptyGraph,
    #[error("layer id {0} used more than once")]
    DuplicateId(LayerId),
    #[error("layer {node} has no `{field}` value for resolution `{label}`")]
    MissingResolution { node: LayerId, field: &'static str, label: String },
    #[error("layer {node} has `{field}` for undeclared resolution `{label}`")]
    UnknownResolution { node: LayerId, field: &'static str, label: String },
    #[error("input_bytes must cover every declared resolution (missing `{0}`)")]
    MissingInputBytes(String),
    #[error("layer {node} has a negative or non-finite `{field}` at `{label}`")]
    NegativeCost { node: LayerId, field: &'static str, label: String },
    #[error("edge {from} -> {to} references an unknown layer")]
    UnknownEndpoint { from: LayerId, to: LayerId },
    #[error("self-loop on layer {0}")]
    SelfLoop(LayerId),
    #[error("edge {0} -> {1} listed twice")]
    DuplicateEdge(LayerId, LayerId),
    #[error("cycle detected: back edge {from} -> {to}")]
    Cycle { from: LayerId, to: LayerId },
    #[error("virtual vertex {id} is invalid: {reason}")]
    InvalidVirtual { id: LayerId, reason: String },
    #[error("layer {0} is not on a path from entry to exit")]
    Unreachable(LayerId),
    #[error("resolution `{0}` is not declared by this graph")]
    UndeclaredResolution(String),
    #[error("synthetic profile needs at least one layer")]
    NoLayers,
    #[error("invalid synthesis option: {0}")]
    InvalidSynthOption(String),
    #[error("cannot read profile: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed profile document: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GraphError>;

/// One discrete input resolution shared by every layer of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub label: String,
    pub pixels: u64,
    /// Fraction of the native resolution, in (0, 1].
    pub scale: f64,
}

impl Resolution {
    pub fn new(label: impl Into<String>, width: u64, height: u64, native_height: u64) -> Self {
        Resolution { label: label.into(), pixels: width * height, scale: height as f64 / native_height as f64 }
    }
}

/// 1080p, 720p, 480p and 360p, highest first.
pub fn default_resolutions() -> Vec<Resolution> {
    vec![
        Resolution::new("1080p", 1920, 1080, 1080),
        Resolution::new("720p", 1280, 720, 1080),
        Resolution::new("480p", 854, 480, 1080),
        Resolution::new("360p", 640, 360, 1080),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerNode {
    pub id: LayerId,
    pub name: String,
    pub edge_ms: BTreeMap<String, f64>,
    pub cloud_ms: BTreeMap<String, f64>,
    pub output_bytes: BTreeMap<String, u64>,
}

impl LayerNode {
    fn virtual_node(id: LayerId, name: &str, labels: &[String]) -> Self {
        LayerNode {
            id,
            name: name.to_string(),
            edge_ms: labels.iter().map(|l| (l.clone(), 0.0)).collect(),
            cloud_ms: labels.iter().map(|l| (l.clone(), 0.0)).collect(),
            output_bytes: labels.iter().map(|l| (l.clone(), 0)).collect(),
        }
    }

    fn is_zero_weight(&self) -> bool {
        self.edge_ms.values().all(|v| *v == 0.0)
            && self.cloud_ms.values().all(|v| *v == 0.0)
            && self.output_bytes.values().all(|v| *v == 0)
    }
}

/// On-disk profile schema.
///
/// `input_bytes` is the size of the raw encoder input per resolution; it is
/// what crosses the network when the first layers run in the cloud. When
/// `entry_id`/`exit_id` are omitted the virtual vertices are synthesized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub resolutions: Vec<Resolution>,
    pub nodes: Vec<LayerNode>,
    pub edges: Vec<(LayerId, LayerId)>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub input_bytes: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_id: Option<LayerId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_id: Option<LayerId>,
}

/// A validated, immutable layer DAG with virtual entry and exit vertices.
///
/// Vertices are addressed internally by their position (`usize`), which is
/// also the index used by flow networks built from the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGraph {
    resolutions: Vec<Resolution>,
    nodes: Vec<LayerNode>,
    edges: Vec<(usize, usize)>,
    input_bytes: BTreeMap<String, u64>,
    entry: usize,
    exit: usize,
    index: HashMap<LayerId, usize>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

/// Parses and validates a profile document.
pub fn load_profile(json: &str) -> Result<LayerGraph> {
    let doc: ProfileDocument = serde_json::from_str(json)?;
    LayerGraph::from_document(doc)
}

pub fn load_profile_file(path: impl AsRef<Path>) -> Result<LayerGraph> {
    let text = std::fs::read_to_string(path)?;
    load_profile(&text)
}

impl LayerGraph {
    pub fn from_document(doc: ProfileDocument) -> Result<Self> {
        let labels = validate_resolutions(&doc.resolutions)?;
        if doc.nodes.is_empty() {
            return Err(GraphError::EmptyGraph);
        }

        let mut nodes = doc.nodes;
        let mut index = HashMap::with_capacity(nodes.len() + 2);
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(GraphError::DuplicateId(n.id));
            }
            check_node_maps(n, &labels)?;
        }

        let input_bytes = if doc.input_bytes.is_empty() {
            labels.iter().map(|l| (l.clone(), 0)).collect()
        } else {
            for l in &labels {
                if !doc.input_bytes.contains_key(l) {
                    return Err(GraphError::MissingInputBytes(l.clone()));
                }
            }
            if let Some(extra) = doc.input_bytes.keys().find(|k| !labels.contains(*k)) {
                return Err(GraphError::UndeclaredResolution(extra.clone()));
            }
            doc.input_bytes
        };

        let mut edges = Vec::with_capacity(doc.edges.len());
        let mut seen = HashSet::new();
        for &(u, v) in &doc.edges {
            let (Some(&ui), Some(&vi)) = (index.get(&u), index.get(&v)) else {
                return Err(GraphError::UnknownEndpoint { from: u, to: v });
            };
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !seen.insert((ui, vi)) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            edges.push((ui, vi));
        }

        // Cycles are reported on the user graph before virtual vertices exist.
        if let Some((a, b)) = find_back_edge(nodes.len(), &edges) {
            return Err(GraphError::Cycle { from: nodes[a].id, to: nodes[b].id });
        }

        let max_id = nodes.iter().map(|n| n.id).max().unwrap_or(0);
        let entry = match doc.entry_id {
            Some(id) => existing_virtual(&nodes, &index, id)?,
            None => {
                let id = fresh_id(&index, max_id, 1);
                let has_pred: HashSet<usize> = edges.iter().map(|e| e.1).collect();
                let n = nodes.len();
                let exit_hint = doc.exit_id.and_then(|x| index.get(&x).copied());
                nodes.push(LayerNode::virtual_node(id, "entry", &labels));
                index.insert(id, n);
                for v in 0..n {
                    if !has_pred.contains(&v) && Some(v) != exit_hint {
                        edges.push((n, v));
                    }
                }
                n
            }
        };
        let exit = match doc.exit_id {
            Some(id) => existing_virtual(&nodes, &index, id)?,
            None => {
                let id = fresh_id(&index, max_id, 2);
                let has_succ: HashSet<usize> = edges.iter().map(|e| e.0).collect();
                let n = nodes.len();
                nodes.push(LayerNode::virtual_node(id, "exit", &labels));
                index.insert(id, n);
                for v in 0..n {
                    if !has_succ.contains(&v) && v != entry {
                        edges.push((v, n));
                    }
                }
                n
            }
        };
        if entry == exit {
            return Err(GraphError::InvalidVirtual {
                id: nodes[entry].id,
                reason: "entry and exit must differ".into(),
            });
        }

        let mut preds = vec![Vec::new(); nodes.len()];
        let mut succs = vec![Vec::new(); nodes.len()];
        for &(u, v) in &edges {
            succs[u].push(v);
            preds[v].push(u);
        }
        if !preds[entry].is_empty() {
            return Err(GraphError::InvalidVirtual { id: nodes[entry].id, reason: "entry has predecessors".into() });
        }
        if !succs[exit].is_empty() {
            return Err(GraphError::InvalidVirtual { id: nodes[exit].id, reason: "exit has successors".into() });
        }
        if let Some((a, b)) = find_back_edge(nodes.len(), &edges) {
            return Err(GraphError::Cycle { from: nodes[a].id, to: nodes[b].id });
        }

        let from_entry = reach(entry, &succs);
        let to_exit = reach(exit, &preds);
        for (i, n) in nodes.iter().enumerate() {
            if !from_entry[i] || !to_exit[i] {
                return Err(GraphError::Unreachable(n.id));
            }
        }

        let topo = kahn_order(&preds, &succs);
        Ok(LayerGraph {
            resolutions: doc.resolutions,
            nodes,
            edges,
            input_bytes,
            entry,
            exit,
            index,
            preds,
            succs,
            topo,
        })
    }

    /// Serializes back into the profile schema, virtual vertices included.
    pub fn to_document(&self) -> ProfileDocument {
        ProfileDocument {
            resolutions: self.resolutions.clone(),
            nodes: self.nodes.clone(),
            edges: self.edges.iter().map(|&(u, v)| (self.nodes[u].id, self.nodes[v].id)).collect(),
            input_bytes: self.input_bytes.clone(),
            entry_id: Some(self.nodes[self.entry].id),
            exit_id: Some(self.nodes[self.exit].id),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of non-virtual layers.
    pub fn layer_count(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn nodes(&self) -> &[LayerNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &LayerNode {
        &self.nodes[idx]
    }

    pub fn index_of(&self, id: LayerId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn entry(&self) -> usize {
        self.entry
    }

    pub fn exit(&self) -> usize {
        self.exit
    }

    pub fn entry_id(&self) -> LayerId {
        self.nodes[self.entry].id
    }

    pub fn exit_id(&self) -> LayerId {
        self.nodes[self.exit].id
    }

    pub fn is_virtual(&self, idx: usize) -> bool {
        idx == self.entry || idx == self.exit
    }

    /// Positions of the non-virtual layers in document order.
    pub fn layers(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&i| !self.is_virtual(i))
    }

    /// Dependency edges as position pairs, virtual edges included.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn preds(&self, idx: usize) -> &[usize] {
        &self.preds[idx]
    }

    pub fn succs(&self, idx: usize) -> &[usize] {
        &self.succs[idx]
    }

    pub fn resolutions(&self) -> &[Resolution] {
        &self.resolutions
    }

    pub fn resolution(&self, label: &str) -> Result<&Resolution> {
        self.resolutions
            .iter()
            .find(|r| r.label == label)
            .ok_or_else(|| GraphError::UndeclaredResolution(label.to_string()))
    }

    pub fn has_resolution(&self, label: &str) -> bool {
        self.resolutions.iter().any(|r| r.label == label)
    }

    pub fn edge_ms(&self, idx: usize, res: &str) -> f64 {
        self.nodes[idx].edge_ms[res]
    }

    pub fn cloud_ms(&self, idx: usize, res: &str) -> f64 {
        self.nodes[idx].cloud_ms[res]
    }

    pub fn output_bytes(&self, idx: usize, res: &str) -> u64 {
        self.nodes[idx].output_bytes[res]
    }

    pub fn input_bytes(&self, res: &str) -> u64 {
        self.input_bytes.get(res).copied().unwrap_or(0)
    }

    /// Bytes that cross the network when `producer` runs on the edge and one
    /// of its consumers runs in the cloud. The entry vertex ships the raw
    /// input; edges into the exit vertex never carry data.
    pub fn transfer_bytes(&self, producer: usize, consumer: usize, res: &str) -> u64 {
        if consumer == self.exit {
            0
        } else if producer == self.entry {
            self.input_bytes(res)
        } else {
            self.output_bytes(producer, res)
        }
    }

    pub fn total_edge_ms(&self, res: &str) -> f64 {
        self.layers().map(|i| self.edge_ms(i, res)).sum()
    }

    pub fn total_cloud_ms(&self, res: &str) -> f64 {
        self.layers().map(|i| self.cloud_ms(i, res)).sum()
    }

    /// Topological order of layer ids: entry first, exit last.
    pub fn topological_order(&self) -> Vec<LayerId> {
        self.topo.iter().map(|&i| self.nodes[i].id).collect()
    }

    pub fn topological_positions(&self) -> &[usize] {
        &self.topo
    }
}

fn validate_resolutions(res: &[Resolution]) -> Result<Vec<String>> {
    if res.is_empty() {
        return Err(GraphError::EmptyResolutions);
    }
    let mut labels = BTreeSet::new();
    for r in res {
        if !labels.insert(r.label.clone()) {
            return Err(GraphError::DuplicateResolution(r.label.clone()));
        }
        if r.pixels == 0 {
            return Err(GraphError::InvalidResolution {
                label: r.label.clone(),
                reason: "pixel count must be positive".into(),
            });
        }
        if !(r.scale > 0.0 && r.scale <= 1.0) {
            return Err(GraphError::InvalidResolution {
                label: r.label.clone(),
                reason: format!("scale {} outside (0, 1]", r.scale),
            });
        }
    }
    let mut sorted: Vec<&Resolution> = res.iter().collect();
    sorted.sort_by_key(|r| r.pixels);
    for w in sorted.windows(2) {
        if w[1].scale < w[0].scale {
            return Err(GraphError::InvalidResolution {
                label: w[1].label.clone(),
                reason: "scale must grow with pixel count".into(),
            });
        }
    }
    Ok(res.iter().map(|r| r.label.clone()).collect())
}

fn check_node_maps(n: &LayerNode, labels: &[String]) -> Result<()> {
    fn keys<V>(node: LayerId, field: &'static str, map: &BTreeMap<String, V>, labels: &[String]) -> Result<()> {
        for l in labels {
            if !map.contains_key(l) {
                return Err(GraphError::MissingResolution { node, field, label: l.clone() });
            }
        }
        if let Some(extra) = map.keys().find(|k| !labels.contains(*k)) {
            return Err(GraphError::UnknownResolution { node, field, label: extra.clone() });
        }
        Ok(())
    }
    keys(n.id, "edge_ms", &n.edge_ms, labels)?;
    keys(n.id, "cloud_ms", &n.cloud_ms, labels)?;
    keys(n.id, "output_bytes", &n.output_bytes, labels)?;
    for (field, map) in [("edge_ms", &n.edge_ms), ("cloud_ms", &n.cloud_ms)] {
        if let Some((label, _)) = map.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(GraphError::NegativeCost { node: n.id, field, label: label.clone() });
        }
    }
    Ok(())
}

fn existing_virtual(nodes: &[LayerNode], index: &HashMap<LayerId, usize>, id: LayerId) -> Result<usize> {
    let &i = index.get(&id).ok_or_else(|| GraphError::InvalidVirtual { id, reason: "no layer with this id".into() })?;
    if !nodes[i].is_zero_weight() {
        return Err(GraphError::InvalidVirtual { id, reason: "virtual vertices must carry zero cost".into() });
    }
    Ok(i)
}

fn fresh_id(index: &HashMap<LayerId, usize>, max_id: LayerId, offset: LayerId) -> LayerId {
    let mut id = max_id.saturating_add(offset);
    while index.contains_key(&id) {
        id = id.wrapping_add(1);
    }
    id
}

/// Iterative three-colour DFS; returns the first back edge found.
fn find_back_edge(n: usize, edges: &[(usize, usize)]) -> Option<(usize, usize)> {
    let mut succs = vec![Vec::new(); n];
    for &(u, v) in edges {
        succs[u].push(v);
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut mark = vec![Mark::White; n];
    for root in 0..n {
        if mark[root] != Mark::White {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Grey;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if let Some(&v) = succs[u].get(*next) {
                *next += 1;
                match mark[v] {
                    Mark::Grey => return Some((u, v)),
                    Mark::White => {
                        mark[v] = Mark::Grey;
                        stack.push((v, 0));
                    }
                    Mark::Black => {}
                }
            } else {
                mark[u] = Mark::Black;
                stack.pop();
            }
        }
    }
    None
}

fn reach(start: usize, adj: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Kahn's algorithm, always releasing the lowest ready position first.
fn kahn_order(preds: &[Vec<usize>], succs: &[Vec<usize>]) -> Vec<usize> {
    let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..indeg.len()).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(indeg.len());
    while let Some(Reverse(u)) = ready.pop() {
        order.push(u);
        for &v in &succs[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(Reverse(v));
            }
        }
    }
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthShape {
    Chain,
    Diamond,
    VitLike,
}

impl FromStr for SynthShape {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(SynthShape::Chain),
            "diamond" => Ok(SynthShape::Diamond),
            "vit-like" | "vit" => Ok(SynthShape::VitLike),
            other => Err(GraphError::InvalidSynthOption(format!("unknown shape `{other}`"))),
        }
    }
}

impl fmt::Display for SynthShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthShape::Chain => "chain",
            SynthShape::Diamond => "diamond",
            SynthShape::VitLike => "vit-like",
        })
    }
}

/// Knobs for the synthetic profile generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    /// Edge-to-cloud compute ratio; cloud time is `edge_ms / speedup`.
    pub speedup: f64,
    pub resolutions: Vec<Resolution>,
    /// Per-layer edge time at the highest resolution is drawn from this range.
    pub edge_ms_range: (f64, f64),
    pub output_bytes_range: (u64, u64),
    pub input_bytes_per_pixel: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            speedup: 10.0,
            resolutions: default_resolutions(),
            edge_ms_range: (5.0, 50.0),
            output_bytes_range: (50_000, 2_000_000),
            input_bytes_per_pixel: 3,
        }
    }
}

/// Generates a deterministic profile document. Costs and payloads scale
/// linearly with the pixel count of each resolution.
pub fn synth_document(layers: usize, seed: u64, shape: SynthShape, opts: &SynthOptions) -> Result<ProfileDocument> {
    if layers == 0 {
        return Err(GraphError::NoLayers);
    }
    if !(opts.speedup > 0.0 && opts.speedup.is_finite()) {
        return Err(GraphError::InvalidSynthOption("speedup must be positive".into()));
    }
    let (lo, hi) = opts.edge_ms_range;
    if !(lo >= 0.0 && hi >= lo) {
        return Err(GraphError::InvalidSynthOption("edge_ms_range must satisfy 0 <= lo <= hi".into()));
    }
    let (blo, bhi) = opts.output_bytes_range;
    if bhi < blo {
        return Err(GraphError::InvalidSynthOption("output_bytes_range must satisfy lo <= hi".into()));
    }
    validate_resolutions(&opts.resolutions)?;
    let max_pixels = opts.resolutions.iter().map(|r| r.pixels).max().unwrap_or(1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(layers);
    for i in 0..layers {
        let full_ms = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        let full_bytes = if bhi > blo { rng.random_range(blo..=bhi) } else { blo };
        let mut edge_ms = BTreeMap::new();
        let mut cloud_ms = BTreeMap::new();
        let mut output_bytes = BTreeMap::new();
        for r in &opts.resolutions {
            let ratio = r.pixels as f64 / max_pixels as f64;
            let e = full_ms * ratio;
            edge_ms.insert(r.label.clone(), e);
            cloud_ms.insert(r.label.clone(), e / opts.speedup);
            output_bytes.insert(r.label.clone(), ((full_bytes as u128 * r.pixels as u128) / max_pixels as u128) as u64);
        }
        nodes.push(LayerNode { id: i as LayerId, name: synth_name(shape, i, layers), edge_ms, cloud_ms, output_bytes });
    }

    let mut edges = Vec::new();
    match shape {
        SynthShape::Chain => {
            for i in 1..layers {
                edges.push(((i - 1) as LayerId, i as LayerId));
            }
        }
        SynthShape::Diamond => {
            // root, then repeated (left, right, join) groups
            let mut join = 0usize;
            for i in 1..layers {
                match (i - 1) % 3 {
                    0 | 1 => edges.push((join as LayerId, i as LayerId)),
                    _ => {
                        edges.push(((i - 2) as LayerId, i as LayerId));
                        edges.push(((i - 1) as LayerId, i as LayerId));
                        join = i;
                    }
                }
            }
        }
        SynthShape::VitLike => {
            for i in 1..layers {
                edges.push(((i - 1) as LayerId, i as LayerId));
                // residual connection around each attn+mlp pair
                if i >= 2 && i % 2 == 0 && !(i == layers - 1 && layers > 2) {
                    edges.push(((i - 2) as LayerId, i as LayerId));
                }
            }
        }
    }

    let input_bytes =
        opts.resolutions.iter().map(|r| (r.label.clone(), r.pixels * opts.input_bytes_per_pixel)).collect();

    Ok(ProfileDocument {
        resolutions: opts.resolutions.clone(),
        nodes,
        edges,
        input_bytes,
        entry_id: None,
        exit_id: None,
    })
}

pub fn synth_profile(layers: usize, seed: u64, shape: SynthShape, opts: &SynthOptions) -> Result<LayerGraph> {
    LayerGraph::from_document(synth_document(layers, seed, shape, opts)?)
}

fn synth_name(shape: SynthShape, i: usize, n: usize) -> String {
    match shape {
        SynthShape::Chain => format!("layer{i}"),
        SynthShape::Diamond => format!("op{i}"),
        SynthShape::VitLike => {
            if i == 0 {
                "patch_embed".into()
            } else if i == n - 1 && n > 2 {
                "neck".into()
            } else {
                let block = (i - 1) / 2;
                if i % 2 == 1 {
                    format!("block{block}.attn")
                } else {
                    format!("block{block}.mlp")
                }
            }
        }
    }
}
