//! Split-point selection as a minimum s-t cut.
//!
//! The entry vertex is the source and the exit vertex the sink. The source
//! side of a cut is the set of layers that run on the edge device:
//!
//! * `entry -> v` carries the cloud compute time of `v` (paid when `v` is
//!   cloud-side),
//! * `v -> exit` carries the edge compute time of `v` (paid when `v` is
//!   edge-side),
//! * every dependency `u -> v` carries the time to ship `u`'s output at the
//!   given bandwidth, with an infinite reverse arc so that no edge-side layer
//!   can depend on a cloud-side one.
//!
//! Capacities are integer microseconds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, LayerGraph, LayerId};
use crate::maxflow::{self, ArcId, Capacity, FlowError, FlowNetwork, INFINITE};
use crate::netsim::{self, NetError};

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("edge-side set is not ancestor-closed: layer {layer} depends on cloud-side layer {missing}")]
    NotAncestorClosed { layer: LayerId, missing: LayerId },
    #[error("exhaustive search limited to {limit} layers, graph has {layers}")]
    TooLarge { layers: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, PartitionError>;

/// Largest graph the exhaustive cross-check accepts.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Rounds milliseconds to integer microseconds, saturating at [`INFINITE`].
pub fn ms_to_us(ms: f64) -> Capacity {
    let us = (ms * 1000.0).round();
    if !us.is_finite() || us >= INFINITE as f64 {
        INFINITE
    } else {
        us as Capacity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKind {
    EdgeCompute,
    CloudCompute,
    Transfer,
}

/// A flow network together with the meaning of each forward arc.
#[derive(Debug, Clone)]
pub struct PartitionNetwork {
    pub network: FlowNetwork,
    pub resolution: String,
    pub bandwidth_mbps: f64,
    kinds: Vec<(ArcId, ArcKind)>,
}

impl PartitionNetwork {
    pub fn kind(&self, arc: ArcId) -> Option<ArcKind> {
        self.kinds.iter().find(|(a, _)| *a == arc).map(|(_, k)| *k)
    }

    pub fn forward_arcs(&self) -> &[(ArcId, ArcKind)] {
        &self.kinds
    }
}

/// Builds the cut network of `g` at resolution `res` and bandwidth `mbps`.
pub fn build_flow_network(g: &LayerGraph, res: &str, mbps: f64) -> Result<PartitionNetwork> {
    g.resolution(res)?;
    netsim::transmission_time(0, mbps)?;
    let (entry, exit) = (g.entry(), g.exit());
    let mut net = FlowNetwork::new(g.len(), entry, exit)?;
    let mut kinds = Vec::with_capacity(2 * g.len() + g.edges().len());
    for v in g.layers() {
        let a = net.add_arc(entry, v, ms_to_us(g.cloud_ms(v, res)))?;
        kinds.push((a, ArcKind::CloudCompute));
        let a = net.add_arc(v, exit, ms_to_us(g.edge_ms(v, res)))?;
        kinds.push((a, ArcKind::EdgeCompute));
    }
    for &(u, v) in g.edges() {
        let cap = ms_to_us(netsim::transmission_time(g.transfer_bytes(u, v, res), mbps)?);
        let a = net.add_arc_pair(u, v, cap, INFINITE)?;
        kinds.push((a, ArcKind::Transfer));
    }
    Ok(PartitionNetwork { network: net, resolution: res.to_string(), bandwidth_mbps: mbps, kinds })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutArc {
    pub from: LayerId,
    pub to: LayerId,
    pub kind: ArcKind,
    pub capacity_us: Capacity,
}

/// Assignment of every vertex to the edge or the cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub resolution: String,
    pub bandwidth_mbps: f64,
    /// Ascending ids; always contains the entry vertex.
    pub edge_side: Vec<LayerId>,
    /// Ascending ids; always contains the exit vertex.
    pub cloud_side: Vec<LayerId>,
    pub cut_arcs: Vec<CutArc>,
    pub objective_us: Capacity,
    pub objective_ms: f64,
}

impl Partition {
    /// Evaluates an explicit assignment (`on_edge` indexed by graph
    /// position). Virtual vertices are forced to their sides.
    pub fn from_assignment(g: &LayerGraph, res: &str, mbps: f64, on_edge: &[bool]) -> Result<Self> {
        let pn = build_flow_network(g, res, mbps)?;
        let mut side = on_edge.to_vec();
        side.resize(g.len(), false);
        side[g.entry()] = true;
        side[g.exit()] = false;
        for &(u, v) in g.edges() {
            if side[v] && !side[u] {
                return Err(PartitionError::NotAncestorClosed { layer: g.node(v).id, missing: g.node(u).id });
            }
        }
        Ok(Self::from_sides(g, &pn, &side))
    }

    pub fn all_edge(g: &LayerGraph, res: &str, mbps: f64) -> Result<Self> {
        Self::from_assignment(g, res, mbps, &vec![true; g.len()])
    }

    pub fn all_cloud(g: &LayerGraph, res: &str, mbps: f64) -> Result<Self> {
        Self::from_assignment(g, res, mbps, &[])
    }

    fn from_sides(g: &LayerGraph, pn: &PartitionNetwork, side: &[bool]) -> Self {
        let net = &pn.network;
        let mut cut_arcs = Vec::new();
        for &(a, kind) in pn.forward_arcs() {
            let (u, v) = (net.arc_from(a), net.arc_to(a));
            if side[u] && !side[v] {
                cut_arcs.push(CutArc { from: g.node(u).id, to: g.node(v).id, kind, capacity_us: net.capacity(a) });
            }
        }
        let objective_us = cut_arcs.iter().fold(0 as Capacity, |acc, c| acc.saturating_add(c.capacity_us));
        let mut edge_side: Vec<LayerId> = (0..g.len()).filter(|&i| side[i]).map(|i| g.node(i).id).collect();
        let mut cloud_side: Vec<LayerId> = (0..g.len()).filter(|&i| !side[i]).map(|i| g.node(i).id).collect();
        edge_side.sort_unstable();
        cloud_side.sort_unstable();
        Partition {
            resolution: pn.resolution.clone(),
            bandwidth_mbps: pn.bandwidth_mbps,
            edge_side,
            cloud_side,
            cut_arcs,
            objective_us,
            objective_ms: objective_us as f64 / 1000.0,
        }
    }

    pub fn is_edge(&self, id: LayerId) -> bool {
        self.edge_side.binary_search(&id).is_ok()
    }

    /// Number of real layers running on the edge.
    pub fn edge_layer_count(&self, g: &LayerGraph) -> usize {
        g.layers().filter(|&i| self.is_edge(g.node(i).id)).count()
    }

    /// True when some real layer runs in the cloud.
    pub fn uses_cloud(&self, g: &LayerGraph) -> bool {
        self.edge_layer_count(g) < g.layer_count()
    }

    /// Edge-side flags indexed by graph position.
    pub fn edge_flags(&self, g: &LayerGraph) -> Vec<bool> {
        (0..g.len()).map(|i| self.is_edge(g.node(i).id)).collect()
    }

    /// Bytes uploaded across the cut: the sum over cut dependency arcs.
    pub fn uplink_bytes(&self, g: &LayerGraph) -> u64 {
        let flags = self.edge_flags(g);
        g.edges()
            .iter()
            .filter(|&&(u, v)| flags[u] && !flags[v])
            .map(|&(u, v)| g.transfer_bytes(u, v, &self.resolution))
            .sum()
    }
}

/// Minimum-cost split of `g` at `res` and `mbps`.
///
/// Among several optimal cuts the one with the smallest edge side is
/// returned (vertices reachable from the source in the final residual).
pub fn min_cut_partition(g: &LayerGraph, res: &str, mbps: f64) -> Result<Partition> {
    let pn = build_flow_network(g, res, mbps)?;
    let flow = maxflow::max_flow(&pn.network)?;
    let p = Partition::from_sides(g, &pn, &flow.source_side);
    debug_assert_eq!(p.objective_us, flow.value);
    Ok(p)
}

/// Exhaustive minimum over every ancestor-closed edge-side set, evaluated
/// directly from the graph costs. Returns the objective in microseconds.
pub fn exhaustive_min_cut(g: &LayerGraph, res: &str, mbps: f64) -> Result<Capacity> {
    g.resolution(res)?;
    netsim::transmission_time(0, mbps)?;
    let layers: Vec<usize> = g.layers().collect();
    if layers.len() > EXHAUSTIVE_LIMIT {
        return Err(PartitionError::TooLarge { layers: layers.len(), limit: EXHAUSTIVE_LIMIT });
    }
    let mut best = INFINITE;
    let mut on_edge = vec![false; g.len()];
    on_edge[g.entry()] = true;
    'subsets: for mask in 0u32..(1 << layers.len()) {
        for (bit, &v) in layers.iter().enumerate() {
            on_edge[v] = mask >> bit & 1 == 1;
        }
        for &(u, v) in g.edges() {
            if on_edge[v] && !on_edge[u] && v != g.exit() {
                continue 'subsets;
            }
        }
        let mut cost: Capacity = 0;
        for &v in &layers {
            let c = if on_edge[v] { g.edge_ms(v, res) } else { g.cloud_ms(v, res) };
            cost = cost.saturating_add(ms_to_us(c));
        }
        for &(u, v) in g.edges() {
            if on_edge[u] && !on_edge[v] && v != g.exit() {
                let t = netsim::transmission_time(g.transfer_bytes(u, v, res), mbps)?;
                cost = cost.saturating_add(ms_to_us(t));
            }
        }
        best = best.min(cost);
    }
    Ok(best)
}
