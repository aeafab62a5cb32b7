//! Joint choice of input resolutions and split points for the image encoder
//! and the prompt encoder under one end-to-end latency budget.
//!
//! Both encoders run concurrently and the decoder waits for both
//! embeddings, so a configuration costs the slower branch plus the decoder
//! passes. Each branch is split by exact min-cut; resolution pairs are
//! enumerated.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{load_profile_file, GraphError, LayerGraph};
use crate::netsim::{self, transfer_over_trace, BandwidthTrace, NetError};
use crate::partition::{min_cut_partition, Partition, PartitionError};

#[derive(Debug, Error)]
pub enum SeroError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("no configuration meets the {budget_ms} ms budget (fastest is {min_latency_ms:.3} ms)")]
    Infeasible { budget_ms: f64, min_latency_ms: f64 },
    #[error("cannot read instance: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed instance document: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SeroError>;

/// Fixed-point rounds before falling back to the window's minimum rate.
pub const MAX_TRACE_ROUNDS: usize = 5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BranchLatency {
    pub edge_ms: f64,
    pub uplink_ms: f64,
    pub cloud_ms: f64,
    pub downlink_ms: f64,
    pub total_ms: f64,
}

impl BranchLatency {
    fn new(edge_ms: f64, uplink_ms: f64, cloud_ms: f64, downlink_ms: f64) -> Self {
        BranchLatency {
            edge_ms,
            uplink_ms,
            cloud_ms,
            downlink_ms,
            total_ms: edge_ms + uplink_ms + cloud_ms + downlink_ms,
        }
    }
}

fn compute_split(g: &LayerGraph, p: &Partition) -> (f64, f64) {
    g.layers().fold((0.0, 0.0), |(e, c), i| {
        if p.is_edge(g.node(i).id) {
            (e + g.edge_ms(i, &p.resolution), c)
        } else {
            (e, c + g.cloud_ms(i, &p.resolution))
        }
    })
}

/// Latency of one encoder branch at a fixed bandwidth: edge compute, upload
/// of the cut payload, cloud compute, and download of the embedding. A
/// branch that stays on the edge pays no network or cloud cost.
pub fn branch_latency(g: &LayerGraph, p: &Partition, mbps: f64, return_bytes: u64) -> Result<BranchLatency> {
    netsim::transmission_time(0, mbps)?;
    let (edge, cloud) = compute_split(g, p);
    if !p.uses_cloud(g) {
        return Ok(BranchLatency::new(edge, 0.0, 0.0, 0.0));
    }
    let up = netsim::transmission_time(p.uplink_bytes(g), mbps)?;
    let down = netsim::transmission_time(return_bytes, mbps)?;
    Ok(BranchLatency::new(edge, up, cloud, down))
}

/// Same stages as [`branch_latency`], with transfers replayed over `trace`
/// starting when the preceding stage ends.
pub fn branch_latency_on_trace(
    g: &LayerGraph,
    p: &Partition,
    return_bytes: u64,
    trace: &BandwidthTrace,
    t0: f64,
) -> Result<BranchLatency> {
    let (edge, cloud) = compute_split(g, p);
    if !p.uses_cloud(g) {
        return Ok(BranchLatency::new(edge, 0.0, 0.0, 0.0));
    }
    let up = transfer_over_trace(p.uplink_bytes(g), trace, t0 + edge)?;
    let down = transfer_over_trace(return_bytes, trace, up.finish_ms + cloud)?;
    Ok(BranchLatency::new(edge, up.duration_ms, cloud, down.duration_ms))
}

/// The chosen split of one encoder and its latency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPlan {
    pub resolution: String,
    pub partition: Partition,
    pub latency: BranchLatency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeroPlan {
    pub video_res: String,
    pub prompt_res: String,
    pub video: BranchPlan,
    pub prompt: BranchPlan,
    pub decoder_ms: f64,
    pub predicted_latency_ms: f64,
    pub predicted_accuracy: f64,
    pub budget_ms: f64,
}

/// Accuracy by video resolution, then prompt resolution.
pub type AccuracyTable = BTreeMap<String, BTreeMap<String, f64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct SeroInstance {
    pub video: LayerGraph,
    pub prompt: LayerGraph,
    pub accuracy: AccuracyTable,
    pub bandwidth_mbps: f64,
    pub latency_budget_ms: f64,
    pub decoder_ms_per_prompt: f64,
    pub prompt_count: usize,
    pub video_return_bytes: BTreeMap<String, u64>,
    pub prompt_return_bytes: BTreeMap<String, u64>,
}

impl SeroInstance {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SeroError::Invalid(m));
        if !(self.latency_budget_ms > 0.0) {
            return bad(format!("latency budget must be > 0, got {}", self.latency_budget_ms));
        }
        if !(self.bandwidth_mbps > 0.0) {
            return bad(format!("bandwidth must be > 0, got {}", self.bandwidth_mbps));
        }
        if !(self.decoder_ms_per_prompt >= 0.0 && self.decoder_ms_per_prompt.is_finite()) {
            return bad("decoder cost must be finite and >= 0".into());
        }
        for (name, g, ret) in
            [("video", &self.video, &self.video_return_bytes), ("prompt", &self.prompt, &self.prompt_return_bytes)]
        {
            for r in g.resolutions() {
                if !ret.contains_key(&r.label) {
                    return bad(format!("{name} return bytes missing for {}", r.label));
                }
            }
        }
        for v in self.video.resolutions() {
            let Some(row) = self.accuracy.get(&v.label) else {
                return bad(format!("accuracy table has no row for video resolution {}", v.label));
            };
            for p in self.prompt.resolutions() {
                match row.get(&p.label) {
                    Some(a) if (0.0..=1.0).contains(a) => {}
                    Some(a) => return bad(format!("accuracy {a} at ({}, {}) outside [0, 1]", v.label, p.label)),
                    None => return bad(format!("accuracy missing at ({}, {})", v.label, p.label)),
                }
            }
        }
        let acc = |v: &str, p: &str| self.accuracy[v][p];
        for a in self.video.resolutions() {
            for b in self.video.resolutions() {
                if a.pixels < b.pixels {
                    for p in self.prompt.resolutions() {
                        if acc(&a.label, &p.label) > acc(&b.label, &p.label) {
                            return bad(format!(
                                "accuracy drops from {} to {} at prompt {}",
                                a.label, b.label, p.label
                            ));
                        }
                    }
                }
            }
        }
        for a in self.prompt.resolutions() {
            for b in self.prompt.resolutions() {
                if a.pixels < b.pixels {
                    for v in self.video.resolutions() {
                        if acc(&v.label, &a.label) > acc(&v.label, &b.label) {
                            return bad(format!("accuracy drops from {} to {} at video {}", a.label, b.label, v.label));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn decoder_ms(&self) -> f64 {
        self.decoder_ms_per_prompt * self.prompt_count as f64
    }

    pub fn with_bandwidth(&self, mbps: f64) -> Self {
        SeroInstance { bandwidth_mbps: mbps, ..self.clone() }
    }

    pub fn with_budget(&self, budget_ms: f64) -> Self {
        SeroInstance { latency_budget_ms: budget_ms, ..self.clone() }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let doc: InstanceDocument = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        doc.resolve(path.parent().unwrap_or(Path::new(".")))
    }
}

/// On-disk instance: profile paths are relative to the document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub video_profile: PathBuf,
    pub prompt_profile: PathBuf,
    pub accuracy: AccuracyTable,
    pub bandwidth_mbps: f64,
    pub latency_budget_ms: f64,
    pub decoder_ms_per_prompt: f64,
    pub prompt_count: usize,
    pub video_return_bytes: BTreeMap<String, u64>,
    pub prompt_return_bytes: BTreeMap<String, u64>,
}

impl InstanceDocument {
    pub fn resolve(self, base: &Path) -> Result<SeroInstance> {
        let inst = SeroInstance {
            video: load_profile_file(base.join(&self.video_profile))?,
            prompt: load_profile_file(base.join(&self.prompt_profile))?,
            accuracy: self.accuracy,
            bandwidth_mbps: self.bandwidth_mbps,
            latency_budget_ms: self.latency_budget_ms,
            decoder_ms_per_prompt: self.decoder_ms_per_prompt,
            prompt_count: self.prompt_count,
            video_return_bytes: self.video_return_bytes,
            prompt_return_bytes: self.prompt_return_bytes,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_instance(inst: &SeroInstance, video_profile: PathBuf, prompt_profile: PathBuf) -> Self {
        InstanceDocument {
            video_profile,
            prompt_profile,
            accuracy: inst.accuracy.clone(),
            bandwidth_mbps: inst.bandwidth_mbps,
            latency_budget_ms: inst.latency_budget_ms,
            decoder_ms_per_prompt: inst.decoder_ms_per_prompt,
            prompt_count: inst.prompt_count,
            video_return_bytes: inst.video_return_bytes.clone(),
            prompt_return_bytes: inst.prompt_return_bytes.clone(),
        }
    }
}

fn push_unique(cands: &mut Vec<Partition>, p: Partition) {
    if !cands.iter().any(|c| c.edge_side == p.edge_side) {
        cands.push(p);
    }
}

/// Picks the fastest candidate; the first one wins exact ties.
fn fastest(
    g: &LayerGraph,
    res: &str,
    cands: Vec<Partition>,
    mut eval: impl FnMut(&Partition) -> Result<BranchLatency>,
) -> Result<Option<BranchPlan>> {
    let mut best: Option<BranchPlan> = None;
    for p in cands {
        let latency = match eval(&p) {
            Ok(l) => l,
            Err(SeroError::Net(NetError::TraceExhausted { .. } | NetError::TraceGap { .. })) => continue,
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|b| latency.total_ms < b.latency.total_ms) {
            best = Some(BranchPlan { resolution: res.to_string(), partition: p, latency });
        }
    }
    debug_assert!(g.has_resolution(res));
    Ok(best)
}

fn best_branch(g: &LayerGraph, res: &str, mbps: f64, ret: u64) -> Result<Option<BranchPlan>> {
    let mut cands = vec![min_cut_partition(g, res, mbps)?];
    push_unique(&mut cands, Partition::all_edge(g, res, mbps)?);
    push_unique(&mut cands, Partition::all_cloud(g, res, mbps)?);
    fastest(g, res, cands, |p| branch_latency(g, p, mbps, ret))
}

fn best_branch_on_trace(
    g: &LayerGraph,
    res: &str,
    ret: u64,
    trace: &BandwidthTrace,
    t0: f64,
    budget_ms: f64,
) -> Result<Option<BranchPlan>> {
    let mut cands: Vec<Partition> = Vec::new();
    let mut mbps = trace.rate_at(t0)?;
    let mut converged = false;
    for _ in 0..MAX_TRACE_ROUNDS {
        let p = min_cut_partition(g, res, mbps)?;
        if cands.last().is_some_and(|c| c.edge_side == p.edge_side) {
            converged = true;
            break;
        }
        if cands.iter().any(|c| c.edge_side == p.edge_side) {
            break;
        }
        let replay = branch_latency_on_trace(g, &p, ret, trace, t0);
        cands.push(p);
        let l = match replay {
            Ok(l) => l,
            Err(_) => break,
        };
        let net_ms = l.uplink_ms + l.downlink_ms;
        if net_ms <= 0.0 {
            converged = true;
            break;
        }
        let bytes = cands.last().expect("just pushed").uplink_bytes(g) + ret;
        mbps = bytes as f64 * 8.0 / (net_ms * 1e3);
    }
    if !converged {
        let floor = trace.min_rate(t0, t0 + budget_ms)?;
        push_unique(&mut cands, min_cut_partition(g, res, floor)?);
    }
    let nominal = trace.rate_at(t0)?;
    push_unique(&mut cands, Partition::all_edge(g, res, nominal)?);
    push_unique(&mut cands, Partition::all_cloud(g, res, nominal)?);
    fastest(g, res, cands, |p| branch_latency_on_trace(g, p, ret, trace, t0))
}

/// Shared selection over the resolution product given per-branch plans.
fn select(inst: &SeroInstance, videos: Vec<Option<BranchPlan>>, prompts: Vec<Option<BranchPlan>>) -> Result<SeroPlan> {
    let decoder_ms = inst.decoder_ms();
    let mut best: Option<SeroPlan> = None;
    let mut min_latency = f64::INFINITY;
    for v in videos.iter().flatten() {
        for p in prompts.iter().flatten() {
            let total = v.latency.total_ms.max(p.latency.total_ms) + decoder_ms;
            min_latency = min_latency.min(total);
            if total > inst.latency_budget_ms {
                continue;
            }
            let acc = inst.accuracy[&v.resolution][&p.resolution];
            let better = best.as_ref().is_none_or(|b| {
                acc > b.predicted_accuracy || (acc == b.predicted_accuracy && total < b.predicted_latency_ms)
            });
            if better {
                best = Some(SeroPlan {
                    video_res: v.resolution.clone(),
                    prompt_res: p.resolution.clone(),
                    video: v.clone(),
                    prompt: p.clone(),
                    decoder_ms,
                    predicted_latency_ms: total,
                    predicted_accuracy: acc,
                    budget_ms: inst.latency_budget_ms,
                });
            }
        }
    }
    best.ok_or(SeroError::Infeasible { budget_ms: inst.latency_budget_ms, min_latency_ms: min_latency })
}

fn ret(map: &BTreeMap<String, u64>, res: &str) -> u64 {
    map.get(res).copied().unwrap_or(0)
}

/// Most accurate resolution pair whose best splits meet the budget at the
/// instance's scalar bandwidth. Ties prefer lower latency, then earlier
/// declared video resolution, then earlier prompt resolution.
pub fn plan(inst: &SeroInstance) -> Result<SeroPlan> {
    inst.validate()?;
    let mbps = inst.bandwidth_mbps;
    let videos = inst
        .video
        .resolutions()
        .iter()
        .map(|r| best_branch(&inst.video, &r.label, mbps, ret(&inst.video_return_bytes, &r.label)))
        .collect::<Result<Vec<_>>>()?;
    let prompts = inst
        .prompt
        .resolutions()
        .iter()
        .map(|r| best_branch(&inst.prompt, &r.label, mbps, ret(&inst.prompt_return_bytes, &r.label)))
        .collect::<Result<Vec<_>>>()?;
    select(inst, videos, prompts)
}

/// Like [`plan`], with every transfer replayed over `trace` from `t0`.
///
/// Splits are found by iterating min-cut at the effective bandwidth seen by
/// the previous split's transfers, up to [`MAX_TRACE_ROUNDS`] rounds; if
/// that does not settle, the split for the lowest rate in the budget window
/// is also tried. All-edge and all-cloud splits are always candidates and
/// the fastest replayed candidate wins.
pub fn plan_under_trace(inst: &SeroInstance, trace: &BandwidthTrace, t0: f64) -> Result<SeroPlan> {
    inst.validate()?;
    let horizon = t0 + inst.latency_budget_ms;
    if !trace.covers(t0) || trace.end_ms() < horizon {
        let t = if trace.covers(t0) { trace.end_ms() } else { t0 };
        return Err(NetError::TraceGap { t, start: trace.start_ms(), end: trace.end_ms() }.into());
    }
    let budget = inst.latency_budget_ms;
    let videos = inst
        .video
        .resolutions()
        .iter()
        .map(|r| {
            best_branch_on_trace(&inst.video, &r.label, ret(&inst.video_return_bytes, &r.label), trace, t0, budget)
        })
        .collect::<Result<Vec<_>>>()?;
    let prompts = inst
        .prompt
        .resolutions()
        .iter()
        .map(|r| {
            best_branch_on_trace(&inst.prompt, &r.label, ret(&inst.prompt_return_bytes, &r.label), trace, t0, budget)
        })
        .collect::<Result<Vec<_>>>()?;
    select(inst, videos, prompts)
}
