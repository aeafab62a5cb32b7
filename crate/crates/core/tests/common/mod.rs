#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitsam_core::graph::{LayerGraph, LayerNode, ProfileDocument, Resolution};
use splitsam_core::sero::{AccuracyTable, SeroInstance};

/// Bytes per millisecond of transfer at 1 Mbps.
pub const BYTES_PER_MS_AT_1MBPS: u64 = 125;

/// A random DAG on `n` layers with integer millisecond costs. Transfer
/// sizes are multiples of 125 bytes so that at 1 Mbps every transfer takes
/// a whole number of milliseconds.
pub fn random_dag(rng: &mut ChaCha8Rng, n: usize, labels: &[&str]) -> ProfileDocument {
    let resolutions: Vec<Resolution> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| Resolution { label: l.to_string(), pixels: 1_000_000 >> i, scale: 1.0 / (1 << i) as f64 })
        .collect();
    let per_res = |rng: &mut ChaCha8Rng, lo: u64, hi: u64| -> BTreeMap<String, f64> {
        labels.iter().map(|l| (l.to_string(), rng.random_range(lo..=hi) as f64)).collect()
    };
    let nodes: Vec<LayerNode> = (0..n as u32)
        .map(|id| LayerNode {
            id,
            name: format!("n{id}"),
            edge_ms: per_res(rng, 1, 40),
            cloud_ms: per_res(rng, 0, 10),
            output_bytes: labels
                .iter()
                .map(|l| (l.to_string(), BYTES_PER_MS_AT_1MBPS * rng.random_range(0..=40u64)))
                .collect(),
        })
        .collect();
    let density = rng.random_range(0.15..0.6);
    let mut edges = Vec::new();
    for v in 1..n as u32 {
        for u in 0..v {
            if rng.random_bool(density) {
                edges.push((u, v));
            }
        }
    }
    let input_bytes =
        labels.iter().map(|l| (l.to_string(), BYTES_PER_MS_AT_1MBPS * rng.random_range(1..=60u64))).collect();
    ProfileDocument { resolutions, nodes, edges, input_bytes, entry_id: None, exit_id: None }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Costs of one subset, computed straight from the document: compute time
/// of every layer on its side, plus one transfer per dependency that
/// crosses from edge to cloud (layers without predecessors read the raw
/// input, which starts on the edge).
pub struct SubsetCost {
    pub edge_ms: f64,
    pub cloud_ms: f64,
    pub uplink_ms: f64,
    pub any_cloud: bool,
}

fn subset_cost(doc: &ProfileDocument, res: &str, mbps: f64, on_edge: &[bool]) -> Option<SubsetCost> {
    let n = doc.nodes.len();
    let pos = |id: u32| doc.nodes.iter().position(|x| x.id == id).unwrap();
    let mut has_pred = vec![false; n];
    for &(u, v) in &doc.edges {
        let (u, v) = (pos(u), pos(v));
        has_pred[v] = true;
        if on_edge[v] && !on_edge[u] {
            return None;
        }
    }
    let mut c = SubsetCost { edge_ms: 0.0, cloud_ms: 0.0, uplink_ms: 0.0, any_cloud: false };
    let ms = |bytes: u64| bytes as f64 * 8.0 / (mbps * 1000.0);
    for (i, node) in doc.nodes.iter().enumerate() {
        if on_edge[i] {
            c.edge_ms += node.edge_ms[res];
        } else {
            c.any_cloud = true;
            c.cloud_ms += node.cloud_ms[res];
            if !has_pred[i] {
                c.uplink_ms += ms(doc.input_bytes[res]);
            }
        }
    }
    for &(u, v) in &doc.edges {
        let (u, v) = (pos(u), pos(v));
        if on_edge[u] && !on_edge[v] {
            c.uplink_ms += ms(doc.nodes[u].output_bytes[res]);
        }
    }
    Some(c)
}

/// Visits every ancestor-closed edge-side subset.
pub fn for_each_closed_subset(doc: &ProfileDocument, res: &str, mbps: f64, mut f: impl FnMut(&[bool], SubsetCost)) {
    let n = doc.nodes.len();
    assert!(n <= 16, "oracle is exponential");
    let mut on_edge = vec![false; n];
    for mask in 0u32..(1 << n) {
        for (i, e) in on_edge.iter_mut().enumerate() {
            *e = mask >> i & 1 == 1;
        }
        if let Some(c) = subset_cost(doc, res, mbps, &on_edge) {
            f(&on_edge, c);
        }
    }
}

/// Minimum compute-plus-uplink cost over all closed subsets, in ms.
pub fn brute_force_min_cut(doc: &ProfileDocument, res: &str, mbps: f64) -> f64 {
    let mut best = f64::INFINITY;
    for_each_closed_subset(doc, res, mbps, |_, c| best = best.min(c.edge_ms + c.cloud_ms + c.uplink_ms));
    best
}

/// Fastest branch latency over all closed subsets; the download is paid
/// whenever some layer runs in the cloud.
pub fn brute_force_branch(doc: &ProfileDocument, res: &str, mbps: f64, return_bytes: u64) -> f64 {
    let down = return_bytes as f64 * 8.0 / (mbps * 1000.0);
    let mut best = f64::INFINITY;
    for_each_closed_subset(doc, res, mbps, |_, c| {
        let t = c.edge_ms + c.cloud_ms + c.uplink_ms + if c.any_cloud { down } else { 0.0 };
        best = best.min(t);
    });
    best
}

pub const LABELS: [&str; 4] = ["r0", "r1", "r2", "r3"];

/// Random instance on small DAGs with an accuracy table that is
/// non-decreasing in both resolutions.
pub struct RandomInstance {
    pub video_doc: ProfileDocument,
    pub prompt_doc: ProfileDocument,
    pub instance: SeroInstance,
}

pub fn random_instance(seed: u64) -> RandomInstance {
    let mut r = rng(seed);
    let nv = r.random_range(1..=10);
    let np = r.random_range(1..=10);
    let kv = r.random_range(1..=4);
    let kp = r.random_range(1..=4);
    let video_doc = random_dag(&mut r, nv, &LABELS[..kv]);
    let prompt_doc = random_dag(&mut r, np, &LABELS[..kp]);
    let mut accuracy = AccuracyTable::new();
    let vsteps: Vec<f64> = (0..kv).map(|_| r.random_range(0.0..0.1)).collect();
    let psteps: Vec<f64> = (0..kp).map(|_| r.random_range(0.0..0.05)).collect();
    for (i, v) in LABELS[..kv].iter().enumerate() {
        for (j, p) in LABELS[..kp].iter().enumerate() {
            // index 0 is the largest resolution
            let a = 0.95 - vsteps[..=i].iter().sum::<f64>() - psteps[..=j].iter().sum::<f64>();
            accuracy.entry(v.to_string()).or_default().insert(p.to_string(), a.max(0.0));
        }
    }
    let ret = |r: &mut ChaCha8Rng, k: usize| -> BTreeMap<String, u64> {
        LABELS[..k].iter().map(|l| (l.to_string(), BYTES_PER_MS_AT_1MBPS * r.random_range(0..=30u64))).collect()
    };
    let video_return_bytes = ret(&mut r, kv);
    let prompt_return_bytes = ret(&mut r, kp);
    let instance = SeroInstance {
        video: LayerGraph::from_document(video_doc.clone()).unwrap(),
        prompt: LayerGraph::from_document(prompt_doc.clone()).unwrap(),
        accuracy,
        bandwidth_mbps: [0.5, 1.0, 2.0, 8.0][r.random_range(0..4)],
        latency_budget_ms: r.random_range(20.0..400.0),
        decoder_ms_per_prompt: r.random_range(0.0..5.0),
        prompt_count: r.random_range(1..=4),
        video_return_bytes,
        prompt_return_bytes,
    };
    RandomInstance { video_doc, prompt_doc, instance }
}

/// Exhaustive optimum over resolution pairs and all closed partition pairs:
/// `Some(accuracy)` or `None` when nothing meets the budget.
pub fn brute_force_plan(ri: &RandomInstance) -> Option<f64> {
    let inst = &ri.instance;
    let mut best: Option<f64> = None;
    for v in inst.video.resolutions() {
        let lv = brute_force_branch(&ri.video_doc, &v.label, inst.bandwidth_mbps, inst.video_return_bytes[&v.label]);
        for p in inst.prompt.resolutions() {
            let lp =
                brute_force_branch(&ri.prompt_doc, &p.label, inst.bandwidth_mbps, inst.prompt_return_bytes[&p.label]);
            let total = lv.max(lp) + inst.decoder_ms_per_prompt * inst.prompt_count as f64;
            if total <= inst.latency_budget_ms {
                let a = inst.accuracy[&v.label][&p.label];
                best = Some(best.map_or(a, |b: f64| b.max(a)));
            }
        }
    }
    best
}
