//! Reference scenario: a ViT-style image encoder, a small prompt-image
//! encoder, accuracy tables for every policy and a 10-point prompt fixture.
//!
//! Payload sizes are chosen so that a 1080p frame takes 3.7 s to upload and
//! its embedding 1.2 s to download at 20 Mbps.

use std::collections::BTreeMap;

use crate::graph::{default_resolutions, LayerGraph, LayerNode, ProfileDocument, Resolution};
use crate::prompt::{DecoderModel, TaskFixture, VisualPrompt, DEFAULT_PAD};
use crate::sero::{AccuracyTable, SeroInstance};
use crate::sim::{McsParams, Scenario, SrsParams};

/// Raw 1080p frame size in bytes.
pub const FRAME_BYTES_1080P: u64 = 9_250_000;
/// Image embedding size in bytes, independent of the input resolution.
pub const EMBEDDING_BYTES: u64 = 3_000_000;
pub const PROMPT_EMBEDDING_BYTES: u64 = 500_000;
pub const BUDGET_MS: f64 = 3000.0;
pub const DECODER_MS_PER_PROMPT: f64 = 20.0;
pub const RAW_PROMPTS: usize = 10;
pub const TRANSFORMED_PROMPTS: usize = 1;
pub const CLOUD_SPEEDUP: f64 = 10.0;

const VIDEO_BASE: [f64; 4] = [0.826, 0.714, 0.56, 0.431];
const PROMPT_ADJ: [f64; 4] = [0.0, -0.008, -0.014, -0.020];
const MCS_BASE: [f64; 4] = [0.655, 0.6, 0.52, 0.45];
const SRS_ACCURACY: [f64; 4] = [0.826, 0.74, 0.62, 0.521];

fn ratio(r: &Resolution, top: &Resolution) -> f64 {
    r.pixels as f64 / top.pixels as f64
}

/// Chain profile whose costs scale with pixel count from the 1080p values.
fn chain_document(layers: &[(&str, f64, u64)], input_1080p: u64) -> ProfileDocument {
    let res = default_resolutions();
    let top = res[0].clone();
    let per_res =
        |v: f64| -> BTreeMap<String, f64> { res.iter().map(|r| (r.label.clone(), v * ratio(r, &top))).collect() };
    let nodes = layers
        .iter()
        .enumerate()
        .map(|(i, &(name, edge, out))| LayerNode {
            id: i as u32,
            name: name.to_string(),
            edge_ms: per_res(edge),
            cloud_ms: per_res(edge / CLOUD_SPEEDUP),
            output_bytes: res.iter().map(|r| (r.label.clone(), (out as f64 * ratio(r, &top)).round() as u64)).collect(),
        })
        .collect();
    let edges = (1..layers.len() as u32).map(|i| (i - 1, i)).collect();
    let input_bytes =
        res.iter().map(|r| (r.label.clone(), (input_1080p as f64 * ratio(r, &top)).round() as u64)).collect();
    ProfileDocument { resolutions: res, nodes, edges, input_bytes, entry_id: None, exit_id: None }
}

/// Patch embedding, ten transformer blocks and a neck: 6 s on the edge at
/// 1080p, ten times faster in the cloud.
pub fn video_profile_document() -> ProfileDocument {
    let mut layers = vec![("patch_embed", 300.0, 2_000_000)];
    let names: Vec<String> = (0..10).map(|i| format!("block_{i}")).collect();
    layers.extend(names.iter().map(|n| (n.as_str(), 540.0, 2_000_000)));
    layers.push(("neck", 300.0, 2_000_000));
    chain_document(&layers, FRAME_BYTES_1080P)
}

/// Six light layers, 800 ms on the edge at 1080p.
pub fn prompt_profile_document() -> ProfileDocument {
    let names: Vec<String> = (0..6).map(|i| format!("prompt_layer_{i}")).collect();
    let layers: Vec<(&str, f64, u64)> =
        names.iter().map(|n| (n.as_str(), 800.0 / 6.0, PROMPT_EMBEDDING_BYTES)).collect();
    chain_document(&layers, FRAME_BYTES_1080P)
}

fn table(video: &[f64; 4], adj: &[f64; 4]) -> AccuracyTable {
    let res = default_resolutions();
    res.iter()
        .zip(video)
        .map(|(v, base)| (v.label.clone(), res.iter().zip(adj).map(|(p, a)| (p.label.clone(), base + a)).collect()))
        .collect()
}

pub fn accuracy_table() -> AccuracyTable {
    table(&VIDEO_BASE, &PROMPT_ADJ)
}

pub fn mcs_accuracy_table() -> AccuracyTable {
    table(&MCS_BASE, &PROMPT_ADJ)
}

pub fn srs_accuracy() -> BTreeMap<String, f64> {
    default_resolutions().into_iter().zip(SRS_ACCURACY).map(|(r, a)| (r.label, a)).collect()
}

pub fn instance() -> SeroInstance {
    let video = LayerGraph::from_document(video_profile_document()).expect("reference video profile is valid");
    let prompt = LayerGraph::from_document(prompt_profile_document()).expect("reference prompt profile is valid");
    let labels: Vec<String> = default_resolutions().into_iter().map(|r| r.label).collect();
    SeroInstance {
        video,
        prompt,
        accuracy: accuracy_table(),
        bandwidth_mbps: 20.0,
        latency_budget_ms: BUDGET_MS,
        decoder_ms_per_prompt: DECODER_MS_PER_PROMPT,
        prompt_count: TRANSFORMED_PROMPTS,
        video_return_bytes: labels.iter().map(|l| (l.clone(), EMBEDDING_BYTES)).collect(),
        prompt_return_bytes: labels.iter().map(|l| (l.clone(), PROMPT_EMBEDDING_BYTES)).collect(),
    }
}

pub fn scenario() -> Scenario {
    Scenario {
        instance: instance(),
        untransformed_prompt_count: RAW_PROMPTS,
        transform_accuracy_penalty: 0.0,
        mcs: Some(McsParams { compute_factor: 1.0, accuracy: mcs_accuracy_table() }),
        srs: Some(SrsParams { downsample: None, upsample_accuracy: srs_accuracy(), sr_ms: 50.0 }),
    }
}

/// 8x8 frame with two buildings and ten clicks, five on each.
pub fn prompt_fixture() -> TaskFixture {
    let mut labels = vec![vec![0u32; 8]; 8];
    for (r, row) in labels.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            if (1..4).contains(&r) && (1..4).contains(&c) {
                *cell = 1;
            } else if (4..7).contains(&r) && (4..7).contains(&c) {
                *cell = 2;
            }
        }
    }
    let clicks = [
        (0.16, 0.17),
        (0.22, 0.31),
        (0.36, 0.19),
        (0.41, 0.44),
        (0.27, 0.38),
        (0.56, 0.58),
        (0.63, 0.71),
        (0.78, 0.61),
        (0.69, 0.82),
        (0.84, 0.77),
    ];
    TaskFixture {
        grid: 8,
        labels,
        targets: Vec::new(),
        prompts: clicks.iter().map(|&(x, y)| VisualPrompt::point(x, y)).collect(),
        decoder: DecoderModel { base_ms: 3.235 * DECODER_MS_PER_PROMPT, per_prompt_ms: DECODER_MS_PER_PROMPT },
        pad: DEFAULT_PAD,
    }
}
