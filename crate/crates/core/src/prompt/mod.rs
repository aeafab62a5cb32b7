//! Visual prompt transformation.
//!
//! A user's clicks, boxes and scribbles can be merged or re-typed to cut the
//! number of decoder passes. Each candidate transformation strategy is
//! scored offline by the mutual information between the prompts and the
//! task output, its surrogate accuracy, and its decoder latency; online, the
//! strategy with the best information per millisecond inside the budget is
//! chosen.

mod fixture;
mod info;
mod search;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use fixture::{DecoderModel, TaskFixture};
pub use info::{entropy, mutual_information, EmpiricalJoint, NORMALIZATION_TOL};
pub use search::{
    evaluate, offline_profile, online_select, sample_strategy, OfflineProfile, ProfileEntry, SamplerConfig,
    StrategyProfile,
};

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("negative or non-finite probability {0}")]
    NegativeProbability(f64),
    #[error("distribution has zero total mass")]
    ZeroTotal,
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("joint table must be a non-empty rectangular matrix")]
    MalformedJoint,
    #[error("invalid prompt {index}: {reason}")]
    InvalidPrompt { index: usize, reason: String },
    #[error("op {op}: index {index} out of range for {len} prompts")]
    IndexOutOfRange { op: usize, index: usize, len: usize },
    #[error("op {op}: prompt {index} appears twice in one combine")]
    DuplicateMember { op: usize, index: usize },
    #[error("op {op}: combine needs at least two members")]
    CombineTooSmall { op: usize },
    #[error("op {op}: cannot convert {from:?} to {to:?}")]
    InvalidConversion { op: usize, from: PromptKind, to: PromptKind },
    #[error("op {op}: result is a zero-area box (increase pad)")]
    DegenerateBox { op: usize },
    #[error("invalid fixture: {0}")]
    InvalidFixture(String),
    #[error("search budget must be at least one iteration")]
    ZeroBudget,
    #[error("strategy profile is empty")]
    EmptyProfile,
    #[error("no strategy fits {budget_ms} ms (fastest needs {min_latency_ms} ms)")]
    Infeasible { budget_ms: f64, min_latency_ms: f64 },
}

pub type Result<T> = std::result::Result<T, PromptError>;

/// Default expansion applied around combined or converted geometry, in
/// units of the frame.
pub const DEFAULT_PAD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptKind {
    Point,
    Box,
    Scribble,
}

/// A visual prompt in normalized `[0, 1]^2` frame coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VisualPrompt {
    Point { x: f64, y: f64 },
    Box { x0: f64, y0: f64, x1: f64, y1: f64 },
    Scribble { points: Vec<(f64, f64)> },
}

fn unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

impl VisualPrompt {
    pub fn point(x: f64, y: f64) -> Self {
        VisualPrompt::Point { x, y }
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        VisualPrompt::Box { x0, y0, x1, y1 }
    }

    pub fn kind(&self) -> PromptKind {
        match self {
            VisualPrompt::Point { .. } => PromptKind::Point,
            VisualPrompt::Box { .. } => PromptKind::Box,
            VisualPrompt::Scribble { .. } => PromptKind::Scribble,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        match self {
            VisualPrompt::Point { x, y } => {
                if !(unit(*x) && unit(*y)) {
                    return Err(format!("point ({x}, {y}) outside the unit frame"));
                }
            }
            VisualPrompt::Box { x0, y0, x1, y1 } => {
                if ![x0, y0, x1, y1].iter().all(|v| unit(**v)) {
                    return Err("box corner outside the unit frame".into());
                }
                if !(x0 < x1 && y0 < y1) {
                    return Err("box needs x0 < x1 and y0 < y1".into());
                }
            }
            VisualPrompt::Scribble { points } => {
                if points.len() < 2 {
                    return Err("scribble needs at least two points".into());
                }
                if !points.iter().all(|(x, y)| unit(*x) && unit(*y)) {
                    return Err("scribble point outside the unit frame".into());
                }
            }
        }
        Ok(())
    }

    /// Axis-aligned bounds `(x0, y0, x1, y1)`; zero-area for points.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match self {
            VisualPrompt::Point { x, y } => (*x, *y, *x, *y),
            VisualPrompt::Box { x0, y0, x1, y1 } => (*x0, *y0, *x1, *y1),
            VisualPrompt::Scribble { points } => points
                .iter()
                .fold((f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY), |(a, b, c, d), &(x, y)| {
                    (a.min(x), b.min(y), c.max(x), d.max(y))
                }),
        }
    }

    /// Conversions this prompt supports.
    pub fn conversion_targets(&self, pad: f64) -> Vec<PromptKind> {
        match self.kind() {
            PromptKind::Point if pad > 0.0 => vec![PromptKind::Box],
            PromptKind::Point => vec![],
            PromptKind::Box => vec![PromptKind::Point],
            PromptKind::Scribble => vec![PromptKind::Box, PromptKind::Point],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum TransformOp {
    /// Replace the members by their padded bounding box, placed at the
    /// position of the lowest member index.
    Combine {
        members: Vec<usize>,
    },
    Convert {
        index: usize,
        target: PromptKind,
    },
}

/// An ordered list of ops; indices refer to the prompt list as it stands
/// when each op runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransformStrategy {
    pub ops: Vec<TransformOp>,
}

impl TransformStrategy {
    pub fn identity() -> Self {
        TransformStrategy::default()
    }

    pub fn new(ops: Vec<TransformOp>) -> Self {
        TransformStrategy { ops }
    }

    /// Stable identifier: first 64 bits of SHA-256 over the canonical JSON
    /// encoding of the op list.
    pub fn id(&self) -> String {
        let canonical = serde_json::to_vec(&self.ops).expect("ops always serialize");
        let digest = Sha256::digest(&canonical);
        let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        format!("s-{hex}")
    }
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

fn padded_box(op: usize, (x0, y0, x1, y1): (f64, f64, f64, f64), pad: f64) -> Result<VisualPrompt> {
    let b = VisualPrompt::Box {
        x0: clamp_unit(x0 - pad),
        y0: clamp_unit(y0 - pad),
        x1: clamp_unit(x1 + pad),
        y1: clamp_unit(y1 + pad),
    };
    b.validate().map_err(|_| PromptError::DegenerateBox { op })?;
    Ok(b)
}

fn apply_op(prompts: &mut Vec<VisualPrompt>, op_index: usize, op: &TransformOp, pad: f64) -> Result<()> {
    let len = prompts.len();
    match op {
        TransformOp::Combine { members } => {
            if members.len() < 2 {
                return Err(PromptError::CombineTooSmall { op: op_index });
            }
            let mut sorted = members.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(PromptError::DuplicateMember { op: op_index, index: w[0] });
                }
            }
            if let Some(&bad) = sorted.iter().find(|&&i| i >= len) {
                return Err(PromptError::IndexOutOfRange { op: op_index, index: bad, len });
            }
            let bounds = sorted.iter().map(|&i| prompts[i].bounds()).fold(
                (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
                |(a, b, c, d), (x0, y0, x1, y1)| (a.min(x0), b.min(y0), c.max(x1), d.max(y1)),
            );
            let combined = padded_box(op_index, bounds, pad)?;
            for &i in sorted[1..].iter().rev() {
                prompts.remove(i);
            }
            prompts[sorted[0]] = combined;
        }
        TransformOp::Convert { index, target } => {
            let Some(p) = prompts.get(*index) else {
                return Err(PromptError::IndexOutOfRange { op: op_index, index: *index, len });
            };
            let from = p.kind();
            let bad = PromptError::InvalidConversion { op: op_index, from, to: *target };
            let (x0, y0, x1, y1) = p.bounds();
            let converted = match (from, target) {
                (PromptKind::Point, PromptKind::Box) => padded_box(op_index, (x0, y0, x1, y1), pad)?,
                (PromptKind::Scribble, PromptKind::Box) => {
                    // only widen a dimension the scribble does not span
                    let (px, py) = (if x1 > x0 { 0.0 } else { pad }, if y1 > y0 { 0.0 } else { pad });
                    let b = VisualPrompt::Box {
                        x0: clamp_unit(x0 - px),
                        y0: clamp_unit(y0 - py),
                        x1: clamp_unit(x1 + px),
                        y1: clamp_unit(y1 + py),
                    };
                    b.validate().map_err(|_| PromptError::DegenerateBox { op: op_index })?;
                    b
                }
                (PromptKind::Box | PromptKind::Scribble, PromptKind::Point) => {
                    VisualPrompt::point((x0 + x1) / 2.0, (y0 + y1) / 2.0)
                }
                _ => return Err(bad),
            };
            prompts[*index] = converted;
        }
    }
    Ok(())
}

/// Applies `strategy` to `prompts`. Every combine of `k` prompts removes
/// `k - 1` of them; converts keep the count.
pub fn apply_strategy(prompts: &[VisualPrompt], strategy: &TransformStrategy, pad: f64) -> Result<Vec<VisualPrompt>> {
    for (index, p) in prompts.iter().enumerate() {
        p.validate().map_err(|reason| PromptError::InvalidPrompt { index, reason })?;
    }
    let mut out = prompts.to_vec();
    for (i, op) in strategy.ops.iter().enumerate() {
        apply_op(&mut out, i, op, pad)?;
    }
    Ok(out)
}

/// Visual prompt contribution score: mutual information in bits between
/// the prompt that claims each cell of the fixture grid and the cell's
/// target membership.
pub fn contribution_score(prompts: &[VisualPrompt], fixture: &TaskFixture) -> Result<f64> {
    Ok(fixture.joint(prompts)?.mutual_information())
}
