//! Grid-world stand-in for a promptable segmentation task.
//!
//! The frame is a `grid x grid` board of labelled cells (0 = background,
//! `k > 0` = object `k`). A prompt's predicted mask follows the way a
//! promptable segmenter reacts: a point on an object selects the whole
//! object, a box selects the cells whose centres it contains, a scribble
//! selects every object it touches plus the background cells it crosses.
//! Accuracy is the IoU of the predicted union against the target objects.

use serde::{Deserialize, Serialize};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::info::EmpiricalJoint;
use super::{PromptError, Result, VisualPrompt, DEFAULT_PAD};

/// Decoder cost: a fixed part plus one decoder pass per prompt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderModel {
    pub base_ms: f64,
    pub per_prompt_ms: f64,
}

impl DecoderModel {
    pub fn latency_ms(&self, prompts: usize) -> f64 {
        self.base_ms + self.per_prompt_ms * prompts as f64
    }

    /// Fraction of latency saved when going from `from` to `to` prompts.
    pub fn reduction(&self, from: usize, to: usize) -> f64 {
        1.0 - self.latency_ms(to) / self.latency_ms(from)
    }
}

impl Default for DecoderModel {
    /// 20 ms per decoder pass with a fixed part of 3.235 passes.
    fn default() -> Self {
        DecoderModel { base_ms: 64.7, per_prompt_ms: 20.0 }
    }
}

fn default_pad() -> f64 {
    DEFAULT_PAD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskFixture {
    pub grid: usize,
    /// `labels[row][col]`; rows follow `y`, columns follow `x`.
    pub labels: Vec<Vec<u32>>,
    /// Object labels the task asks for; empty means every object.
    #[serde(default)]
    pub targets: Vec<u32>,
    pub prompts: Vec<VisualPrompt>,
    #[serde(default)]
    pub decoder: DecoderModel,
    #[serde(default = "default_pad")]
    pub pad: f64,
}

impl TaskFixture {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(PromptError::InvalidFixture(m.to_string()));
        if self.grid == 0 {
            return bad("grid must be at least 1x1");
        }
        if self.labels.len() != self.grid || self.labels.iter().any(|r| r.len() != self.grid) {
            return bad("labels must be a grid x grid matrix");
        }
        if self.prompts.is_empty() {
            return bad("fixture has no prompts");
        }
        for (index, p) in self.prompts.iter().enumerate() {
            p.validate().map_err(|reason| PromptError::InvalidPrompt { index, reason })?;
        }
        if !(self.decoder.base_ms > 0.0 && self.decoder.per_prompt_ms > 0.0) {
            return bad("decoder costs must be positive");
        }
        if !(self.pad >= 0.0 && self.pad < 1.0) {
            return bad("pad must lie in [0, 1)");
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.grid * self.grid
    }

    fn label(&self, cell: usize) -> u32 {
        self.labels[cell / self.grid][cell % self.grid]
    }

    fn is_target(&self, cell: usize) -> bool {
        let l = self.label(cell);
        l != 0 && (self.targets.is_empty() || self.targets.contains(&l))
    }

    fn cell_at(&self, x: f64, y: f64) -> usize {
        let g = self.grid;
        let col = ((x * g as f64) as usize).min(g - 1);
        let row = ((y * g as f64) as usize).min(g - 1);
        row * g + col
    }

    fn select(&self, mask: &mut [bool], cell: usize) {
        let l = self.label(cell);
        if l == 0 {
            mask[cell] = true;
        } else {
            for (c, m) in mask.iter_mut().enumerate() {
                if self.label(c) == l {
                    *m = true;
                }
            }
        }
    }

    /// Cells predicted for a single prompt.
    pub fn prompt_mask(&self, p: &VisualPrompt) -> Vec<bool> {
        let g = self.grid as f64;
        let mut mask = vec![false; self.cells()];
        match p {
            VisualPrompt::Point { x, y } => self.select(&mut mask, self.cell_at(*x, *y)),
            VisualPrompt::Box { x0, y0, x1, y1 } => {
                for (c, m) in mask.iter_mut().enumerate() {
                    let cx = ((c % self.grid) as f64 + 0.5) / g;
                    let cy = ((c / self.grid) as f64 + 0.5) / g;
                    *m = cx >= *x0 && cx <= *x1 && cy >= *y0 && cy <= *y1;
                }
            }
            VisualPrompt::Scribble { points } => {
                for w in points.windows(2) {
                    let ((ax, ay), (bx, by)) = (w[0], w[1]);
                    let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
                    let steps = (len * g * 4.0).ceil().max(1.0) as usize;
                    for s in 0..=steps {
                        let t = s as f64 / steps as f64;
                        let cell = self.cell_at(ax + t * (bx - ax), ay + t * (by - ay));
                        self.select(&mut mask, cell);
                    }
                }
            }
        }
        mask
    }

    /// For each cell, `1 + index` of the first prompt whose mask covers it,
    /// or 0.
    pub fn claims(&self, prompts: &[VisualPrompt]) -> Vec<usize> {
        let mut claim = vec![0usize; self.cells()];
        for (i, p) in prompts.iter().enumerate() {
            for (c, hit) in self.prompt_mask(p).into_iter().enumerate() {
                if hit && claim[c] == 0 {
                    claim[c] = i + 1;
                }
            }
        }
        claim
    }

    /// IoU between the union of prompt masks and the target cells. An
    /// empty target matched by an empty prediction scores 1.
    pub fn accuracy(&self, prompts: &[VisualPrompt]) -> f64 {
        let claim = self.claims(prompts);
        let (mut inter, mut union) = (0usize, 0usize);
        for (c, &who) in claim.iter().enumerate() {
            let (pred, truth) = (who != 0, self.is_target(c));
            inter += (pred && truth) as usize;
            union += (pred || truth) as usize;
        }
        if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        }
    }

    /// Joint counts over cells of (claiming prompt, target membership).
    pub fn joint(&self, prompts: &[VisualPrompt]) -> Result<EmpiricalJoint> {
        let claim = self.claims(prompts);
        EmpiricalJoint::from_pairs(
            prompts.len() + 1,
            2,
            claim.iter().enumerate().map(|(c, &who)| (who, self.is_target(c) as usize)),
        )
    }

    /// Random rectangular objects and prompts, mostly placed on objects.
    /// Prompt coordinates are pairwise distinct in both axes.
    pub fn synthetic(grid: usize, points: usize, seed: u64) -> Result<Self> {
        if grid < 2 || points == 0 {
            return Err(PromptError::InvalidFixture("need grid >= 2 and at least one point".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels = vec![vec![0u32; grid]; grid];
        let objects = rng.random_range(1..=2u32);
        for obj in 1..=objects {
            let w = rng.random_range(1..=grid / 2);
            let h = rng.random_range(1..=grid / 2);
            let c0 = rng.random_range(0..=grid - w);
            let r0 = rng.random_range(0..=grid - h);
            for row in labels.iter_mut().skip(r0).take(h) {
                for cell in row.iter_mut().skip(c0).take(w) {
                    *cell = obj;
                }
            }
        }
        // distinct sub-cell offsets keep coordinates unique per axis
        let slots = grid * 16;
        let xs = sample(&mut rng, slots, points.min(slots)).into_vec();
        let ys = sample(&mut rng, slots, points.min(slots)).into_vec();
        let prompts = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| VisualPrompt::point((x as f64 + 0.5) / slots as f64, (y as f64 + 0.5) / slots as f64))
            .collect();
        let f = TaskFixture {
            grid,
            labels,
            targets: Vec::new(),
            prompts,
            decoder: DecoderModel::default(),
            pad: DEFAULT_PAD,
        };
        f.validate()?;
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_object() -> TaskFixture {
        let mut labels = vec![vec![0; 4]; 4];
        labels[1][1] = 1;
        labels[1][2] = 1;
        labels[2][1] = 1;
        labels[2][2] = 1;
        TaskFixture {
            grid: 4,
            labels,
            targets: vec![],
            prompts: vec![VisualPrompt::point(0.4, 0.4)],
            decoder: DecoderModel::default(),
            pad: DEFAULT_PAD,
        }
    }

    #[test]
    fn point_on_object_is_fully_informative() {
        let f = one_object();
        assert_eq!(f.accuracy(&f.prompts), 1.0);
        let j = f.joint(&f.prompts).unwrap();
        assert!((j.mutual_information() - j.entropy_y()).abs() < 1e-12);
    }

    #[test]
    fn no_prompts_carry_no_information() {
        let f = one_object();
        assert_eq!(f.joint(&[]).unwrap().mutual_information(), 0.0);
        assert_eq!(f.accuracy(&[]), 0.0);
    }

    #[test]
    fn loose_box_loses_accuracy() {
        let f = one_object();
        let tight = VisualPrompt::rect(0.25, 0.25, 0.75, 0.75);
        let loose = VisualPrompt::rect(0.0, 0.0, 0.8, 0.8);
        assert_eq!(f.accuracy(&[tight]), 1.0);
        assert!(f.accuracy(&[loose]) < 1.0);
    }

    #[test]
    fn decoder_reduction() {
        let d = DecoderModel::default();
        // 9d / (E + 10d) with E = 3.235 d
        assert!((d.reduction(10, 1) - 9.0 / 13.235).abs() < 1e-12);
    }

    #[test]
    fn fixture_validation() {
        let mut f = one_object();
        f.prompts.clear();
        assert!(matches!(f.validate(), Err(PromptError::InvalidFixture(_))));
        let mut f = one_object();
        f.labels.pop();
        assert!(f.validate().is_err());
        assert!(TaskFixture::synthetic(8, 10, 3).unwrap().validate().is_ok());
    }
}
