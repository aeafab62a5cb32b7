//! Plug-in entropy and mutual information over discrete histograms.

use serde::{Deserialize, Serialize};

use super::PromptError;

/// Probabilities must sum to one within this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Shannon entropy in bits of a normalized distribution; `0 log 0 = 0`.
pub fn entropy(dist: &[f64]) -> Result<f64, PromptError> {
    let mut total = 0.0;
    for &p in dist {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(PromptError::NegativeProbability(p));
        }
        total += p;
    }
    if total == 0.0 {
        return Err(PromptError::ZeroTotal);
    }
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(PromptError::NotNormalized(total));
    }
    let h: f64 = dist.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    Ok(h.max(0.0))
}

/// Co-occurrence counts of a prompt variable (rows) and an output variable
/// (columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalJoint {
    counts: Vec<Vec<u64>>,
}

impl EmpiricalJoint {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self, PromptError> {
        let cols = counts.first().map_or(0, Vec::len);
        if counts.is_empty() || cols == 0 || counts.iter().any(|r| r.len() != cols) {
            return Err(PromptError::MalformedJoint);
        }
        let j = EmpiricalJoint { counts };
        if j.total() == 0 {
            return Err(PromptError::ZeroTotal);
        }
        Ok(j)
    }

    /// Counts from `(x, y)` observations with the given alphabet sizes.
    pub fn from_pairs(
        x_size: usize,
        y_size: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PromptError> {
        let mut counts = vec![vec![0u64; y_size]; x_size];
        for (x, y) in pairs {
            if x >= x_size || y >= y_size {
                return Err(PromptError::MalformedJoint);
            }
            counts[x][y] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.counts[0].len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn transpose(&self) -> Self {
        let counts = (0..self.cols()).map(|c| self.counts.iter().map(|r| r[c]).collect()).collect();
        EmpiricalJoint { counts }
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        let n = self.total() as f64;
        self.counts.iter().map(|r| r.iter().sum::<u64>() as f64 / n).collect()
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        let n = self.total() as f64;
        (0..self.cols()).map(|c| self.counts.iter().map(|r| r[c]).sum::<u64>() as f64 / n).collect()
    }

    pub fn joint_probabilities(&self) -> Vec<f64> {
        let n = self.total() as f64;
        self.counts.iter().flatten().map(|&c| c as f64 / n).collect()
    }

    /// Merges output columns according to `map` (old column -> new column).
    pub fn coarsen_y(&self, map: &[usize]) -> Result<Self, PromptError> {
        if map.len() != self.cols() {
            return Err(PromptError::MalformedJoint);
        }
        let new_cols = map.iter().max().map_or(0, |m| m + 1);
        let counts = self
            .counts
            .iter()
            .map(|row| {
                let mut out = vec![0u64; new_cols];
                for (c, &v) in row.iter().enumerate() {
                    out[map[c]] += v;
                }
                out
            })
            .collect();
        Self::from_counts(counts)
    }

    pub fn entropy_x(&self) -> f64 {
        entropy(&self.x_marginal()).unwrap_or(0.0)
    }

    pub fn entropy_y(&self) -> f64 {
        entropy(&self.y_marginal()).unwrap_or(0.0)
    }

    pub fn joint_entropy(&self) -> f64 {
        entropy(&self.joint_probabilities()).unwrap_or(0.0)
    }

    /// `I(X;Y) = H(X) + H(Y) - H(X,Y)` in bits, clamped at zero.
    pub fn mutual_information(&self) -> f64 {
        (self.entropy_x() + self.entropy_y() - self.joint_entropy()).max(0.0)
    }
}

pub fn mutual_information(j: &EmpiricalJoint) -> f64 {
    j.mutual_information()
}
