//! Offline random search over transformation strategies and online
//! selection under a latency budget.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fixture::TaskFixture;
use super::{apply_strategy, PromptError, PromptKind, Result, TransformOp, TransformStrategy, VisualPrompt};

/// Which op kinds the random sampler may draw. With both disabled only the
/// identity strategy is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub allow_combine: bool,
    pub allow_convert: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { allow_combine: true, allow_convert: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub accuracy: f64,
    pub latency_ms: f64,
    pub contribution_bits: f64,
}

impl ProfileEntry {
    pub fn ratio(&self) -> f64 {
        self.contribution_bits / self.latency_ms
    }
}

/// Strategy id -> measured accuracy, decoder latency and contribution.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyProfile {
    pub entries: BTreeMap<String, ProfileEntry>,
}

impl StrategyProfile {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ProfileEntry> {
        self.entries.get(id)
    }

    pub fn insert(&mut self, id: String, entry: ProfileEntry) {
        self.entries.insert(id, entry);
    }

    pub fn remove(&mut self, id: &str) -> Option<ProfileEntry> {
        self.entries.remove(id)
    }

    pub fn min_latency_ms(&self) -> Option<f64> {
        self.entries.values().map(|e| e.latency_ms).min_by(f64::total_cmp)
    }
}

/// The profile together with the strategies its ids refer to.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OfflineProfile {
    pub profile: StrategyProfile,
    pub strategies: BTreeMap<String, TransformStrategy>,
}

/// Scores one strategy on a fixture.
pub fn evaluate(fixture: &TaskFixture, strategy: &TransformStrategy) -> Result<ProfileEntry> {
    let out = apply_strategy(&fixture.prompts, strategy, fixture.pad)?;
    Ok(ProfileEntry {
        accuracy: fixture.accuracy(&out),
        latency_ms: fixture.decoder.latency_ms(out.len()),
        contribution_bits: fixture.joint(&out)?.mutual_information(),
    })
}

#[derive(Clone, Copy)]
enum OpKind {
    Combine,
    Convert,
}

/// Draws a random strategy. The op count is uniform in `[0, n]`; each step
/// picks uniformly among the op kinds that still apply, then uniformly
/// among their arguments. Steps whose result would be invalid are dropped.
pub fn sample_strategy(
    prompts: &[VisualPrompt],
    pad: f64,
    cfg: SamplerConfig,
    rng: &mut ChaCha8Rng,
) -> TransformStrategy {
    let steps = rng.random_range(0..=prompts.len());
    let mut current = prompts.to_vec();
    let mut ops = Vec::new();
    for _ in 0..steps {
        let convertible: Vec<(usize, Vec<PromptKind>)> = current
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.conversion_targets(pad)))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        let mut kinds = Vec::new();
        if cfg.allow_combine && current.len() >= 2 {
            kinds.push(OpKind::Combine);
        }
        if cfg.allow_convert && !convertible.is_empty() {
            kinds.push(OpKind::Convert);
        }
        if kinds.is_empty() {
            break;
        }
        let op = match kinds[rng.random_range(0..kinds.len())] {
            OpKind::Combine => {
                let m = rng.random_range(2..=current.len());
                let mut members = sample(rng, current.len(), m).into_vec();
                members.sort_unstable();
                TransformOp::Combine { members }
            }
            OpKind::Convert => {
                let (index, targets) = &convertible[rng.random_range(0..convertible.len())];
                TransformOp::Convert { index: *index, target: targets[rng.random_range(0..targets.len())] }
            }
        };
        let trial = TransformStrategy::new(vec![op.clone()]);
        if let Ok(next) = apply_strategy(&current, &trial, pad) {
            current = next;
            ops.push(op);
        }
    }
    TransformStrategy::new(ops)
}

/// Evaluates `budget` seeded random strategies on the fixture. The identity
/// strategy is always part of the sample stream's support; repeated draws
/// of the same strategy collapse onto one entry.
pub fn offline_profile(
    fixture: &TaskFixture,
    budget: usize,
    seed: u64,
    sampler: SamplerConfig,
) -> Result<OfflineProfile> {
    fixture.validate()?;
    if budget == 0 {
        return Err(PromptError::ZeroBudget);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = OfflineProfile::default();
    for _ in 0..budget {
        let s = sample_strategy(&fixture.prompts, fixture.pad, sampler, &mut rng);
        let id = s.id();
        if out.strategies.contains_key(&id) {
            continue;
        }
        let entry = evaluate(fixture, &s)?;
        out.profile.insert(id.clone(), entry);
        out.strategies.insert(id, s);
    }
    Ok(out)
}

/// Picks the feasible entry with the highest contribution per millisecond.
/// Ties go to the lower latency, then to the smaller id.
pub fn online_select(profile: &StrategyProfile, budget_ms: f64) -> Result<String> {
    if profile.is_empty() {
        return Err(PromptError::EmptyProfile);
    }
    let mut best: Option<(&String, &ProfileEntry)> = None;
    for (id, e) in &profile.entries {
        if e.latency_ms > budget_ms {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, b)) => match e.ratio().total_cmp(&b.ratio()) {
                Ordering::Greater => true,
                Ordering::Equal => e.latency_ms < b.latency_ms,
                Ordering::Less => false,
            },
        };
        if better {
            best = Some((id, e));
        }
    }
    best.map(|(id, _)| id.clone()).ok_or_else(|| PromptError::Infeasible {
        budget_ms,
        min_latency_ms: profile.min_latency_ms().unwrap_or(f64::NAN),
    })
}
