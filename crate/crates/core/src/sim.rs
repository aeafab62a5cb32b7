//! Event-level replay of one segmentation query under each policy, and
//! sweeps across network classes and seeds.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{LayerGraph, Resolution};
use crate::netsim::{synth_class_trace, BandwidthTrace, NetError, NetworkClass, TraceSynthOptions};
use crate::partition::Partition;
use crate::seed::derive_seed;
use crate::sero::{
    self, branch_latency_on_trace, AccuracyTable, BranchLatency, InstanceDocument, SeroError, SeroInstance, SeroPlan,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Sero(#[from] SeroError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("policy {0} needs parameters the scenario does not provide")]
    MissingParameters(PolicyKind),
    #[error("unknown policy {0:?}")]
    UnknownPolicy(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("{policy} cannot meet the {budget_ms} ms budget (fastest is {min_latency_ms:.3} ms)")]
    Infeasible { policy: PolicyKind, budget_ms: f64, min_latency_ms: f64 },
    #[error("sweep needs at least one policy, class and seed")]
    EmptySweep,
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write report: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed scenario document: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Samedge,
    SamedgeWot,
    Vanilla,
    Mcs,
    Srs,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] =
        [PolicyKind::Samedge, PolicyKind::SamedgeWot, PolicyKind::Vanilla, PolicyKind::Mcs, PolicyKind::Srs];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Samedge => "samedge",
            PolicyKind::SamedgeWot => "samedge-wot",
            PolicyKind::Vanilla => "vanilla",
            PolicyKind::Mcs => "mcs",
            PolicyKind::Srs => "srs",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| SimError::UnknownPolicy(s.to_string()))
    }
}

/// Lightweight on-device model: every layer on the edge, costs scaled by
/// `compute_factor`, accuracy from its own table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McsParams {
    pub compute_factor: f64,
    pub accuracy: AccuracyTable,
}

/// Downsampled upload with cloud-side super-resolution. `downsample` fixes
/// the upload resolution; without it the highest one meeting the budget is
/// used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrsParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub downsample: Option<String>,
    pub upsample_accuracy: BTreeMap<String, f64>,
    pub sr_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub instance: SeroInstance,
    /// Prompt count when no transformation is applied.
    pub untransformed_prompt_count: usize,
    /// Accuracy lost by transforming prompts.
    pub transform_accuracy_penalty: f64,
    pub mcs: Option<McsParams>,
    pub srs: Option<SrsParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDocument {
    #[serde(flatten)]
    pub instance: InstanceDocument,
    pub untransformed_prompt_count: usize,
    #[serde(default)]
    pub transform_accuracy_penalty: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcs: Option<McsParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub srs: Option<SrsParams>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.instance.validate()?;
        if self.untransformed_prompt_count < self.instance.prompt_count {
            return Err(SimError::Invalid("transformation cannot add prompts".into()));
        }
        if !(0.0..=1.0).contains(&self.transform_accuracy_penalty) {
            return Err(SimError::Invalid("transform accuracy penalty must lie in [0, 1]".into()));
        }
        if let Some(m) = &self.mcs {
            if !(m.compute_factor > 0.0) {
                return Err(SimError::Invalid("mcs compute factor must be > 0".into()));
            }
            check_table(&m.accuracy, &self.instance)?;
        }
        if let Some(s) = &self.srs {
            if !(s.sr_ms >= 0.0) {
                return Err(SimError::Invalid("srs sr_ms must be >= 0".into()));
            }
            for r in self.instance.video.resolutions() {
                if !s.upsample_accuracy.contains_key(&r.label) {
                    return Err(SimError::Invalid(format!("srs accuracy missing for {}", r.label)));
                }
            }
            if let Some(d) = &s.downsample {
                if !self.instance.video.has_resolution(d) || !self.instance.prompt.has_resolution(d) {
                    return Err(SimError::Invalid(format!(
                        "srs downsample resolution {d} not declared by both encoders"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(SeroError::Io)?;
        let doc: ScenarioDocument = serde_json::from_str(&text).map_err(SeroError::Json)?;
        let s = Scenario {
            instance: doc.instance.resolve(path.parent().unwrap_or(std::path::Path::new(".")))?,
            untransformed_prompt_count: doc.untransformed_prompt_count,
            transform_accuracy_penalty: doc.transform_accuracy_penalty,
            mcs: doc.mcs,
            srs: doc.srs,
        };
        s.validate()?;
        Ok(s)
    }
}

fn check_table(t: &AccuracyTable, inst: &SeroInstance) -> Result<()> {
    for v in inst.video.resolutions() {
        for p in inst.prompt.resolutions() {
            if t.get(&v.label).and_then(|row| row.get(&p.label)).is_none() {
                return Err(SimError::Invalid(format!("mcs accuracy missing at ({}, {})", v.label, p.label)));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    EdgeCompute,
    Uplink,
    CloudCompute,
    SuperResolution,
    Downlink,
    Decoder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Video,
    Prompt,
    Joint,
}

/// One stage of one branch; times are relative to the query start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub stage: Stage,
    pub branch: Branch,
    pub start_ms: f64,
    pub end_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub policy: PolicyKind,
    pub seed: u64,
    /// Trace time at which the query starts.
    pub t0_ms: f64,
    pub video_res: String,
    pub prompt_res: String,
    pub planned_video_split: usize,
    pub planned_prompt_split: usize,
    pub prompt_count: usize,
    pub decoder_ms: f64,
    pub latency_ms: f64,
    pub accuracy: f64,
    pub budget_ms: f64,
    pub budget_met: bool,
    pub events: Vec<Event>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<SeroPlan>,
}

impl RunReport {
    /// Start of the decoder stage.
    pub fn decoder_start_ms(&self) -> f64 {
        self.events.iter().find(|e| e.stage == Stage::Decoder).map_or(0.0, |e| e.start_ms)
    }

    /// Finish time of the last stage of `branch`.
    pub fn branch_finish_ms(&self, branch: Branch) -> f64 {
        self.events.iter().filter(|e| e.branch == branch).map(|e| e.end_ms).fold(0.0, f64::max)
    }
}

/// Query start offset: uniform in the first quarter of a finite trace, kept
/// early enough that the budget window fits. Infinite traces start at 0.
pub fn start_offset(trace: &BandwidthTrace, budget_ms: f64, seed: u64) -> f64 {
    let dur = trace.duration_ms();
    if !dur.is_finite() {
        return trace.start_ms();
    }
    let hi = (0.25 * dur).min(dur - budget_ms).max(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "t0"));
    trace.start_ms() + if hi > 0.0 { rng.random_range(0.0..=hi) } else { 0.0 }
}

struct BranchRun {
    res: String,
    split: usize,
    latency: BranchLatency,
    sr_ms: f64,
}

fn branch_events(branch: Branch, run: &BranchRun, out: &mut Vec<Event>) -> f64 {
    let l = &run.latency;
    let mut t = 0.0;
    let stages = [
        (Stage::EdgeCompute, l.edge_ms),
        (Stage::Uplink, l.uplink_ms),
        (Stage::CloudCompute, l.cloud_ms - run.sr_ms),
        (Stage::SuperResolution, run.sr_ms),
        (Stage::Downlink, l.downlink_ms),
    ];
    for (stage, d) in stages {
        if d > 0.0 {
            out.push(Event { stage, branch, start_ms: t, end_ms: t + d });
            t += d;
        }
    }
    t
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    policy: PolicyKind,
    seed: u64,
    t0: f64,
    video: BranchRun,
    prompt: BranchRun,
    prompt_count: usize,
    decoder_per_prompt: f64,
    accuracy: f64,
    budget_ms: f64,
    plan: Option<SeroPlan>,
) -> RunReport {
    let mut events = Vec::new();
    let v_end = branch_events(Branch::Video, &video, &mut events);
    let p_end = branch_events(Branch::Prompt, &prompt, &mut events);
    let decoder_ms = decoder_per_prompt * prompt_count as f64;
    let barrier = v_end.max(p_end);
    events.push(Event {
        stage: Stage::Decoder,
        branch: Branch::Joint,
        start_ms: barrier,
        end_ms: barrier + decoder_ms,
    });
    events.sort_by(|a, b| a.start_ms.total_cmp(&b.start_ms).then(a.branch.cmp(&b.branch)).then(a.stage.cmp(&b.stage)));
    let latency_ms = barrier + decoder_ms;
    RunReport {
        policy,
        seed,
        t0_ms: t0,
        video_res: video.res,
        prompt_res: prompt.res,
        planned_video_split: video.split,
        planned_prompt_split: prompt.split,
        prompt_count,
        decoder_ms,
        latency_ms,
        accuracy,
        budget_ms,
        budget_met: latency_ms <= budget_ms,
        events,
        plan,
    }
}

fn by_pixels_desc(g: &LayerGraph) -> Vec<Resolution> {
    let mut r = g.resolutions().to_vec();
    r.sort_by_key(|x| std::cmp::Reverse(x.pixels));
    r
}

fn edge_only(g: &LayerGraph, res: &str, factor: f64) -> BranchRun {
    BranchRun {
        res: res.to_string(),
        split: g.layer_count(),
        latency: BranchLatency {
            edge_ms: g.total_edge_ms(res) * factor,
            total_ms: g.total_edge_ms(res) * factor,
            ..Default::default()
        },
        sr_ms: 0.0,
    }
}

fn cloud_only(g: &LayerGraph, res: &str, ret: u64, trace: &BandwidthTrace, t0: f64, sr_ms: f64) -> Result<BranchRun> {
    let p = Partition::all_cloud(g, res, trace.rate_at(t0)?).map_err(SeroError::from)?;
    let mut latency = match branch_latency_on_trace(g, &p, ret, trace, t0) {
        Ok(l) => l,
        Err(SeroError::Net(NetError::TraceExhausted { .. } | NetError::TraceGap { .. })) => {
            return Err(SimError::Invalid(format!("trace too short to finish the {res} transfer")));
        }
        Err(e) => return Err(e.into()),
    };
    if sr_ms > 0.0 {
        // super-resolution delays the download by sr_ms
        let up_end = t0 + latency.uplink_ms;
        let down = crate::netsim::transfer_over_trace(ret, trace, up_end + latency.cloud_ms + sr_ms)?;
        latency = BranchLatency {
            cloud_ms: latency.cloud_ms + sr_ms,
            downlink_ms: down.duration_ms,
            total_ms: latency.uplink_ms + latency.cloud_ms + sr_ms + down.duration_ms,
            ..latency
        };
    }
    Ok(BranchRun { res: res.to_string(), split: 0, latency, sr_ms })
}

fn samedge(policy: PolicyKind, sc: &Scenario, trace: &BandwidthTrace, seed: u64, t0: f64) -> Result<RunReport> {
    let (count, penalty) = match policy {
        PolicyKind::Samedge => (sc.instance.prompt_count, sc.transform_accuracy_penalty),
        _ => (sc.untransformed_prompt_count, 0.0),
    };
    let inst = SeroInstance { prompt_count: count, ..sc.instance.clone() };
    let plan = match sero::plan_under_trace(&inst, trace, t0) {
        Ok(p) => p,
        Err(SeroError::Infeasible { budget_ms, min_latency_ms }) => {
            return Err(SimError::Infeasible { policy, budget_ms, min_latency_ms });
        }
        Err(e) => return Err(e.into()),
    };
    let run = |b: &sero::BranchPlan, g: &LayerGraph| BranchRun {
        res: b.resolution.clone(),
        split: b.partition.edge_layer_count(g),
        latency: b.latency,
        sr_ms: 0.0,
    };
    let video = run(&plan.video, &inst.video);
    let prompt = run(&plan.prompt, &inst.prompt);
    let accuracy = (plan.predicted_accuracy - penalty).max(0.0);
    Ok(assemble(
        policy,
        seed,
        t0,
        video,
        prompt,
        count,
        inst.decoder_ms_per_prompt,
        accuracy,
        inst.latency_budget_ms,
        Some(plan),
    ))
}

fn mcs(sc: &Scenario, seed: u64) -> Result<RunReport> {
    let m = sc.mcs.as_ref().ok_or(SimError::MissingParameters(PolicyKind::Mcs))?;
    let inst = &sc.instance;
    let count = sc.untransformed_prompt_count;
    let decoder = inst.decoder_ms_per_prompt * count as f64;
    let mut best: Option<(f64, f64, String, String)> = None;
    let mut fastest = f64::INFINITY;
    for v in inst.video.resolutions() {
        for p in inst.prompt.resolutions() {
            let total = (inst.video.total_edge_ms(&v.label).max(inst.prompt.total_edge_ms(&p.label)))
                * m.compute_factor
                + decoder;
            fastest = fastest.min(total);
            if total > inst.latency_budget_ms {
                continue;
            }
            let acc = m.accuracy[&v.label][&p.label];
            if best.as_ref().is_none_or(|b| acc > b.0 || (acc == b.0 && total < b.1)) {
                best = Some((acc, total, v.label.clone(), p.label.clone()));
            }
        }
    }
    let Some((acc, _, v, p)) = best else {
        return Err(SimError::Infeasible {
            policy: PolicyKind::Mcs,
            budget_ms: inst.latency_budget_ms,
            min_latency_ms: fastest,
        });
    };
    let video = edge_only(&inst.video, &v, m.compute_factor);
    let prompt = edge_only(&inst.prompt, &p, m.compute_factor);
    Ok(assemble(
        PolicyKind::Mcs,
        seed,
        0.0,
        video,
        prompt,
        count,
        inst.decoder_ms_per_prompt,
        acc,
        inst.latency_budget_ms,
        None,
    ))
}

/// Offloads everything, stepping down through resolutions (both encoders
/// together) until the budget holds; the lowest level is used regardless.
fn cloud_policy(policy: PolicyKind, sc: &Scenario, trace: &BandwidthTrace, seed: u64, t0: f64) -> Result<RunReport> {
    let inst = &sc.instance;
    let count = sc.untransformed_prompt_count;
    let vres = by_pixels_desc(&inst.video);
    let pres = by_pixels_desc(&inst.prompt);
    let (levels, sr_ms): (Vec<usize>, f64) = match policy {
        PolicyKind::Srs => {
            let s = sc.srs.as_ref().ok_or(SimError::MissingParameters(PolicyKind::Srs))?;
            let levels = match &s.downsample {
                Some(d) => vec![vres
                    .iter()
                    .position(|r| &r.label == d)
                    .ok_or_else(|| SimError::Invalid(format!("unknown resolution {d}")))?],
                None => (0..vres.len()).collect(),
            };
            (levels, s.sr_ms)
        }
        _ => ((0..vres.len()).collect(), 0.0),
    };
    let mut last = None;
    for &k in &levels {
        let v = &vres[k].label;
        let p = &pres[k.min(pres.len() - 1)].label;
        let video = cloud_only(&inst.video, v, inst.video_return_bytes[v], trace, t0, sr_ms)?;
        let prompt = cloud_only(&inst.prompt, p, inst.prompt_return_bytes[p], trace, t0, 0.0)?;
        let accuracy = match policy {
            PolicyKind::Srs => sc.srs.as_ref().expect("checked above").upsample_accuracy[v],
            _ => inst.accuracy[v][p],
        };
        let report = assemble(
            policy,
            seed,
            t0,
            video,
            prompt,
            count,
            inst.decoder_ms_per_prompt,
            accuracy,
            inst.latency_budget_ms,
            None,
        );
        if report.budget_met {
            return Ok(report);
        }
        last = Some(report);
    }
    Ok(last.expect("at least one resolution level"))
}

/// Replays one query of `policy` on the scenario over `trace`. The seed
/// picks where in the trace the query starts.
pub fn simulate(policy: PolicyKind, sc: &Scenario, trace: &BandwidthTrace, seed: u64) -> Result<RunReport> {
    sc.validate()?;
    if policy == PolicyKind::Mcs {
        return mcs(sc, seed);
    }
    let t0 = start_offset(trace, sc.instance.latency_budget_ms, seed);
    match policy {
        PolicyKind::Samedge | PolicyKind::SamedgeWot => samedge(policy, sc, trace, seed, t0),
        _ => cloud_policy(policy, sc, trace, seed, t0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub trace_duration_ms: f64,
    pub trace: TraceSynthOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { trace_duration_ms: 120_000.0, trace: TraceSynthOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub policy: PolicyKind,
    pub class: NetworkClass,
    pub seed: u64,
    pub latency_ms: f64,
    pub accuracy: f64,
    pub planned_video_split: usize,
    pub planned_prompt_split: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub policy: PolicyKind,
    pub class: NetworkClass,
    pub runs: usize,
    pub mean_latency_ms: f64,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Trace used for `class` under `seed` in sweeps.
pub fn sweep_trace(class: NetworkClass, seed: u64, opts: &SweepOptions) -> Result<BandwidthTrace> {
    let sub = derive_seed(seed, &format!("trace/{}", class.name()));
    Ok(synth_class_trace(class, opts.trace_duration_ms, sub, opts.trace)?)
}

/// Runs every (policy, class, seed) cell; rows come out in that key order.
pub fn sweep(
    policies: &[PolicyKind],
    sc: &Scenario,
    classes: &[NetworkClass],
    seeds: &[u64],
    opts: &SweepOptions,
) -> Result<SweepTable> {
    if policies.is_empty() || classes.is_empty() || seeds.is_empty() {
        return Err(SimError::EmptySweep);
    }
    let mut rows = Vec::new();
    for &policy in policies {
        for &class in classes {
            for &seed in seeds {
                let trace = sweep_trace(class, seed, opts)?;
                let r = simulate(policy, sc, &trace, seed)?;
                rows.push(SweepRow {
                    policy,
                    class,
                    seed,
                    latency_ms: r.latency_ms,
                    accuracy: r.accuracy,
                    planned_video_split: r.planned_video_split,
                    planned_prompt_split: r.planned_prompt_split,
                });
            }
        }
    }
    Ok(SweepTable { rows })
}

impl SweepTable {
    /// Means per (policy, class), in first-appearance order.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut out: Vec<AggregateRow> = Vec::new();
        for r in &self.rows {
            match out.iter_mut().find(|a| a.policy == r.policy && a.class == r.class) {
                Some(a) => {
                    a.runs += 1;
                    a.mean_latency_ms += r.latency_ms;
                    a.mean_accuracy += r.accuracy;
                }
                None => out.push(AggregateRow {
                    policy: r.policy,
                    class: r.class,
                    runs: 1,
                    mean_latency_ms: r.latency_ms,
                    mean_accuracy: r.accuracy,
                }),
            }
        }
        for a in &mut out {
            a.mean_latency_ms /= a.runs as f64;
            a.mean_accuracy /= a.runs as f64;
        }
        out
    }

    /// Max minus min of the mean accuracy of `policy` across classes.
    pub fn accuracy_spread(&self, policy: PolicyKind) -> Option<f64> {
        let accs: Vec<f64> =
            self.aggregate().into_iter().filter(|a| a.policy == policy).map(|a| a.mean_accuracy).collect();
        if accs.is_empty() {
            return None;
        }
        let hi = accs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = accs.iter().copied().fold(f64::INFINITY, f64::min);
        Some(hi - lo)
    }

    /// CSV report; each `comments` line is written first, prefixed by `# `.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record([
            "policy",
            "class",
            "seed",
            "latency_ms",
            "accuracy",
            "planned_video_split",
            "planned_prompt_split",
        ])?;
        for r in &self.rows {
            csv.write_record([
                r.policy.name().to_string(),
                r.class.name().to_string(),
                r.seed.to_string(),
                format!("{:.3}", r.latency_ms),
                format!("{:.4}", r.accuracy),
                r.planned_video_split.to_string(),
                r.planned_prompt_split.to_string(),
            ])?;
        }
        csv.flush()?;
        Ok(())
    }

    /// Line chart of mean accuracy per class, one series per policy.
    pub fn svg_chart(&self) -> String {
        let agg = self.aggregate();
        let mut classes: Vec<NetworkClass> = Vec::new();
        let mut policies: Vec<PolicyKind> = Vec::new();
        for a in &agg {
            if !classes.contains(&a.class) {
                classes.push(a.class);
            }
            if !policies.contains(&a.policy) {
                policies.push(a.policy);
            }
        }
        let (w, h, m) = (640.0, 400.0, 50.0);
        let x =
            |i: usize| m + (w - 2.0 * m) * if classes.len() > 1 { i as f64 / (classes.len() - 1) as f64 } else { 0.5 };
        let y = |acc: f64| h - m - (h - 2.0 * m) * acc.clamp(0.0, 1.0);
        let colors = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e"];
        let mut s = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n");
        s += &format!("<line x1=\"{m}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", h - m, w - m, h - m);
        s += &format!("<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{}\" stroke=\"black\"/>\n", h - m);
        for tick in 0..=5 {
            let a = tick as f64 / 5.0;
            s += &format!("<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{a:.1}</text>\n", m - 6.0, y(a) + 4.0);
        }
        for (i, c) in classes.iter().enumerate() {
            s +=
                &format!("<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x(i), h - m + 18.0, c.name());
        }
        for (k, p) in policies.iter().enumerate() {
            let color = colors[k % colors.len()];
            let pts: Vec<String> = classes
                .iter()
                .enumerate()
                .filter_map(|(i, c)| {
                    agg.iter()
                        .find(|a| a.policy == *p && a.class == *c)
                        .map(|a| format!("{:.1},{:.1}", x(i), y(a.mean_accuracy)))
                })
                .collect();
            s += &format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
                pts.join(" ")
            );
            s += &format!(
                "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>\n",
                w - m + 4.0,
                m + 16.0 * k as f64,
                p.name()
            );
        }
        s += "<text x=\"12\" y=\"24\">accuracy</text>\n</svg>\n";
        s
    }
}
