use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use splitsam_core::graph::{load_profile_file, synth_document, SynthOptions, SynthShape};
use splitsam_core::netsim::{BandwidthTrace, NetworkClass, TraceSynthOptions};
use splitsam_core::partition::{exhaustive_min_cut, min_cut_partition, EXHAUSTIVE_LIMIT};
use splitsam_core::prompt::{apply_strategy, offline_profile, online_select, SamplerConfig, TaskFixture};
use splitsam_core::reference;
use splitsam_core::sero::{self, InstanceDocument};
use splitsam_core::sim::{self, PolicyKind, Scenario, ScenarioDocument, SweepOptions};

use crate::error::CliError;
use crate::{
    PartitionArgs, PlanArgs, ScenarioArgs, SimulateArgs, SweepArgs, SynthCommand, SynthFixturesArgs, SynthProfileArgs,
    SynthTaskArgs, SynthTraceArgs, TraceArgs, TransformArgs, FIXTURES_ENV,
};

type Result<T> = std::result::Result<T, CliError>;

const TOOL: &str = "splitsam";
const VERSION: &str = env!("CARGO_PKG_VERSION");

fn fixtures_dir() -> PathBuf {
    std::env::var_os(FIXTURES_ENV).map_or_else(|| PathBuf::from("fixtures"), PathBuf::from)
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `{tool, version, command, config, result}`.
fn emit(out: Option<&Path>, command: &str, config: Value, result: impl Serialize) -> Result<()> {
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "config": config,
        "result": result,
    });
    write_out(out, &to_json(&doc)?)
}

/// Adds a `generator` record to a document that will be read back later.
fn stamp(doc: impl Serialize, command: &str, config: Value) -> Result<Value> {
    let mut v = serde_json::to_value(doc).map_err(|e| CliError::Internal(e.to_string()))?;
    if let Value::Object(m) = &mut v {
        m.insert("generator".into(), json!({ "tool": TOOL, "version": VERSION, "command": command, "config": config }));
    }
    Ok(v)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn absolute(p: &Path) -> Result<PathBuf> {
    if p.is_absolute() {
        return Ok(p.to_path_buf());
    }
    Ok(std::env::current_dir().map_err(|e| CliError::Config(e.to_string()))?.join(p))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && !v.is_nan() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be > 0, got {v}")))
    }
}

fn parse_class(s: &str) -> Result<NetworkClass> {
    Ok(s.parse::<NetworkClass>()?)
}

fn parse_policy(s: &str) -> Result<PolicyKind> {
    Ok(s.parse::<PolicyKind>()?)
}

fn load_scenario(a: &ScenarioArgs) -> Result<(Scenario, PathBuf)> {
    let path = a.scenario.clone().unwrap_or_else(|| fixtures_dir().join("scenario.json"));
    let mut doc: ScenarioDocument = serde_json::from_str(&read(&path)?)?;
    if let Some(p) = &a.profile {
        doc.instance.video_profile = absolute(p)?;
    }
    if let Some(p) = &a.prompt_profile {
        doc.instance.prompt_profile = absolute(p)?;
    }
    if let Some(b) = a.budget_ms {
        doc.instance.latency_budget_ms = positive("budget", b)?;
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let sc = Scenario {
        instance: doc.instance.resolve(base)?,
        untransformed_prompt_count: doc.untransformed_prompt_count,
        transform_accuracy_penalty: doc.transform_accuracy_penalty,
        mcs: doc.mcs,
        srs: doc.srs,
    };
    sc.validate()?;
    Ok((sc, path))
}

fn load_trace(t: &TraceArgs, seed: u64) -> Result<Option<BandwidthTrace>> {
    if let Some(p) = &t.trace {
        return Ok(Some(BandwidthTrace::from_csv_file(p)?));
    }
    let Some(c) = &t.class else {
        return Ok(None);
    };
    let opts = SweepOptions {
        trace_duration_ms: positive("trace duration", t.duration_ms)?,
        trace: TraceSynthOptions { sigma: t.sigma, ..Default::default() },
    };
    Ok(Some(sim::sweep_trace(parse_class(c)?, seed, &opts)?))
}

pub fn partition(a: PartitionArgs) -> Result<()> {
    let g = load_profile_file(&a.profile)?;
    let mbps = match (a.bandwidth.bandwidth_mbps, &a.bandwidth.class) {
        (Some(b), _) => positive("bandwidth", b)?,
        (None, Some(c)) => parse_class(c)?.mean_mbps(),
        (None, None) => return Err(CliError::Config("give --bandwidth-mbps or --class".into())),
    };
    let res = a.resolution.clone().unwrap_or_else(|| g.resolutions()[0].label.clone());
    if !g.has_resolution(&res) {
        return Err(CliError::Config(format!("profile declares no resolution {res}")));
    }
    let p = min_cut_partition(&g, &res, mbps)?;
    let mut brute = None;
    if a.brute_force_check {
        if g.layer_count() > EXHAUSTIVE_LIMIT {
            return Err(CliError::Config(format!("--brute-force-check supports at most {EXHAUSTIVE_LIMIT} layers")));
        }
        let b = exhaustive_min_cut(&g, &res, mbps)?;
        if b != p.objective_us {
            return Err(CliError::Internal(format!(
                "min-cut objective {} us differs from exhaustive {} us",
                p.objective_us, b
            )));
        }
        brute = Some(b);
    }
    let config = json!({ "args": a, "resolved": { "bandwidth_mbps": mbps, "resolution": res } });
    let result = json!({
        "partition": p,
        "edge_layers": p.edge_layer_count(&g),
        "layers": g.layer_count(),
        "brute_force_objective_us": brute,
    });
    emit(a.out.as_deref(), "partition", config, result)
}

pub fn plan(a: PlanArgs) -> Result<()> {
    let (sc, path) = load_scenario(&a.scenario)?;
    let mut inst = sc.instance;
    if let Some(b) = a.bandwidth_mbps {
        inst.bandwidth_mbps = positive("bandwidth", b)?;
    }
    let trace = load_trace(&a.trace, a.seed)?;
    let (plan, t0) = match &trace {
        Some(t) => (sero::plan_under_trace(&inst, t, t.start_ms())?, Some(t.start_ms())),
        None => (sero::plan(&inst)?, None),
    };
    let config = json!({
        "args": a,
        "resolved": {
            "scenario": path,
            "budget_ms": inst.latency_budget_ms,
            "bandwidth_mbps": if trace.is_some() { None } else { Some(inst.bandwidth_mbps) },
            "trace_mean_mbps": trace.as_ref().map(|t| t.mean_mbps()),
            "t0_ms": t0,
        },
    });
    emit(a.out.as_deref(), "plan", config, plan)
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let (sc, path) = load_scenario(&a.scenario)?;
    let policy = parse_policy(&a.policy)?;
    let trace = match load_trace(&a.trace, a.seed)? {
        Some(t) => t,
        None => BandwidthTrace::constant(sc.instance.bandwidth_mbps)?,
    };
    let report = sim::simulate(policy, &sc, &trace, a.seed)?;
    let config = json!({
        "args": a,
        "resolved": { "scenario": path, "budget_ms": sc.instance.latency_budget_ms, "trace_mean_mbps": trace.mean_mbps() },
    });
    emit(a.out.as_deref(), "simulate", config, report)
}

pub fn sweep(a: SweepArgs) -> Result<()> {
    let (sc, path) = load_scenario(&a.scenario)?;
    let policies = if a.policy.is_empty() {
        PolicyKind::ALL.to_vec()
    } else {
        a.policy.iter().map(|p| parse_policy(p)).collect::<Result<_>>()?
    };
    let classes = if a.class.is_empty() {
        NetworkClass::ALL.to_vec()
    } else {
        a.class.iter().map(|c| parse_class(c)).collect::<Result<_>>()?
    };
    let opts = SweepOptions {
        trace_duration_ms: positive("trace duration", a.duration_ms)?,
        trace: TraceSynthOptions { sigma: a.sigma, ..Default::default() },
    };
    let table = sim::sweep(&policies, &sc, &classes, &a.seed, &opts)?;
    let config = json!({ "args": a, "resolved": { "scenario": path, "budget_ms": sc.instance.latency_budget_ms } });
    let comments = vec![format!("{TOOL} {VERSION} sweep"), format!("config: {config}")];
    let mut csv = Vec::new();
    table.write_csv(&mut csv, &comments)?;
    let csv = String::from_utf8(csv).map_err(|e| CliError::Internal(e.to_string()))?;
    write_out(a.out.as_deref(), &csv)?;
    if let Some(svg) = &a.svg {
        write_out(Some(svg), &table.svg_chart())?;
    }
    if a.out.is_some() {
        println!("{:<12} {:<8} {:>5} {:>12} {:>9}", "policy", "class", "runs", "latency_ms", "accuracy");
        for r in table.aggregate() {
            println!(
                "{:<12} {:<8} {:>5} {:>12.1} {:>9.4}",
                r.policy.name(),
                r.class.name(),
                r.runs,
                r.mean_latency_ms,
                r.mean_accuracy
            );
        }
    }
    Ok(())
}

pub fn transform(a: TransformArgs) -> Result<()> {
    let path = a.fixture.clone().unwrap_or_else(|| fixtures_dir().join("prompts.json"));
    let fixture: TaskFixture = serde_json::from_str(&read(&path)?)?;
    fixture.validate()?;
    positive("budget", a.budget_ms)?;
    let sampler = SamplerConfig { allow_combine: !a.no_combine, allow_convert: !a.no_convert };
    let prof = offline_profile(&fixture, a.iterations, a.seed, sampler)?;
    let id = online_select(&prof.profile, a.budget_ms)?;
    let strategy = &prof.strategies[&id];
    let prompts = apply_strategy(&fixture.prompts, strategy, fixture.pad)?;
    let config = json!({ "args": a, "resolved": { "fixture": path, "pad": fixture.pad, "decoder": fixture.decoder } });
    let result = json!({
        "selected": id,
        "entry": prof.profile.get(&id),
        "strategy": strategy,
        "prompts": prompts,
        "profile": prof.profile,
    });
    emit(a.out.as_deref(), "transform", config, result)
}

pub fn synth(c: SynthCommand) -> Result<()> {
    match c {
        SynthCommand::Profile(a) => synth_profile(a),
        SynthCommand::Trace(a) => synth_trace(a),
        SynthCommand::Task(a) => synth_task(a),
        SynthCommand::Fixtures(a) => synth_fixtures(a),
    }
}

fn synth_profile(a: SynthProfileArgs) -> Result<()> {
    let shape: SynthShape = a.shape.parse()?;
    let opts = SynthOptions { speedup: a.speedup, ..Default::default() };
    let doc = synth_document(a.layers, a.seed, shape, &opts)?;
    let config = serde_json::to_value(&a)?;
    write_out(a.out.as_deref(), &to_json(&stamp(doc, "synth profile", config)?)?)
}

fn synth_trace(a: SynthTraceArgs) -> Result<()> {
    let class = parse_class(&a.class)?;
    let opts = TraceSynthOptions { sigma: a.sigma, step_ms: a.step_ms };
    let trace = splitsam_core::netsim::synth_class_trace(class, a.duration_ms, a.seed, opts)?;
    let mut buf = format!("# {TOOL} {VERSION} synth trace\n# config: {}\n", serde_json::to_string(&a)?).into_bytes();
    trace.write_csv(&mut buf)?;
    write_out(a.out.as_deref(), &String::from_utf8(buf).map_err(|e| CliError::Internal(e.to_string()))?)
}

fn synth_task(a: SynthTaskArgs) -> Result<()> {
    let f = TaskFixture::synthetic(a.grid, a.points, a.seed)?;
    let config = serde_json::to_value(&a)?;
    write_out(a.out.as_deref(), &to_json(&stamp(f, "synth task", config)?)?)
}

fn synth_fixtures(a: SynthFixturesArgs) -> Result<()> {
    let dir = &a.dir;
    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let config = serde_json::to_value(&a)?;
    let cmd = "synth fixtures";
    let file = |name: &str| Some(dir.join(name));
    write_out(
        file("video.json").as_deref(),
        &to_json(&stamp(reference::video_profile_document(), cmd, config.clone())?)?,
    )?;
    write_out(
        file("prompt.json").as_deref(),
        &to_json(&stamp(reference::prompt_profile_document(), cmd, config.clone())?)?,
    )?;
    let sc = reference::scenario();
    let doc = ScenarioDocument {
        instance: InstanceDocument::from_instance(&sc.instance, "video.json".into(), "prompt.json".into()),
        untransformed_prompt_count: sc.untransformed_prompt_count,
        transform_accuracy_penalty: sc.transform_accuracy_penalty,
        mcs: sc.mcs,
        srs: sc.srs,
    };
    write_out(file("scenario.json").as_deref(), &to_json(&stamp(doc, cmd, config.clone())?)?)?;
    write_out(file("prompts.json").as_deref(), &to_json(&stamp(reference::prompt_fixture(), cmd, config)?)?)?;
    Ok(())
}
