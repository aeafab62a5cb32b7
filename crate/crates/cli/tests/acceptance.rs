#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use splitsam_core::graph::{LayerGraph, ProfileDocument};
use splitsam_core::maxflow::max_flow;
use splitsam_core::netsim::{transmission_time, BandwidthTrace, NetworkClass, TraceSynthOptions};
use splitsam_core::partition::{build_flow_network, min_cut_partition, Partition};
use splitsam_core::prompt::EmpiricalJoint;
use splitsam_core::reference;
use splitsam_core::sero::{branch_latency, plan, SeroError, SeroInstance, SeroPlan};
use splitsam_core::sim::{simulate, sweep, PolicyKind, SweepOptions};

use common::{brute_force_min_cut, brute_force_plan, random_dag, random_instance, rng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn closed(g: &LayerGraph, p: &Partition) -> bool {
    let f = p.edge_flags(g);
    f[g.entry()] && !f[g.exit()] && g.edges().iter().all(|&(u, v)| !f[v] || f[u])
}

fn random_suite() -> Vec<(ProfileDocument, LayerGraph)> {
    let mut r = rng(2024);
    (0..100)
        .map(|case| {
            let doc = random_dag(&mut r, 1 + case % 12, &["r0"]);
            let g = LayerGraph::from_document(doc.clone()).unwrap();
            (doc, g)
        })
        .collect()
}

fn min_cut_exactness() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    for (doc, g) in random_suite() {
        let p = min_cut_partition(&g, "r0", 1.0).map_err(|e| e.to_string())?;
        if p.objective_ms != brute_force_min_cut(&doc, "r0", 1.0) {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(mismatches == 0, format!("{mismatches} mismatches"))?;
    check(secs < 10.0, format!("took {secs:.2} s"))?;
    Ok(format!("100 DAGs, 0 mismatches, {secs:.2} s"))
}

fn duality_and_closure() -> Outcome {
    for (i, (_, g)) in random_suite().into_iter().enumerate() {
        let p = min_cut_partition(&g, "r0", 1.0).map_err(|e| e.to_string())?;
        let net = build_flow_network(&g, "r0", 1.0).map_err(|e| e.to_string())?;
        let flow = max_flow(&net.network).map_err(|e| e.to_string())?;
        let cut: i64 = p.cut_arcs.iter().map(|c| c.capacity_us).sum();
        check(
            flow.value == p.objective_us && cut == p.objective_us,
            format!("case {i}: flow {} cut {cut} objective {}", flow.value, p.objective_us),
        )?;
        check(closed(&g, &p), format!("case {i}: edge side not ancestor-closed"))?;
    }
    Ok("flow = cut = objective and closure on 100 DAGs".into())
}

fn latency_anchors() -> Outcome {
    let up = transmission_time(reference::FRAME_BYTES_1080P, 20.0).map_err(|e| e.to_string())?;
    let down = transmission_time(reference::EMBEDDING_BYTES, 20.0).map_err(|e| e.to_string())?;
    let inst = reference::instance();
    let p = Partition::all_cloud(&inst.video, "1080p", 20.0).map_err(|e| e.to_string())?;
    let l = branch_latency(&inst.video, &p, 20.0, reference::EMBEDDING_BYTES).map_err(|e| e.to_string())?;
    check((up - 3700.0).abs() < 1.0 && (l.uplink_ms - 3700.0).abs() < 1.0, format!("uplink {up} / {}", l.uplink_ms))?;
    check(
        (down - 1200.0).abs() < 1.0 && (l.downlink_ms - 1200.0).abs() < 1.0,
        format!("downlink {down} / {}", l.downlink_ms),
    )?;
    check((l.uplink_ms + l.downlink_ms - 4900.0).abs() < 1.0, format!("round trip {}", l.uplink_ms + l.downlink_ms))?;
    Ok(format!("uplink {up} ms, downlink {down} ms, round trip {} ms", up + down))
}

fn mutual_information() -> Outcome {
    let mi = |c: Vec<Vec<u64>>| EmpiricalJoint::from_counts(c).map_err(|e| e.to_string());
    let mixed = mi(vec![vec![4, 1], vec![1, 4]])?.mutual_information();
    check((mixed - 0.27807).abs() < 1e-5, format!("mixed joint gave {mixed}"))?;
    check((mixed - 0.278_071_905_112_637_6).abs() < 1e-6, format!("mixed joint gave {mixed}"))?;
    for (a, b) in [(vec![1u64, 2, 3], vec![4u64, 5]), (vec![7, 1], vec![2, 2, 9, 1])] {
        let j = mi(a.iter().map(|x| b.iter().map(|y| x * y).collect()).collect())?;
        check(j.mutual_information().abs() < 1e-6, format!("product joint gave {}", j.mutual_information()))?;
    }
    for rows in [vec![3u64, 5, 2], vec![1, 1, 1, 1], vec![9, 4]] {
        let n = rows.len();
        let j =
            mi(rows.iter().enumerate().map(|(i, &k)| (0..n).map(|c| if c == i { k } else { 0 }).collect()).collect())?;
        check((j.mutual_information() - j.entropy_x()).abs() < 1e-6, "deterministic joint differs from H(X)")?;
    }
    Ok(format!("0.27807 joint gives {mixed:.8} bits; product and deterministic joints hold"))
}

fn prompt_ablation() -> Outcome {
    let f = reference::prompt_fixture();
    let r = f.decoder.reduction(reference::RAW_PROMPTS, reference::TRANSFORMED_PROMPTS);
    check((r - 0.68).abs() <= 0.005, format!("reduction {r}"))?;
    let sc = reference::scenario();
    let mut runs = 0;
    for seed in 0..4 {
        let mut traces = vec![BandwidthTrace::constant(2.0).unwrap(), BandwidthTrace::constant(200.0).unwrap()];
        for class in NetworkClass::ALL {
            traces.push(
                splitsam_core::sim::sweep_trace(class, seed, &SweepOptions::default()).map_err(|e| e.to_string())?,
            );
        }
        for t in &traces {
            let a = simulate(PolicyKind::Samedge, &sc, t, seed).map_err(|e| e.to_string())?;
            let b = simulate(PolicyKind::SamedgeWot, &sc, t, seed).map_err(|e| e.to_string())?;
            check(b.decoder_ms >= a.decoder_ms, format!("wot decoder {} < {}", b.decoder_ms, a.decoder_ms))?;
            runs += 1;
        }
    }
    Ok(format!("reduction {:.2}%, wot decoder never cheaper over {runs} runs", r * 100.0))
}

fn accuracy(r: Result<SeroPlan, SeroError>) -> Result<Option<f64>, String> {
    match r {
        Ok(p) => Ok(Some(p.predicted_accuracy)),
        Err(SeroError::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn sero_oracle() -> Outcome {
    let mut feasible = 0;
    for seed in 0..30 {
        let ri = random_instance(seed);
        let got = accuracy(plan(&ri.instance))?;
        feasible += got.is_some() as usize;
        check(got == brute_force_plan(&ri), format!("instance {seed}: plan {got:?}"))?;
    }
    Ok(format!("30 instances, 0 mismatches, {feasible} feasible"))
}

fn monotone(inst: &SeroInstance, vary: impl Fn(&SeroInstance, usize) -> SeroInstance) -> Result<(), String> {
    let mut prev = None;
    for i in 0..10 {
        let a = accuracy(plan(&vary(inst, i)))?;
        check(a >= prev, format!("point {i}: {a:?} after {prev:?}"))?;
        prev = a;
    }
    Ok(())
}

fn monotonicity() -> Outcome {
    let mut instances = vec![reference::instance().with_budget(2500.0)];
    instances.extend((0..10).map(|s| random_instance(s).instance));
    for inst in &instances {
        let b0 = inst.bandwidth_mbps;
        monotone(inst, |x, i| x.with_bandwidth(b0 * 0.25 * 2f64.powi(i as i32)))?;
        let t0 = inst.latency_budget_ms;
        monotone(inst, |x, i| x.with_budget(t0 * (0.3 + 0.2 * i as f64)))?;
    }
    let mut graphs: Vec<LayerGraph> = random_suite().into_iter().map(|(_, g)| g).take(20).collect();
    graphs.push(reference::instance().video);
    for g in &graphs {
        let res = g.resolutions()[0].label.clone();
        let mut prev = i64::MAX;
        for i in 0..10 {
            let p = min_cut_partition(g, &res, 0.5 * 2f64.powi(i)).map_err(|e| e.to_string())?;
            check(p.objective_us <= prev, "partition objective increased with bandwidth")?;
            prev = p.objective_us;
        }
    }
    Ok(format!("{} planner instances x 2 sweeps, {} graphs", instances.len(), graphs.len()))
}

fn sweep_trends() -> Outcome {
    let sc = reference::scenario();
    let t = sweep(&PolicyKind::ALL, &sc, &NetworkClass::ALL, &[1, 2, 3], &SweepOptions::default())
        .map_err(|e| e.to_string())?;
    let spread = |p| t.accuracy_spread(p).unwrap();
    let (v, s, m) = (spread(PolicyKind::Vanilla), spread(PolicyKind::Samedge), spread(PolicyKind::Mcs));
    check(v >= 0.4, format!("vanilla spread {v}"))?;
    check(s <= 0.12, format!("samedge spread {s}"))?;
    check(m == 0.0, format!("mcs spread {m}"))?;
    let flat = SweepOptions { trace: TraceSynthOptions { sigma: 0.0, ..Default::default() }, ..Default::default() };
    let a = sweep(&PolicyKind::ALL, &sc, &NetworkClass::ALL, &[1], &flat).map_err(|e| e.to_string())?;
    let b = sweep(&PolicyKind::ALL, &sc, &NetworkClass::ALL, &[1], &flat).map_err(|e| e.to_string())?;
    let c = sweep(&PolicyKind::ALL, &sc, &NetworkClass::ALL, &[7], &flat).map_err(|e| e.to_string())?;
    check(a == b, "sigma 0 sweep not reproducible")?;
    check(a.aggregate() == c.aggregate(), "sigma 0 sweep depends on the seed")?;
    Ok(format!("spreads vanilla {v:.3}, samedge {s:.3}, mcs {m:.3}; sigma 0 deterministic"))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_splitsam"))
        .env_remove("SPLITSAM_FIXTURES")
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let d = dir.path();
    let p = |name: &str| d.join(name).to_str().unwrap().to_string();
    run_cli(&["synth", "fixtures", "--dir", &p("fx")])?;
    let sc = p("fx/scenario.json");
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("fixtures", vec!["synth".into(), "fixtures".into(), "--dir".into()]),
        (
            "profile.json",
            vec![
                "synth".into(),
                "profile".into(),
                "--layers".into(),
                "10".into(),
                "--shape".into(),
                "vit-like".into(),
                "--out".into(),
            ],
        ),
        (
            "trace.csv",
            vec![
                "synth".into(),
                "trace".into(),
                "--class".into(),
                "4g-lte".into(),
                "--seed".into(),
                "3".into(),
                "--out".into(),
            ],
        ),
        ("task.json", vec!["synth".into(), "task".into(), "--seed".into(), "5".into(), "--out".into()]),
        (
            "partition.json",
            vec![
                "partition".into(),
                "--profile".into(),
                p("fx/video.json"),
                "--class".into(),
                "3g".into(),
                "--out".into(),
            ],
        ),
        (
            "plan.json",
            vec![
                "plan".into(),
                "--scenario".into(),
                sc.clone(),
                "--class".into(),
                "5g".into(),
                "--seed".into(),
                "2".into(),
                "--out".into(),
            ],
        ),
        (
            "simulate.json",
            vec![
                "simulate".into(),
                "--scenario".into(),
                sc.clone(),
                "--policy".into(),
                "vanilla".into(),
                "--class".into(),
                "802.11g".into(),
                "--out".into(),
            ],
        ),
        (
            "sweep.csv",
            vec!["sweep".into(), "--scenario".into(), sc.clone(), "--seed".into(), "1,2".into(), "--out".into()],
        ),
        (
            "transform.json",
            vec![
                "transform".into(),
                "--fixture".into(),
                p("fx/prompts.json"),
                "--budget-ms".into(),
                "120".into(),
                "--out".into(),
            ],
        ),
    ];
    for (name, args) in &commands {
        let mut outputs = Vec::new();
        let target = p(&format!("out-{name}"));
        let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
        full.push(&target);
        for _ in 0..2 {
            run_cli(&full)?;
            outputs.push(read_tree(Path::new(&target)));
        }
        let (a, b) = (&outputs[0], &outputs[1]);
        check(a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.1 == y.1), format!("{name} differs between runs"))?;
    }
    Ok(format!("{} commands byte-identical across runs", commands.len()))
}

fn read_tree(p: &Path) -> Vec<(String, Vec<u8>)> {
    if p.is_dir() {
        let mut v: Vec<_> = std::fs::read_dir(p)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&f).unwrap()))
            .collect();
        v.sort();
        v
    } else {
        vec![(String::new(), std::fs::read(p).unwrap())]
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("min-cut exactness", min_cut_exactness),
        ("flow/cut duality and closure", duality_and_closure),
        ("latency anchors", latency_anchors),
        ("mutual information", mutual_information),
        ("prompt transformation ablation", prompt_ablation),
        ("planner oracle equivalence", sero_oracle),
        ("monotonicity", monotonicity),
        ("sweep trends", sweep_trends),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
