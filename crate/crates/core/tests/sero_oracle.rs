mod common;

use proptest::prelude::*;
use splitsam_core::netsim::{synth_class_trace, BandwidthTrace, NetworkClass, Sample, TraceSynthOptions};
use splitsam_core::partition::Partition;
use splitsam_core::reference;
use splitsam_core::sero::{branch_latency, branch_latency_on_trace, plan, plan_under_trace, SeroError};

use common::{brute_force_plan, random_instance};

fn accuracy_or_none(r: Result<splitsam_core::sero::SeroPlan, SeroError>) -> Option<f64> {
    match r {
        Ok(p) => Some(p.predicted_accuracy),
        Err(SeroError::Infeasible { .. }) => None,
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn plan_matches_exhaustive_oracle() {
    let mut feasible = 0;
    for seed in 0..30 {
        let ri = random_instance(seed);
        let got = plan(&ri.instance);
        if let Ok(p) = &got {
            assert!(p.predicted_latency_ms <= ri.instance.latency_budget_ms);
            feasible += 1;
        }
        assert_eq!(accuracy_or_none(got), brute_force_plan(&ri), "instance {seed}");
    }
    assert!(feasible >= 10, "too few feasible instances to be meaningful: {feasible}");
}

#[test]
fn infeasible_reports_fastest_configuration() {
    let inst = reference::instance().with_budget(10.0);
    match plan(&inst) {
        Err(SeroError::Infeasible { min_latency_ms, budget_ms }) => {
            assert_eq!(budget_ms, 10.0);
            let relaxed = plan(&inst.with_budget(min_latency_ms)).unwrap();
            assert_eq!(relaxed.predicted_latency_ms, min_latency_ms);
        }
        other => panic!("expected infeasibility, got {other:?}"),
    }
}

#[test]
fn synchronization_uses_slower_branch() {
    let inst = reference::instance().with_bandwidth(3.0).with_budget(1e9);
    let p = plan(&inst).unwrap();
    let (v, q) = (p.video.latency.total_ms, p.prompt.latency.total_ms);
    assert!(v != q);
    assert_eq!(p.predicted_latency_ms, v.max(q) + p.decoder_ms);
    assert_eq!(p.decoder_ms, 20.0);
}

#[test]
fn step_trace_mid_upload() {
    let inst = reference::instance();
    let g = &inst.video;
    let p = Partition::all_cloud(g, "1080p", 100.0).unwrap();
    let trace =
        BandwidthTrace::new(vec![Sample { t_ms: 0.0, mbps: 100.0 }, Sample { t_ms: 500.0, mbps: 3.0 }], 1e7).unwrap();
    let l = branch_latency_on_trace(g, &p, 0, &trace, 0.0).unwrap();
    // 50 Mbit in the first 500 ms, the other 24 Mbit at 3 Mbps
    assert!((l.uplink_ms - 8500.0).abs() < 1e-6);
    assert_eq!(l.downlink_ms, 0.0);
}

#[test]
fn constant_trace_equals_scalar_plan_on_random_instances() {
    for seed in 0..30 {
        let ri = random_instance(seed);
        let trace = BandwidthTrace::constant(ri.instance.bandwidth_mbps).unwrap();
        let a = plan(&ri.instance);
        let b = plan_under_trace(&ri.instance, &trace, 0.0);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!((&a.video_res, &a.prompt_res), (&b.video_res, &b.prompt_res), "instance {seed}");
                assert!((a.predicted_latency_ms - b.predicted_latency_ms).abs() < 1e-6);
            }
            (Err(SeroError::Infeasible { .. }), Err(SeroError::Infeasible { .. })) => {}
            (a, b) => panic!("instance {seed}: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn class_traces_give_monotone_accuracy() {
    let inst = reference::instance();
    for sigma in [0.0, 0.25] {
        let opts = TraceSynthOptions { sigma, ..Default::default() };
        let accs: Vec<f64> = NetworkClass::ALL
            .iter()
            .map(|&c| {
                let t = synth_class_trace(c, 120_000.0, 11, opts).unwrap();
                plan_under_trace(&inst, &t, 0.0).unwrap().predicted_accuracy
            })
            .collect();
        // classes are listed from the fastest to the slowest
        for w in accs.windows(2) {
            assert!(w[0] >= w[1], "sigma {sigma}: {accs:?}");
        }
    }
}

#[test]
fn reference_branch_anchors() {
    let inst = reference::instance();
    let g = &inst.video;
    let p = Partition::all_cloud(g, "1080p", 20.0).unwrap();
    let l = branch_latency(g, &p, 20.0, reference::EMBEDDING_BYTES).unwrap();
    assert!((l.uplink_ms - 3700.0).abs() < 1.0);
    assert!((l.downlink_ms - 1200.0).abs() < 1.0);
    assert!((l.uplink_ms + l.downlink_ms - 4900.0).abs() < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn accuracy_non_decreasing_in_bandwidth(seed in 0u64..5000, factor in 1.0f64..16.0) {
        let ri = random_instance(seed);
        let slow = accuracy_or_none(plan(&ri.instance));
        let fast = accuracy_or_none(plan(&ri.instance.with_bandwidth(ri.instance.bandwidth_mbps * factor)));
        prop_assert!(fast >= slow);
    }

    #[test]
    fn accuracy_non_decreasing_in_budget(seed in 0u64..5000, extra in 0.0f64..500.0) {
        let ri = random_instance(seed);
        let tight = accuracy_or_none(plan(&ri.instance));
        let loose = accuracy_or_none(plan(&ri.instance.with_budget(ri.instance.latency_budget_ms + extra)));
        prop_assert!(loose >= tight);
    }
}
