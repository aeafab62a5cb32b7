use proptest::prelude::*;
use splitsam_core::netsim::{
    synth_class_trace, transfer_over_trace, transmission_time, BandwidthTrace, NetError, NetworkClass, Sample,
    TraceSynthOptions,
};

fn trace() -> impl Strategy<Value = BandwidthTrace> {
    prop::collection::vec((1.0f64..200.0, 0.5f64..100.0), 1..12).prop_map(|segs| {
        let mut t = 0.0;
        let mut samples = Vec::new();
        for (len, mbps) in &segs {
            samples.push(Sample { t_ms: t, mbps: *mbps });
            t += len;
        }
        BandwidthTrace::new(samples, t).unwrap()
    })
}

#[test]
fn two_segment_integral() {
    let t =
        BandwidthTrace::new(vec![Sample { t_ms: 0.0, mbps: 10.0 }, Sample { t_ms: 500.0, mbps: 30.0 }], 1e6).unwrap();
    let x = transfer_over_trace(1_250_000, &t, 0.0).unwrap();
    assert!((x.duration_ms - (500.0 + 500.0 / 3.0)).abs() < 1e-9);
}

#[test]
fn exhausted_trace() {
    let t = BandwidthTrace::new(vec![Sample { t_ms: 0.0, mbps: 1.0 }], 100.0).unwrap();
    assert!(matches!(transfer_over_trace(1_000_000, &t, 0.0), Err(NetError::TraceExhausted { .. })));
}

#[test]
fn class_means_within_two_percent() {
    for class in NetworkClass::ALL {
        for seed in 0..5 {
            let t = synth_class_trace(class, 100_000.0, seed, TraceSynthOptions::default()).unwrap();
            let m = class.mean_mbps();
            assert!((t.mean_mbps() - m).abs() <= 0.02 * m, "{class:?} seed {seed}: {}", t.mean_mbps());
            assert_eq!(t, synth_class_trace(class, 100_000.0, seed, TraceSynthOptions::default()).unwrap());
        }
    }
    let flat =
        synth_class_trace(NetworkClass::ThreeG, 100_000.0, 1, TraceSynthOptions { sigma: 0.0, ..Default::default() })
            .unwrap();
    assert_eq!(flat.samples().len(), 1);
    assert_eq!(flat.samples()[0].mbps, 3.0);
}

#[test]
fn csv_round_trip() {
    let t = synth_class_trace(NetworkClass::Wifi80211g, 2_000.0, 5, TraceSynthOptions::default()).unwrap();
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let back = BandwidthTrace::from_csv_reader(buf.as_slice()).unwrap();
    assert_eq!(back.samples().len(), t.samples().len());
    assert!((back.end_ms() - t.end_ms()).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn constant_trace_matches_closed_form(bytes in 0u64..50_000_000, mbps in 0.1f64..2000.0) {
        let t = BandwidthTrace::constant(mbps).unwrap();
        let x = transfer_over_trace(bytes, &t, 0.0).unwrap();
        let expect = transmission_time(bytes, mbps).unwrap();
        prop_assert!((x.duration_ms - expect).abs() <= 1e-9 * expect.max(1.0));
    }

    #[test]
    fn faster_trace_never_slower(tr in trace(), bytes in 0u64..200_000, factor in 1.0f64..10.0, start in 0.0f64..1.0) {
        let t0 = tr.start_ms() + start * 0.5 * tr.duration_ms();
        let fast = tr.scaled(factor).unwrap();
        if let Ok(slow) = transfer_over_trace(bytes, &tr, t0) {
            let quick = transfer_over_trace(bytes, &fast, t0).unwrap();
            prop_assert!(quick.duration_ms <= slow.duration_ms + 1e-9);
        }
    }

    #[test]
    fn transferred_bits_match_integral(tr in trace(), bytes in 1u64..100_000) {
        if let Ok(x) = transfer_over_trace(bytes, &tr, 0.0) {
            // integrate the rate over [0, finish)
            let s = tr.samples();
            let mut bits = 0.0;
            for (i, seg) in s.iter().enumerate() {
                let end = s.get(i + 1).map_or(tr.end_ms(), |n| n.t_ms).min(x.finish_ms);
                if end > seg.t_ms {
                    bits += seg.mbps * 1e3 * (end - seg.t_ms);
                }
            }
            prop_assert!((bits - bytes as f64 * 8.0).abs() <= 1e-6 * bytes as f64 * 8.0);
        }
    }
}
