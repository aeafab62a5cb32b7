use proptest::prelude::*;
use splitsam_core::maxflow::{max_flow, Capacity, FlowNetwork};

#[derive(Debug, Clone)]
struct Net {
    n: usize,
    arcs: Vec<(usize, usize, Capacity)>,
}

fn net() -> impl Strategy<Value = Net> {
    (2usize..=8).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 0i64..25), 0..24)
            .prop_map(move |arcs| Net { n, arcs: arcs.into_iter().filter(|(u, v, _)| u != v).collect() })
    })
}

/// Minimum over all 2^(n-2) source/sink separations.
fn brute_min_cut(net: &Net) -> Capacity {
    let (s, t) = (0, net.n - 1);
    let mut best = Capacity::MAX;
    for mask in 0u32..(1 << net.n) {
        if mask >> s & 1 == 0 || mask >> t & 1 == 1 {
            continue;
        }
        let cut: Capacity =
            net.arcs.iter().filter(|(u, v, _)| mask >> u & 1 == 1 && mask >> v & 1 == 0).map(|a| a.2).sum();
        best = best.min(cut);
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn max_flow_equals_brute_force_min_cut(net in net()) {
        let mut fnet = FlowNetwork::new(net.n, 0, net.n - 1).unwrap();
        for &(u, v, c) in &net.arcs {
            fnet.add_arc(u, v, c).unwrap();
        }
        let f = max_flow(&fnet).unwrap();
        prop_assert_eq!(f.value, brute_min_cut(&net));
        prop_assert!(f.source_side[0] && !f.source_side[net.n - 1]);
        let side_cut: Capacity = f.cut_arcs(&fnet).map(|a| fnet.capacity(a)).sum();
        prop_assert_eq!(side_cut, f.value);
        // determinism
        prop_assert_eq!(max_flow(&fnet).unwrap().source_side, f.source_side);
    }
}
