use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use splitsam_core::prompt::{
    apply_strategy, contribution_score, entropy, offline_profile, online_select, sample_strategy, EmpiricalJoint,
    ProfileEntry, SamplerConfig, StrategyProfile, TaskFixture, VisualPrompt,
};
use splitsam_core::reference;

fn joint() -> impl Strategy<Value = Vec<Vec<u64>>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(0u64..20, c), r))
}

/// Direct sum of `p(x,y) log2(p(x,y) / (p(x) p(y)))` over non-zero cells.
fn direct_mi(counts: &[Vec<u64>]) -> f64 {
    let n: u64 = counts.iter().flatten().sum();
    let n = n as f64;
    let px: Vec<f64> = counts.iter().map(|r| r.iter().sum::<u64>() as f64 / n).collect();
    let py: Vec<f64> = (0..counts[0].len()).map(|c| counts.iter().map(|r| r[c]).sum::<u64>() as f64 / n).collect();
    let mut mi = 0.0;
    for (x, row) in counts.iter().enumerate() {
        for (y, &k) in row.iter().enumerate() {
            if k > 0 {
                let p = k as f64 / n;
                mi += p * (p / (px[x] * py[y])).log2();
            }
        }
    }
    mi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mi_bounds_and_symmetry(counts in joint()) {
        prop_assume!(counts.iter().flatten().sum::<u64>() > 0);
        let j = EmpiricalJoint::from_counts(counts.clone()).unwrap();
        let i = j.mutual_information();
        prop_assert!(i >= 0.0);
        prop_assert!(i <= j.entropy_x().min(j.entropy_y()) + 1e-9);
        prop_assert!((i - j.transpose().mutual_information()).abs() < 1e-9);
        prop_assert!((i - direct_mi(&counts).max(0.0)).abs() < 1e-9);
    }

    #[test]
    fn product_joints_carry_nothing(a in prop::collection::vec(1u64..9, 1..5), b in prop::collection::vec(1u64..9, 1..5)) {
        let counts: Vec<Vec<u64>> = a.iter().map(|x| b.iter().map(|y| x * y).collect()).collect();
        let j = EmpiricalJoint::from_counts(counts).unwrap();
        prop_assert!(j.mutual_information().abs() < 1e-9);
    }

    #[test]
    fn deterministic_joint_mi_is_hx(rows in prop::collection::vec(1u64..30, 1..6)) {
        // X determines Y: one non-zero cell per row, each in its own column
        let n = rows.len();
        let counts: Vec<Vec<u64>> = rows.iter().enumerate().map(|(i, &k)| (0..n).map(|c| if c == i { k } else { 0 }).collect()).collect();
        let j = EmpiricalJoint::from_counts(counts).unwrap();
        prop_assert!((j.mutual_information() - j.entropy_x()).abs() < 1e-9);
    }

    #[test]
    fn coarsening_never_increases_mi(counts in joint(), seed in 0u64..1000) {
        prop_assume!(counts.iter().flatten().sum::<u64>() > 0);
        let j = EmpiricalJoint::from_counts(counts).unwrap();
        let cols = j.cols();
        let map: Vec<usize> = (0..cols).map(|c| ((c as u64 * 2654435761 + seed) % cols.max(2) as u64 / 2) as usize).collect();
        let merged = j.coarsen_y(&map).unwrap();
        prop_assert!(merged.mutual_information() <= j.mutual_information() + 1e-9);
    }

    #[test]
    fn entropy_is_non_negative(w in prop::collection::vec(0.0f64..5.0, 1..8)) {
        let s: f64 = w.iter().sum();
        prop_assume!(s > 0.0);
        let p: Vec<f64> = w.iter().map(|x| x / s).collect();
        let h = entropy(&p).unwrap();
        prop_assert!(h >= 0.0 && h <= (p.len() as f64).log2() + 1e-9);
    }

    #[test]
    fn strategies_never_add_prompts(seed in 0u64..10_000, points in 1usize..12) {
        let f = TaskFixture::synthetic(8, points, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let s = sample_strategy(&f.prompts, f.pad, SamplerConfig::default(), &mut rng);
            let out = apply_strategy(&f.prompts, &s, f.pad).unwrap();
            prop_assert!(out.len() <= f.prompts.len());
            prop_assert!(out.iter().all(|p| p.validate().is_ok()));
        }
    }

    #[test]
    fn online_select_respects_budget(entries in prop::collection::vec((0.0f64..4.0, 10.0f64..400.0), 1..12), budget in 0.0f64..500.0) {
        let mut p = StrategyProfile::default();
        for (i, (c, l)) in entries.iter().enumerate() {
            p.insert(format!("s{i:02}"), ProfileEntry { accuracy: 0.5, latency_ms: *l, contribution_bits: *c });
        }
        match online_select(&p, budget) {
            Ok(id) => {
                let first = *p.get(&id).unwrap();
                prop_assert!(first.latency_ms <= budget);
                p.remove(&id);
                if let Ok(next) = online_select(&p, budget) {
                    prop_assert!(p.get(&next).unwrap().ratio() <= first.ratio());
                }
            }
            Err(_) => prop_assert!(entries.iter().all(|(_, l)| *l > budget)),
        }
    }
}

#[test]
fn decoder_latency_strictly_increasing() {
    let d = reference::prompt_fixture().decoder;
    for k in 0..20 {
        assert!(d.latency_ms(k + 1) > d.latency_ms(k));
    }
}

#[test]
fn contribution_matches_direct_enumeration() {
    for seed in 0..10 {
        let f = TaskFixture::synthetic(8, 1 + seed as usize, seed).unwrap();
        // rebuild the joint cell by cell from single-prompt masks
        let mut counts = vec![vec![0u64; 2]; f.prompts.len() + 1];
        let masks: Vec<Vec<bool>> = f.prompts.iter().map(|p| f.prompt_mask(p)).collect();
        for cell in 0..64 {
            let x = masks.iter().position(|m| m[cell]).map_or(0, |i| i + 1);
            let y = (f.labels[cell / 8][cell % 8] != 0) as usize;
            counts[x][y] += 1;
        }
        let expect = direct_mi(&counts).max(0.0);
        assert!((contribution_score(&f.prompts, &f).unwrap() - expect).abs() < 1e-12);
    }
    let f = reference::prompt_fixture();
    assert_eq!(contribution_score(&[], &f).unwrap(), 0.0);
}

/// Every way of merging the ten clicks into groups: singletons stay
/// points, larger groups become their padded bounding box.
fn set_partition_outcomes(f: &TaskFixture) -> Vec<(f64, f64)> {
    let n = f.prompts.len();
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(i: usize, max: usize, labels: &mut [usize], f: &TaskFixture, out: &mut Vec<(f64, f64)>) {
        if i == labels.len() {
            let blocks = max;
            let mut prompts = Vec::new();
            for b in 0..blocks {
                let members: Vec<(f64, f64)> = labels
                    .iter()
                    .zip(&f.prompts)
                    .filter(|(l, _)| **l == b)
                    .map(|(_, p)| match p {
                        VisualPrompt::Point { x, y } => (*x, *y),
                        _ => unreachable!(),
                    })
                    .collect();
                if members.len() == 1 {
                    prompts.push(VisualPrompt::point(members[0].0, members[0].1));
                } else {
                    let x0 = members.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
                    let y0 = members.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
                    let x1 = members.iter().map(|m| m.0).fold(f64::NEG_INFINITY, f64::max);
                    let y1 = members.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max);
                    let c = |v: f64| v.clamp(0.0, 1.0);
                    prompts.push(VisualPrompt::rect(c(x0 - f.pad), c(y0 - f.pad), c(x1 + f.pad), c(y1 + f.pad)));
                }
            }
            out.push((f.decoder.latency_ms(prompts.len()), f.accuracy(&prompts)));
            return;
        }
        for l in 0..=max {
            labels[i] = l;
            rec(i + 1, max.max(l + 1), labels, f, out);
        }
    }
    rec(0, 0, &mut labels, f, &mut out);
    out
}

#[test]
fn random_search_reaches_exhaustive_best_latency() {
    let f = reference::prompt_fixture();
    let all = set_partition_outcomes(&f);
    // Bell(10)
    assert_eq!(all.len(), 115_975);
    let best = all.iter().map(|o| o.0).fold(f64::INFINITY, f64::min);
    assert_eq!(best, f.decoder.latency_ms(1));
    let prof = offline_profile(&f, 200, 42, SamplerConfig::default()).unwrap();
    assert_eq!(prof.profile.min_latency_ms().unwrap(), best);
    let again = offline_profile(&f, 200, 42, SamplerConfig::default()).unwrap();
    assert_eq!(prof, again);
}

#[test]
fn ablation_reduction_on_reference_fixture() {
    let f = reference::prompt_fixture();
    let r = f.decoder.reduction(10, 1);
    assert!((r - 0.68).abs() <= 0.005, "{r}");
}
