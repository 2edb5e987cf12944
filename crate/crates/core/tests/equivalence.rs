use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wormnet::compiler::{
    build_global_network, build_local_block, forward_blocks, network_final, random_initial,
    verify_network, CompileOptions, VerifyMode,
};
use wormnet::cvnn::{forward_output, Mode, Slot};
use wormnet::datagen::{gen_er_graph, sample_model_params};
use wormnet::propagation::DEFAULT_ORACLE_CAP;
use wormnet::{encode_status, propagate, step, InfectionState, WsnGraph};

fn er_graph(n: usize, p: f64, k: usize, seed: u64) -> WsnGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = gen_er_graph(n, p, &mut rng).unwrap();
    let params = sample_model_params(&t, k, &mut rng).unwrap();
    WsnGraph::new(t, params).unwrap()
}

/// Graphs with arbitrary weights, including exact ties and zero weights.
fn rough_graph(n: usize, k: usize, seed: u64) -> WsnGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = [0.0, 0.25, 0.5, 0.1, 0.2, 0.3, 1.0 / 3.0];
    let pick = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            grid[rng.gen_range(0..grid.len())]
        } else {
            rng.gen::<f64>()
        }
    };
    let thresholds = (0..n).map(|_| (0..k).map(|_| pick(&mut rng)).collect()).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(0.4) {
                edges.push((u, v, (0..k).map(|_| pick(&mut rng)).collect()));
            }
        }
    }
    WsnGraph::from_parts(n, k, thresholds, edges).unwrap()
}

#[test]
fn random_graphs_match_simulator() {
    let opts = CompileOptions::default();
    for (i, &(n, k)) in [(8, 2), (8, 4), (8, 8), (16, 2), (16, 4), (16, 8), (12, 8)]
        .iter()
        .enumerate()
    {
        for seed in 0..4u64 {
            let g = er_graph(n, 0.3, k, 100 * i as u64 + seed);
            let net = build_global_network(&g, &opts).unwrap();
            let r = verify_network(&g, &net, VerifyMode::Random { trials: 25, seed }).unwrap();
            assert_eq!(r.mismatches, 0, "n={n} k={k} seed={seed}: {:?}", r.records.first());
            let g = rough_graph(n, k, 7 + seed);
            let net = build_global_network(&g, &opts).unwrap();
            let r = verify_network(&g, &net, VerifyMode::Random { trials: 25, seed }).unwrap();
            assert_eq!(r.mismatches, 0, "rough n={n} k={k}: {:?}", r.records.first());
        }
    }
}

#[test]
fn exhaustive_small_graphs() {
    let opts = CompileOptions::default();
    for seed in 0..3 {
        let g = rough_graph(5, 2, seed);
        let net = build_global_network(&g, &opts).unwrap();
        let r = verify_network(&g, &net, VerifyMode::Exhaustive { cap: DEFAULT_ORACLE_CAP })
            .unwrap();
        assert_eq!((r.trials, r.mismatches), (243, 0));
        let g = rough_graph(3, 4, seed);
        let net = build_global_network(&g, &opts).unwrap();
        let r = verify_network(&g, &net, VerifyMode::Exhaustive { cap: DEFAULT_ORACLE_CAP })
            .unwrap();
        assert_eq!((r.trials, r.mismatches), (125, 0));
    }
}

#[test]
fn corrupted_weight_is_caught() {
    let g = er_graph(8, 0.5, 2, 3);
    let mut net = build_global_network(&g, &CompileOptions::default()).unwrap();
    let idx = net
        .bindings()
        .iter()
        .position(|b| matches!(b.slots[0], Slot::Weight { .. }))
        .unwrap();
    net.set_param(idx, 50.0).unwrap();
    let r = verify_network(&g, &net, VerifyMode::Random { trials: 200, seed: 0 }).unwrap();
    assert!(r.mismatches >= 1);
    let m = r.first_counterexample().unwrap();
    assert!(!m.trace_diff.is_empty());
    let line = r.to_json_lines();
    assert!(line.lines().next().unwrap().starts_with("{\"trial\":"));
}

#[test]
fn early_exit_matches_full_depth() {
    let g = er_graph(12, 0.3, 4, 9);
    let net = build_global_network(&g, &CompileOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let s = random_initial(12, 4, &mut rng);
        let x = encode_status(&s, 4).unwrap();
        let (full, nb) = forward_blocks(&net, x.as_slice(), 8, false).unwrap();
        let (early, ne) = forward_blocks(&net, x.as_slice(), 8, true).unwrap();
        assert_eq!(full, early);
        assert_eq!(nb, 12);
        assert!(ne <= nb);
    }
}

#[test]
fn binding_touches_only_its_entries() {
    let g = er_graph(6, 0.5, 2, 4);
    let base = build_global_network(&g, &CompileOptions::default()).unwrap();
    for idx in [0, base.param_count() - 1] {
        let mut changed = base.clone();
        let old = base.param_values()[idx];
        changed.set_param(idx, old + 0.125).unwrap();
        let mut diffs = 0;
        for (a, b) in base.bodies().iter().zip(changed.bodies()) {
            diffs += a.vals().iter().zip(b.vals()).filter(|(x, y)| x != y).count();
            diffs += a
                .activations()
                .iter()
                .zip(b.activations())
                .filter(|(x, y)| x != y)
                .count();
        }
        assert_eq!(diffs, 1);
        // Every repetition reads the same body.
        for i in 0..changed.layer_count() {
            if changed.sequence()[i] == 0 {
                assert_eq!(changed.layer(i), &changed.bodies()[0]);
            }
        }
    }
}

fn arb_case() -> impl Strategy<Value = (WsnGraph, InfectionState)> {
    (2usize..9, prop::sample::select(vec![2usize, 4, 8]), any::<u64>()).prop_map(|(n, k, seed)| {
        let g = rough_graph(n, k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let s = random_initial(n, k, &mut rng);
        (g, s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_equals_step((g, s) in arb_case()) {
        let block = build_local_block(&g, &CompileOptions::default()).unwrap();
        let want = step(&g, &s).unwrap();
        let got = network_final(&block, &s, g.worm_count(), false).unwrap();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn block_fixes_fixed_points((g, s) in arb_case()) {
        let (f, _) = propagate(&g, &s).unwrap();
        let block = build_local_block(&g, &CompileOptions::default()).unwrap();
        let x = encode_status(&f, g.worm_count()).unwrap();
        let (y, _) = forward_blocks(&block, x.as_slice(), block.layer_count(), false).unwrap();
        prop_assert_eq!(y, x.into_vec());
    }

    #[test]
    fn hard_forward_is_deterministic((g, s) in arb_case()) {
        let block = build_local_block(&g, &CompileOptions::default()).unwrap();
        let x = encode_status(&s, g.worm_count()).unwrap();
        let a = forward_output(&block, x.as_slice(), Mode::Hard).unwrap();
        let b = forward_output(&block.clone(), x.as_slice(), Mode::Hard).unwrap();
        let bits = |v: &[Complex64]| v.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a), bits(&b));
    }
}
