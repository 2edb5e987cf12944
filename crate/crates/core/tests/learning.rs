use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wormnet::datagen::{gen_er_graph, gen_sample_pool, sample_model_params, split_pool};
use wormnet::learning::{
    evaluate, init_params, random_baseline, score, train, InitScheme, Optimizer, TrainConfig,
};
use wormnet::{InfectionState, WsnGraph};

fn er(n: usize, p: f64, k: usize, seed: u64) -> WsnGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = gen_er_graph(n, p, &mut rng).unwrap();
    let params = sample_model_params(&t, k, &mut rng).unwrap();
    WsnGraph::new(t, params).unwrap()
}

#[test]
fn starting_at_the_truth_has_zero_hard_loss() {
    let g = er(15, 0.3, 4, 1);
    let pool = gen_sample_pool(&g, 40, 4, 2).unwrap();
    let cfg = TrainConfig {
        epochs: 1,
        learning_rate: 0.0,
        init: InitScheme::Given(g.params().clone()),
        unroll_depth: Some(2),
        keep_best: false,
        ..TrainConfig::default()
    };
    let out = train(&g, &pool, &[], &cfg).unwrap();
    assert_eq!(out.history[0].val_hard_loss, 0.0);
    assert_eq!(out.history[0].accuracy, 1.0);
    assert_eq!(&out.params, g.params());
}

#[test]
fn every_update_stays_nonnegative() {
    let g = er(10, 0.3, 2, 3);
    let pool = gen_sample_pool(&g, 24, 3, 4).unwrap();
    for optimizer in [Optimizer::Sgd, Optimizer::Adam] {
        for epochs in 1..4 {
            let cfg = TrainConfig {
                epochs,
                learning_rate: 5.0,
                optimizer,
                batch_size: 6,
                keep_best: false,
                unroll_depth: Some(2),
                ..TrainConfig::default()
            };
            let out = train(&g, &pool, &[], &cfg).unwrap();
            assert!(out.params.is_nonnegative());
            assert!(out.params.thresholds.iter().chain(&out.params.weights).all(|x| x.is_finite()));
        }
    }
}

#[test]
fn tau_schedule_is_linear() {
    let cfg = TrainConfig {
        epochs: 5,
        tau_start: 2.0,
        tau_end: 10.0,
        ..TrainConfig::default()
    };
    let taus: Vec<f64> = (0..5).map(|e| cfg.tau(e)).collect();
    assert_eq!(taus, vec![2.0, 4.0, 6.0, 8.0, 10.0]);
}

#[test]
fn training_beats_the_prior_on_a_small_graph() {
    let g = er(30, 0.2, 2, 10);
    let pool = gen_sample_pool(&g, 400, 15, 11).unwrap();
    let (tr, te) = split_pool(&pool, 200, 200, 12).unwrap();
    let cfg = TrainConfig::tuned(13);
    let start = init_params(&g, &mut ChaCha8Rng::seed_from_u64(99), &cfg.init);
    let before = evaluate(&g, &start, &te.pairs).unwrap();
    let out = train(&g, &tr, &tr.pairs[..50], &cfg).unwrap();
    let after = evaluate(&g, &out.params, &te.pairs).unwrap();
    let base = random_baseline(&te.pairs, 2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(after.accuracy >= base.accuracy + 0.15, "{after:?}");
    assert!(after.accuracy > before.accuracy, "{before:?} -> {after:?}");
}

#[test]
fn random_baseline_calibrates() {
    let g = er(50, 0.2, 2, 20);
    let pool = gen_sample_pool(&g, 300, 10, 21).unwrap();
    let m = random_baseline(&pool.pairs, 2, &mut ChaCha8Rng::seed_from_u64(22)).unwrap();
    assert!((m.accuracy - 1.0 / 3.0).abs() < 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn true_parameters_are_exact(seed in any::<u64>(), k in prop::sample::select(vec![2usize, 4, 8])) {
        let g = er(12, 0.3, k, seed);
        let pool = gen_sample_pool(&g, 12, 1 + (seed % 12) as usize, seed).unwrap();
        let m = evaluate(&g, g.params(), &pool.pairs).unwrap();
        prop_assert_eq!(m.mean_loss, 0.0);
        prop_assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn metrics_stay_in_unit_interval(
        k in 1usize..6,
        labels in prop::collection::vec((0usize..6, 0usize..6), 1..60),
    ) {
        let clip = |x: usize| x % (k + 1);
        let p = InfectionState::new(labels.iter().map(|l| clip(l.0)).collect(), k).unwrap();
        let t = InfectionState::new(labels.iter().map(|l| clip(l.1)).collect(), k).unwrap();
        let m = score(&[p], &[t], k).unwrap();
        for x in [m.f1, m.precision, m.recall, m.accuracy, m.mean_loss] {
            prop_assert!((0.0..=1.0).contains(&x));
        }
        prop_assert!((m.accuracy + m.mean_loss - 1.0).abs() < 1e-12);
    }
}
