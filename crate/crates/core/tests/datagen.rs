use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wormnet::datagen::{
    audit_pool, gen_er_graph, gen_sample_pool, load_sensor_graph, parse_sensor_graph,
    sample_model_params, split_pool, SensorRule, SENSOR54,
};
use wormnet::io::{parse_pool, write_pool};
use wormnet::{InfectionState, WsnGraph};

fn er(n: usize, p: f64, k: usize, seed: u64) -> WsnGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = gen_er_graph(n, p, &mut rng).unwrap();
    let params = sample_model_params(&t, k, &mut rng).unwrap();
    WsnGraph::new(t, params).unwrap()
}

#[test]
fn er_edge_count_within_three_sigma() {
    let (n, p) = (200usize, 0.2);
    let pairs = (n * (n - 1)) as f64;
    let mean = pairs * p;
    let sd = (pairs * p * (1.0 - p)).sqrt();
    for seed in 0..10 {
        let t = gen_er_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let m = t.edge_count() as f64;
        assert!((m - mean).abs() <= 3.0 * sd, "seed {seed}: {m} edges");
    }
}

#[test]
fn weights_depend_only_on_topology() {
    let t = gen_er_graph(30, 0.2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let a = sample_model_params(&t, 4, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let b = sample_model_params(&t, 4, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert_eq!(a.weights, b.weights);
    assert_ne!(a.thresholds, b.thresholds);
    assert!(a.thresholds.iter().all(|x| (0.0..1.0).contains(x)));
}

#[test]
fn pools_are_consistent_and_reproducible() {
    let g = er(40, 0.2, 4, 5);
    let pool = gen_sample_pool(&g, 60, 10, 11).unwrap();
    assert!(audit_pool(&g, &pool).unwrap().is_empty());
    for p in &pool.pairs {
        assert_eq!(p.initial.infected_count(), 10);
    }
    let again = gen_sample_pool(&g, 60, 10, 11).unwrap();
    assert_eq!(write_pool(&again), write_pool(&pool));
    // A prefix of a larger pool is the smaller pool.
    let longer = gen_sample_pool(&g, 80, 10, 11).unwrap();
    assert_eq!(&longer.pairs[..60], &pool.pairs[..]);
    assert_eq!(parse_pool(&write_pool(&pool)).unwrap(), pool);
}

#[test]
fn audit_flags_tampered_pairs() {
    let g = er(20, 0.3, 2, 6);
    let mut pool = gen_sample_pool(&g, 10, 4, 1).unwrap();
    let v = (0..20).find(|&v| pool.pairs[3].final_state.label(v) != 2).unwrap();
    let mut labels = pool.pairs[3].final_state.labels().to_vec();
    labels[v] = 2;
    pool.pairs[3].final_state = InfectionState::new(labels, 2).unwrap();
    assert_eq!(audit_pool(&g, &pool).unwrap(), vec![3]);
}

#[test]
fn split_is_disjoint_and_seeded() {
    let g = er(12, 0.3, 2, 7);
    let pool = gen_sample_pool(&g, 50, 3, 2).unwrap();
    let (tr, te) = split_pool(&pool, 30, 20, 9).unwrap();
    assert_eq!((tr.len(), te.len()), (30, 20));
    let mut all: Vec<_> = tr.pairs.iter().chain(&te.pairs).map(|p| p.initial.clone()).collect();
    let mut orig: Vec<_> = pool.pairs.iter().map(|p| p.initial.clone()).collect();
    all.sort_by(|a, b| a.labels().cmp(b.labels()));
    orig.sort_by(|a, b| a.labels().cmp(b.labels()));
    assert_eq!(all, orig);
    assert_eq!(split_pool(&pool, 30, 20, 9).unwrap(), (tr, te));
    let (empty, rest) = split_pool(&pool, 0, 50, 1).unwrap();
    assert!(empty.is_empty() && rest.len() == 50);
    assert!(split_pool(&pool, 40, 20, 1).is_err());
}

#[test]
fn seed_count_bounds() {
    let g = er(5, 0.5, 2, 1);
    assert!(gen_sample_pool(&g, 1, 0, 0).is_err());
    assert!(gen_sample_pool(&g, 1, 6, 0).is_err());
    let full = gen_sample_pool(&g, 3, 5, 0).unwrap();
    assert!(full.pairs.iter().all(|p| p.initial == p.final_state));
}

#[test]
fn sensor_file_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lab.txt");
    std::fs::write(&path, SENSOR54).unwrap();
    let links = load_sensor_graph(&path, SensorRule::EdgeList).unwrap();
    assert_eq!(links.topology.node_count(), 54);
    assert_eq!(links.components, 1);
    let near = load_sensor_graph(&path, SensorRule::Distance { radius: 6.0 }).unwrap();
    let far = load_sensor_graph(&path, SensorRule::Distance { radius: 12.0 }).unwrap();
    assert!(near.topology.edge_count() < far.topology.edge_count());
    assert!(load_sensor_graph(&dir.path().join("missing"), SensorRule::EdgeList).is_err());
    assert!(parse_sensor_graph("wsn-sensors 1 2\npos 0 0 0\n", SensorRule::Distance { radius: 1.0 }).is_err());
}
