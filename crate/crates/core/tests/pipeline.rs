use ftconn_core::graph::{generate, oracle_connected, Graph, Model, VertexSet};
use ftconn_core::hierarchy::{build_base_hierarchy, coarse::shuffled_postorder, coarsen, coarsen_with_order, random_partition};
use ftconn_core::query::{answer, answer_with_transcript, Answer, QueryInput};
use ftconn_core::scheme::{build_scheme, BuildConfig, PartitionMode, Scheme};
use ftconn_core::verify::{run_all, VerifyOptions};
use proptest::prelude::*;

fn ask(sc: &Scheme, s: usize, t: usize, f: &[usize]) -> bool {
    let input = QueryInput { s: sc.label(s), t: sc.label(t), faults: f.iter().map(|&x| sc.label(x)).collect() };
    answer(&input).unwrap().is_connected()
}

#[test]
fn verify_suites_on_deep_hierarchies() {
    let models = [
        Model::KaryTree { k: 5, depth: 3, p: 0.0 },
        Model::KaryTree { k: 4, depth: 3, p: 0.3 },
        Model::Hubs { hubs: 12, leaves: 40, p: 0.4 },
        Model::Cycle { k: 20 },
        Model::Complete { k: 7 },
    ];
    for (i, m) in models.iter().enumerate() {
        let g = generate(m, i as u64).unwrap();
        for f in [1, 3] {
            let cfg = BuildConfig { f, seed: 11 + i as u64, keep_full_aux: true, partition: PartitionMode::Derandomized, ..Default::default() };
            let sc = build_scheme(&g, &cfg).unwrap();
            let opts = VerifyOptions { queries: 60, seed: i as u64, label_check_vertices: 24, invariant_max_n: 160 };
            for s in run_all(&g, &sc, &opts) {
                assert!(s.passed(), "{m:?} f={f}: {s:?}");
            }
        }
    }
}

#[test]
fn builds_are_deterministic() {
    let g = generate(&Model::Gnp { n: 60, p: 0.08 }, 5).unwrap();
    let cfg = BuildConfig { f: 2, seed: 9, ..Default::default() };
    let a = build_scheme(&g, &cfg).unwrap();
    let b = build_scheme(&g, &cfg).unwrap();
    assert!(a.labels.iter().zip(&b.labels).all(|(x, y)| x.to_bytes() == y.to_bytes()));
    let input = QueryInput { s: a.label(0), t: a.label(1), faults: vec![a.label(2), a.label(3)] };
    let input_b = QueryInput { s: b.label(0), t: b.label(1), faults: vec![b.label(2), b.label(3)] };
    assert_eq!(answer_with_transcript(&input).unwrap(), answer_with_transcript(&input_b).unwrap());
}

#[test]
fn decoded_labels_answer_identically() {
    let g = generate(&Model::Grid { w: 5, h: 4 }, 0).unwrap();
    let sc = build_scheme(&g, &BuildConfig { f: 2, seed: 1, ..Default::default() }).unwrap();
    let decoded: Vec<_> = sc.labels.iter().map(|l| ftconn_core::labeling::FinalLabel::from_bytes(&l.to_bytes()).unwrap()).collect();
    for (s, t, f) in [(0, 19, vec![6, 13]), (0, 4, vec![1, 6]), (2, 17, vec![])] {
        let a = answer(&QueryInput { s: sc.label(s), t: sc.label(t), faults: f.iter().map(|&x| sc.label(x)).collect() }).unwrap();
        let b = answer(&QueryInput { s: &decoded[s], t: &decoded[t], faults: f.iter().map(|&x| &decoded[x]).collect() }).unwrap();
        assert_eq!(a, b);
    }
    // corner 0 is cut off by its two neighbors
    assert_eq!(answer(&QueryInput { s: &decoded[0], t: &decoded[19], faults: vec![&decoded[1], &decoded[5]] }).unwrap(), Answer::Disconnected);
}

#[test]
fn shuffled_postorders_answer_correctly() {
    let g = generate(&Model::KaryTree { k: 4, depth: 3, p: 0.3 }, 2).unwrap();
    let h0 = build_base_hierarchy(&g).unwrap();
    let part = random_partition(g.n(), 2, 4);
    for color in 1..=3 {
        let base = coarsen(&g, &h0, &part, color).unwrap();
        for seed in 0..5 {
            let order = shuffled_postorder(&h0, seed);
            let h = coarsen_with_order(&g, &h0, &part, color, &order).unwrap();
            let mut seen = vec![0; g.n()];
            for k in &h.components {
                for v in k.vertices.iter() {
                    seen[v] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1));
            assert_eq!(h.components.len() <= g.n(), base.components.len() <= g.n());
        }
    }
}

#[test]
fn spec_examples_end_to_end() {
    // path, middle fault
    let g = generate(&Model::Path { k: 5 }, 0).unwrap();
    let sc = build_scheme(&g, &BuildConfig::default()).unwrap();
    assert!(!ask(&sc, 0, 4, &[2]));
    assert!(ask(&sc, 0, 4, &[]));
    // Petersen graph is 3-connected
    let pet = Graph::new(
        10,
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9), (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)],
    )
    .unwrap();
    let sc = build_scheme(&pet, &BuildConfig { f: 2, seed: 3, ..Default::default() }).unwrap();
    for s in 0..10 {
        for t in 0..10 {
            for a in 0..10 {
                for b in a + 1..10 {
                    if [a, b].contains(&s) || [a, b].contains(&t) {
                        continue;
                    }
                    assert!(ask(&sc, s, t, &[a, b]));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn random_small_graphs_never_false_connected(seed in any::<u64>(), n in 2usize..18, p in 0.05f64..0.5, f in 1usize..3) {
        let g = generate(&Model::Gnp { n, p }, seed).unwrap();
        let sc = build_scheme(&g, &BuildConfig { f, seed, ..Default::default() }).unwrap();
        let mut wrong = 0;
        let mut total = 0;
        for s in 0..n {
            for t in s + 1..n {
                for x in 0..n {
                    if x == s || x == t { continue; }
                    let want = oracle_connected(&g, s, t, &VertexSet::from_unsorted(vec![x])).unwrap();
                    let got = ask(&sc, s, t, &[x]);
                    prop_assert!(!(got && !want));
                    wrong += usize::from(got != want);
                    total += 1;
                }
            }
        }
        prop_assert!(wrong * 50 <= total.max(1), "{wrong}/{total}");
    }
}
