mod common;

use proptest::prelude::*;
use tiledscan::*;

use common::bfs_components;

fn grid_instance(max_n: usize) -> impl Strategy<Value = (PointSet, DbscanParams)> {
    (
        prop::collection::vec(
            prop::array::uniform3((-5i32..=5).prop_map(|v| v as f64 * 0.5)),
            1..=max_n,
        ),
        prop_oneof![Just(0.5), Just(1.0), 0.2..2.0f64],
        1usize..6,
    )
        .prop_map(|(p, eps, m)| {
            (
                PointSet::new(p).unwrap(),
                DbscanParams::new(eps, m).unwrap(),
            )
        })
}

fn stage_two(points: &PointSet, params: &DbscanParams) -> (NeighborhoodMatrix, ValidVector) {
    fused_build(
        points,
        params,
        &VariantId::Fused.into(),
        1,
        &MemoryBudget::default(),
    )
    .unwrap()
}

fn symmetric_adjacency(max_m: usize) -> impl Strategy<Value = CoreAdjacency> {
    (0..=max_m, 0.0..0.1f64, any::<u64>()).prop_map(|(m, p, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut e = vec![false; m * m];
        for a in 0..m {
            e[a * m + a] = true;
            for b in a + 1..m {
                let on = rng.random_bool(p);
                e[a * m + b] = on;
                e[b * m + a] = on;
            }
        }
        CoreAdjacency::from_fn(m, |a, b| e[a * m + b])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn backends_agree_with_oracle((points, params) in grid_instance(120), threads in 1usize..5) {
        let (bits, valid) = stage_two(&points, &params);
        let (expected, _) = serial_dbscan(&points, &params);
        let iterative = merge_iterative(&bits, &valid, threads).unwrap();
        let warshall = merge_warshall(&bits, &valid, threads).unwrap();
        prop_assert_eq!(&canonicalize(&iterative), &expected);
        prop_assert_eq!(&canonicalize(&warshall), &expected);
    }

    #[test]
    fn merge_is_monotone((points, params) in grid_instance(120), threads in 1usize..5) {
        let (bits, valid) = stage_two(&points, &params);
        let (_, audit, state) = merge_iterative_audited(&bits, &valid, threads).unwrap();
        prop_assert_eq!(audit.bits_cleared, 0);
        prop_assert_eq!(audit.valid_revived, 0);
        prop_assert_eq!(audit.valid_cleared as usize, audit.merges);
        // Final rows still contain every original bit.
        for i in 0..points.len() {
            for (o, f) in bits.row_words(i).iter().zip(state.row(i)) {
                prop_assert_eq!(o & !f, 0);
            }
        }
    }

    #[test]
    fn surviving_rows_partition_cores((points, params) in grid_instance(120)) {
        let (bits, valid) = stage_two(&points, &params);
        let (_, _, state) = merge_iterative_audited(&bits, &valid, 2).unwrap();
        let surviving = state.surviving();
        for c in valid.indices() {
            let holders = surviving.iter().filter(|&&r| state.row(r)[c / 64] >> (c % 64) & 1 == 1).count();
            prop_assert_eq!(holders, 1, "core {}", c);
        }
        prop_assert!(surviving.iter().all(|&r| valid.is_valid(r) && state.valid().is_valid(r)));
    }

    #[test]
    fn iterative_ignores_thread_count((points, params) in grid_instance(150)) {
        let (bits, valid) = stage_two(&points, &params);
        let one = merge_iterative(&bits, &valid, 1).unwrap();
        for t in 2..6 {
            prop_assert_eq!(&merge_iterative(&bits, &valid, t).unwrap(), &one);
        }
    }

    #[test]
    fn core_adjacency_is_symmetric((points, params) in grid_instance(120)) {
        let (bits, valid) = stage_two(&points, &params);
        let adj = build_core_adjacency(&bits, &valid);
        let cores: Vec<usize> = valid.indices().collect();
        prop_assert_eq!(adj.cores(), cores.as_slice());
        for a in 0..adj.m() {
            prop_assert!(adj.get(a, a));
            for b in 0..adj.m() {
                prop_assert_eq!(adj.get(a, b), adj.get(b, a));
                prop_assert_eq!(adj.get(a, b), bits.get(adj.cores()[a], adj.cores()[b]));
            }
        }
    }

    #[test]
    fn closure_is_idempotent(adj in symmetric_adjacency(200), threads in 1usize..4) {
        let once = warshall_closure(&adj, threads);
        let twice = warshall_closure(&once, threads);
        prop_assert_eq!(&once, &twice);
    }

    #[test]
    fn closure_matches_graph_search(adj in symmetric_adjacency(200), threads in 1usize..4) {
        let m = adj.m();
        let closed = warshall_closure(&adj, threads);
        let comp = bfs_components(m, |a, b| adj.get(a, b));
        for a in 0..m {
            for b in 0..m {
                prop_assert_eq!(closed.get(a, b), comp[a] == comp[b]);
            }
        }
    }
}

#[test]
fn three_blobs_merge_to_three_clusters() {
    let points = generate_blobs(1000, 3, 0.05, 0.1, 42).unwrap();
    let params = DbscanParams::new(0.2, 5).unwrap();
    let (bits, valid) = fused_build_algebraic(
        &points,
        &params,
        &VariantId::FusedAlgebraic.into(),
        2,
        &MemoryBudget::default(),
    )
    .unwrap();
    let (expected, _) = serial_dbscan(&points, &params);
    let w = merge_warshall(&bits, &valid, 2).unwrap();
    let i = merge_iterative(&bits, &valid, 2).unwrap();
    assert_eq!(w.cluster_count(), 3);
    assert!(labelings_equivalent(&w, &expected).unwrap());
    assert!(labelings_equivalent(&i, &expected).unwrap());
}
