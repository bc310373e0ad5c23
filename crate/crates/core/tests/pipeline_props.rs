use proptest::prelude::*;
use tiledscan::*;

fn workload() -> impl Strategy<Value = Workload> {
    (
        1usize..600,
        1usize..5,
        0.3..2.5f64,
        0.0..0.3f64,
        any::<u64>(),
        0.4..1.6f64,
        1usize..10,
    )
        .prop_map(|(n, k, spread, noise, seed, eps, min_pts)| Workload {
            n,
            clusters: k.min(n),
            spread,
            noise,
            seed,
            grid: Some(0.25),
            eps,
            min_pts,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Grid-snapped coordinates with a half-grid radius keep every f32
    // computation exact and away from the boundary, so every variant
    // must agree with the oracle.
    #[test]
    fn every_configuration_matches_oracle(w in workload(), threads in 1usize..5) {
        let (points, params) = w.build().unwrap();
        let (expected, _) = serial_dbscan(&points, &params);
        for id in VariantId::ALL {
            for backend in MergeBackend::ALL {
                let cfg = PipelineConfig::new(id.into(), backend, threads, MemoryBudget::default()).unwrap();
                let (labels, _) = run_dbscan(&points, &params, &cfg).unwrap();
                prop_assert_eq!(first_difference(&labels, &expected).unwrap(), None, "{} {}", id, backend);
            }
        }
    }

    #[test]
    fn input_is_untouched_and_timings_match_stages(w in workload()) {
        let (points, params) = w.build().unwrap();
        let before = points.clone();
        for id in VariantId::ALL {
            let cfg = PipelineConfig::new(id.into(), MergeBackend::Iterative, 2, MemoryBudget::default()).unwrap();
            let (_, t) = run_dbscan(&points, &params, &cfg).unwrap();
            prop_assert_eq!(&points, &before);
            prop_assert_eq!(t.dist_ms.is_some(), id.materializes_distances());
            prop_assert_eq!(t.cluster_ms.is_some(), id.materializes_distances());
            prop_assert_eq!(t.fused_ms.is_some(), !id.materializes_distances());
            prop_assert!(t.total_ms >= t.kernel_ms() + t.merge_ms - 1e-9);
        }
    }
}

#[test]
fn concurrent_calls_are_independent() {
    let inputs: Vec<_> = (0..4)
        .map(|s| Workload::standard(800, s).build().unwrap())
        .collect();
    let expected: Vec<_> = inputs.iter().map(|(p, q)| serial_dbscan(p, q).0).collect();
    std::thread::scope(|scope| {
        for ((points, params), want) in inputs.iter().zip(&expected) {
            scope.spawn(move || {
                let (got, _) = run_dbscan(points, params, &PipelineConfig::default()).unwrap();
                assert!(labelings_equivalent(&got, want).unwrap());
            });
        }
    });
}

#[test]
fn materializing_variant_reports_requirement() {
    let points = generate_blobs(2000, 2, 0.5, 0.0, 1).unwrap();
    let params = DbscanParams::new(0.5, 4).unwrap();
    let budget = MemoryBudget::new(1 << 20);
    let cfg =
        PipelineConfig::new(VariantId::Soa.into(), MergeBackend::Iterative, 1, budget).unwrap();
    match run_dbscan(&points, &params, &cfg) {
        Err(Error::CapacityExceeded { required, cap }) => {
            assert_eq!(required, 2000 * 2000 * 5);
            assert_eq!(cap, 1 << 20);
        }
        other => panic!("expected CapacityExceeded, got {other:?}"),
    }
    let fused =
        PipelineConfig::new(VariantId::Fused.into(), MergeBackend::Iterative, 1, budget).unwrap();
    assert!(run_dbscan(&points, &params, &fused).is_ok());
}
