use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;
use tiledscan::{
    available_threads, build_clusters_from_dist, dist_baseline, dist_soa, dist_tiled, fused_build,
    fused_build_algebraic, serial_dbscan, KernelVariant, MemoryBudget, VariantId,
};
use tiledscan_bench::workload;

// Kept well below the report sizes so a full sweep stays in memory and
// finishes in minutes; `tiledscan bench` covers the large sizes.
const SIZES: [usize; 2] = [2048, 5061];

fn ladder(c: &mut Criterion) {
    let threads = available_threads();
    let budget = MemoryBudget::default();
    let mut group = c.benchmark_group("kernel_ladder");
    group.sample_size(10);
    for n in SIZES {
        let (points, params) = workload(n);
        group.throughput(Throughput::Elements((n * n) as u64));
        group.bench_with_input(BenchmarkId::new("baseline", n), &n, |b, _| {
            b.iter(|| {
                let d = dist_baseline(black_box(&points), threads, &budget).unwrap();
                build_clusters_from_dist(&d, &params, threads)
            })
        });
        group.bench_with_input(BenchmarkId::new("soa", n), &n, |b, _| {
            b.iter(|| {
                let d = dist_soa(black_box(&points), threads, &budget).unwrap();
                build_clusters_from_dist(&d, &params, threads)
            })
        });
        for id in [VariantId::Tiled, VariantId::TiledUnrolled] {
            let v = KernelVariant::from(id);
            group.bench_with_input(BenchmarkId::new(id.name(), n), &n, |b, _| {
                b.iter(|| {
                    let d = dist_tiled(black_box(&points), &v, threads, &budget).unwrap();
                    build_clusters_from_dist(&d, &params, threads)
                })
            });
        }
        let fused = KernelVariant::from(VariantId::Fused);
        group.bench_with_input(BenchmarkId::new("fused", n), &n, |b, _| {
            b.iter(|| fused_build(black_box(&points), &params, &fused, threads, &budget).unwrap())
        });
        let alg = KernelVariant::from(VariantId::FusedAlgebraic);
        group.bench_with_input(BenchmarkId::new("fused-algebraic", n), &n, |b, _| {
            b.iter(|| {
                fused_build_algebraic(black_box(&points), &params, &alg, threads, &budget).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("serial", n), &n, |b, _| {
            b.iter(|| serial_dbscan(black_box(&points), &params))
        });
    }
    group.finish();
}

fn unroll_widths(c: &mut Criterion) {
    let threads = available_threads();
    let budget = MemoryBudget::default();
    let (points, params) = workload(4096);
    let mut group = c.benchmark_group("unroll_width");
    group.sample_size(10);
    for unroll in [1, 8, 16, 32, 64] {
        let v = KernelVariant::new(VariantId::Fused, 256, unroll).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(unroll), &unroll, |b, _| {
            b.iter(|| fused_build(black_box(&points), &params, &v, threads, &budget).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ladder, unroll_widths);
criterion_main!(benches);
