use std::io::Write;

use tiledscan::{
    available_threads, first_difference, run_dbscan, serial_dbscan, Error, KernelVariant,
    MemoryBudget, MergeBackend, PipelineConfig, StageTimings, VariantId, Workload,
};

use crate::report::{BenchReport, BenchRow, Environment, SerialProfile, SizeReport, Skipped};
use crate::{BenchArgs, CliError};

// Keeps ratios finite for stages too fast for the clock.
const MIN_MS: f64 = 1e-6;

fn pos(ms: f64) -> f64 {
    ms.max(MIN_MS)
}

fn or_default<T: Copy>(given: &[T], all: &[T]) -> Vec<T> {
    if given.is_empty() {
        all.to_vec()
    } else {
        given.to_vec()
    }
}

/// Runs the oracle once per size and each combination `repeats` times,
/// keeping the fastest run. Any labeling that differs from the oracle
/// aborts the whole benchmark.
pub fn run_bench(args: &BenchArgs, log: &mut dyn Write) -> Result<BenchReport, CliError> {
    if args.sizes.is_empty() {
        return Err(CliError::Usage("--sizes needs at least one size".into()));
    }
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    if !(args.grid >= 0.0 && args.grid.is_finite()) {
        return Err(CliError::Usage("--grid must be a finite value >= 0".into()));
    }
    let threads = or_default(&args.threads, &[available_threads()]);
    if threads.contains(&0) {
        return Err(CliError::Usage(
            "--threads values must be at least 1".into(),
        ));
    }
    let variants = or_default(&args.variants, &VariantId::ALL);
    let backends = or_default(&args.backends, &MergeBackend::ALL);
    for &id in &variants {
        KernelVariant::new(id, args.tile, args.unroll)?;
    }
    let budget = MemoryBudget::from_env()?;
    let grid = (args.grid > 0.0).then_some(args.grid);

    let mut sizes = Vec::new();
    for &n in &args.sizes {
        let workload = Workload {
            n,
            clusters: args.clusters,
            spread: args.spread,
            noise: args.noise,
            seed: args.seed,
            grid,
            eps: args.eps,
            min_pts: args.minpts,
        };
        let (points, params) = workload.build()?;
        let (expected, trace) = serial_dbscan(&points, &params);
        let serial = SerialProfile::new(
            format!("{:?}", trace.storage),
            pos(trace.dist_sq_ms),
            pos(trace.cluster_build_ms),
            pos(trace.merge_ms),
        );
        let _ = writeln!(
            log,
            "n={n} eps={} serial: dist {:.1} ms ({:.1}%), cluster {:.1} ms ({:.1}%), merge {:.1} ms ({:.1}%)",
            params.eps(),
            serial.dist_ms,
            serial.dist_pct,
            serial.cluster_ms,
            serial.cluster_pct,
            serial.merge_ms,
            serial.merge_pct
        );

        let mut rows = Vec::new();
        let mut skipped = Vec::new();
        for &t in &threads {
            for &id in &variants {
                for &backend in &backends {
                    let variant = KernelVariant::new(id, args.tile, args.unroll)?;
                    let config = PipelineConfig::new(variant, backend, t, budget)?;
                    let mut best: Option<StageTimings> = None;
                    for _ in 0..args.repeats {
                        let (labels, timings) = match run_dbscan(&points, &params, &config) {
                            Ok(r) => r,
                            Err(Error::CapacityExceeded { required, cap }) => {
                                skipped.push(Skipped {
                                    variant: id.name().into(),
                                    merge_backend: backend.name().into(),
                                    threads: t,
                                    required_bytes: required,
                                    cap_bytes: cap,
                                });
                                let _ = writeln!(log, "n={n} {id}/{backend}/{t}: skipped, needs {required} bytes > cap {cap}");
                                break;
                            }
                            Err(e) => return Err(e.into()),
                        };
                        if let Some(index) = first_difference(&labels, &expected)? {
                            return Err(CliError::Mismatch {
                                size: n,
                                variant: id,
                                backend,
                                threads: t,
                                index,
                            });
                        }
                        if best.is_none_or(|b| timings.total_ms < b.total_ms) {
                            best = Some(timings);
                        }
                    }
                    let Some(b) = best else { continue };
                    let row = BenchRow {
                        data_size: n,
                        variant: id.name().into(),
                        merge_backend: backend.name().into(),
                        threads: t,
                        tile_size: variant.tile_size(),
                        unroll_width: variant.unroll_width(),
                        dist_ms: b.dist_ms.map(pos),
                        cluster_ms: b.cluster_ms.map(pos),
                        fused_ms: b.fused_ms.map(pos),
                        kernel_ms: pos(b.kernel_ms()),
                        merge_ms: pos(b.merge_ms),
                        total_ms: pos(b.total_ms),
                        kernel_speedup_vs_serial: (serial.dist_ms + serial.cluster_ms)
                            / pos(b.kernel_ms()),
                        speedup_vs_serial: serial.total_ms / pos(b.total_ms),
                        speedup_vs_baseline_variant: None,
                        equivalent: true,
                    };
                    let _ = writeln!(
                        log,
                        "n={n} {id}/{backend}/{t}: kernel {:.1} ms, merge {:.1} ms, total {:.1} ms, {:.2}x serial",
                        row.kernel_ms, row.merge_ms, row.total_ms, row.speedup_vs_serial
                    );
                    rows.push(row);
                }
            }
        }
        let baseline_totals: Vec<(String, usize, f64)> = rows
            .iter()
            .filter(|r| r.variant == VariantId::Baseline.name())
            .map(|r| (r.merge_backend.clone(), r.threads, r.total_ms))
            .collect();
        for row in &mut rows {
            row.speedup_vs_baseline_variant = baseline_totals
                .iter()
                .find(|(b, t, _)| *b == row.merge_backend && *t == row.threads)
                .map(|(_, _, base)| base / row.total_ms);
        }
        sizes.push(SizeReport {
            data_size: n,
            eps: params.eps(),
            min_pts: params.min_pts(),
            clusters_found: expected.cluster_count(),
            noise_points: expected.noise_count(),
            serial,
            rows,
            skipped,
        });
    }

    Ok(BenchReport {
        environment: Environment {
            hardware_threads: available_threads(),
            kernel_float_bits: 32,
            oracle_float_bits: 64,
            memory_cap_bytes: budget.cap(),
            repeats: args.repeats,
            timing: format!(
                "minimum over {} repeats; oracle run once per size",
                args.repeats
            ),
            seed: args.seed,
            clusters: args.clusters,
            spread: args.spread,
            noise: args.noise,
            grid,
        },
        sizes,
    })
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report = run_bench(args, out)?;
    report.write(&args.report, args.format)?;
    let rows: usize = report.sizes.iter().map(|s| s.rows.len()).sum();
    let skipped: usize = report.sizes.iter().map(|s| s.skipped.len()).sum();
    writeln!(
        out,
        "wrote {} ({rows} rows, {skipped} skipped by the memory cap)",
        args.report.display()
    )
    .map_err(Error::from)?;
    Ok(())
}
