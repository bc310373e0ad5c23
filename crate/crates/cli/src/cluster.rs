use std::io::Write;

use tiledscan::{
    available_threads, load_points, run_dbscan, serial_dbscan, write_labels, KernelVariant,
    Labeling, MemoryBudget, PipelineConfig,
};

use crate::{CliError, ClusterArgs, VariantChoice};

fn fmt_ms(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

pub fn cmd_cluster(args: &ClusterArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = tiledscan::validate_params(args.eps, args.minpts)?;
    let threads = args.threads.unwrap_or_else(available_threads);
    let budget = MemoryBudget::from_env()?;
    let points = load_points(&args.input)?;

    let (labels, summary): (Labeling, String) = match args.variant {
        VariantChoice::Serial => {
            let (labels, t) = serial_dbscan(&points, &params);
            let line = format!(
                "variant=serial merge=serial threads=1 dist_ms={:.3} cluster_ms={:.3} fused_ms=- merge_ms={:.3} total_ms={:.3}",
                t.dist_sq_ms,
                t.cluster_build_ms,
                t.merge_ms,
                t.total_ms()
            );
            (labels, line)
        }
        VariantChoice::Kernel(id) => {
            let variant = KernelVariant::new(id, args.tile, args.unroll)?;
            let config = PipelineConfig::new(variant, args.merge, threads, budget)?;
            let (labels, t) = run_dbscan(&points, &params, &config)?;
            let line = format!(
                "variant={id} merge={} threads={threads} dist_ms={} cluster_ms={} fused_ms={} merge_ms={:.3} total_ms={:.3}",
                args.merge,
                fmt_ms(t.dist_ms),
                fmt_ms(t.cluster_ms),
                fmt_ms(t.fused_ms),
                t.merge_ms,
                t.total_ms
            );
            (labels, line)
        }
    };
    write_labels(&labels, &args.output)?;
    writeln!(
        out,
        "n={} {summary} clusters={} noise={}",
        points.len(),
        labels.cluster_count(),
        labels.noise_count()
    )
    .map_err(tiledscan::Error::from)?;
    Ok(())
}
