//! Benchmark report and its CSV/JSON encodings. Both encodings carry the
//! same values and decode back to an identical [`BenchReport`].
//!
//! CSV layout: `#` comment lines hold the environment, one `size` line and
//! one `serial` line per dataset size and any `skipped` lines, followed by
//! a header and one row per timed combination.

use std::fmt::Display;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{CliError, ReportFormat};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub hardware_threads: usize,
    pub kernel_float_bits: u32,
    pub oracle_float_bits: u32,
    pub memory_cap_bytes: u64,
    pub repeats: usize,
    /// Every timing is the minimum over `repeats` runs.
    pub timing: String,
    pub seed: u64,
    pub clusters: usize,
    pub spread: f64,
    pub noise: f64,
    pub grid: Option<f64>,
}

/// Serial oracle stage breakdown. Percentages are of `total_ms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerialProfile {
    pub storage: String,
    pub dist_ms: f64,
    pub dist_pct: f64,
    pub cluster_ms: f64,
    pub cluster_pct: f64,
    pub merge_ms: f64,
    pub merge_pct: f64,
    pub total_ms: f64,
}

impl SerialProfile {
    pub fn new(storage: String, dist_ms: f64, cluster_ms: f64, merge_ms: f64) -> Self {
        let total_ms = dist_ms + cluster_ms + merge_ms;
        let pct = |v: f64| v / total_ms * 100.0;
        SerialProfile {
            storage,
            dist_ms,
            dist_pct: pct(dist_ms),
            cluster_ms,
            cluster_pct: pct(cluster_ms),
            merge_ms,
            merge_pct: pct(merge_ms),
            total_ms,
        }
    }

    pub fn pct_sum(&self) -> f64 {
        self.dist_pct + self.cluster_pct + self.merge_pct
    }
}

/// One timed variant/backend/threads combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub data_size: usize,
    pub variant: String,
    pub merge_backend: String,
    pub threads: usize,
    pub tile_size: usize,
    pub unroll_width: usize,
    pub dist_ms: Option<f64>,
    pub cluster_ms: Option<f64>,
    pub fused_ms: Option<f64>,
    pub kernel_ms: f64,
    pub merge_ms: f64,
    pub total_ms: f64,
    /// Serial distance + cluster time over this row's kernel time.
    pub kernel_speedup_vs_serial: f64,
    /// Serial total over this row's total.
    pub speedup_vs_serial: f64,
    /// Baseline variant's total (same backend and threads) over this row's.
    pub speedup_vs_baseline_variant: Option<f64>,
    pub equivalent: bool,
}

/// A combination refused by the memory guard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub variant: String,
    pub merge_backend: String,
    pub threads: usize,
    pub required_bytes: u64,
    pub cap_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub data_size: usize,
    pub eps: f64,
    pub min_pts: usize,
    pub clusters_found: usize,
    pub noise_points: usize,
    pub serial: SerialProfile,
    pub rows: Vec<BenchRow>,
    pub skipped: Vec<Skipped>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub environment: Environment,
    pub sizes: Vec<SizeReport>,
}

fn opt<T: Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), T::to_string)
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Report(msg.into())
}

/// `key=value` pairs from one comment line.
struct Fields<'a>(Vec<(&'a str, &'a str)>);

impl<'a> Fields<'a> {
    fn parse(text: &'a str) -> Result<Self, CliError> {
        text.split_whitespace()
            .map(|kv| {
                kv.split_once('=')
                    .ok_or_else(|| bad(format!("malformed field `{kv}`")))
            })
            .collect::<Result<_, _>>()
            .map(Fields)
    }

    fn raw(&self, key: &str) -> Result<&'a str, CliError> {
        self.0
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| bad(format!("missing field `{key}`")))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        let v = self.raw(key)?;
        v.parse()
            .map_err(|_| bad(format!("bad value `{v}` for `{key}`")))
    }

    fn get_opt<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key)? {
            "none" => Ok(None),
            _ => self.get(key).map(Some),
        }
    }
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let e = &self.environment;
        let mut out = String::from("# tiledscan bench report\n");
        out += &format!(
            "# environment hardware_threads={} kernel_float_bits={} oracle_float_bits={} memory_cap_bytes={} \
             repeats={} seed={} clusters={} spread={} noise={} grid={}\n",
            e.hardware_threads,
            e.kernel_float_bits,
            e.oracle_float_bits,
            e.memory_cap_bytes,
            e.repeats,
            e.seed,
            e.clusters,
            e.spread,
            e.noise,
            opt(&e.grid)
        );
        out += &format!("# timing {}\n", e.timing);
        for s in &self.sizes {
            out += &format!(
                "# size data_size={} eps={} min_pts={} clusters_found={} noise_points={}\n",
                s.data_size, s.eps, s.min_pts, s.clusters_found, s.noise_points
            );
            let p = &s.serial;
            out += &format!(
                "# serial data_size={} storage={} dist_ms={} dist_pct={} cluster_ms={} cluster_pct={} \
                 merge_ms={} merge_pct={} total_ms={}\n",
                s.data_size,
                p.storage,
                p.dist_ms,
                p.dist_pct,
                p.cluster_ms,
                p.cluster_pct,
                p.merge_ms,
                p.merge_pct,
                p.total_ms
            );
            for k in &s.skipped {
                out += &format!(
                    "# skipped data_size={} variant={} merge_backend={} threads={} required_bytes={} cap_bytes={}\n",
                    s.data_size, k.variant, k.merge_backend, k.threads, k.required_bytes, k.cap_bytes
                );
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut wrote_header = false;
        for row in self.sizes.iter().flat_map(|s| &s.rows) {
            w.serialize(row).expect("row serializes");
            wrote_header = true;
        }
        if !wrote_header {
            w.write_record(CSV_HEADER).expect("header writes");
        }
        out += std::str::from_utf8(&w.into_inner().expect("in-memory writer")).expect("utf-8");
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut environment = None;
        let mut timing = None;
        let mut sizes: Vec<SizeReport> = Vec::new();
        let find = |sizes: &mut Vec<SizeReport>, n: usize| -> Result<usize, CliError> {
            sizes
                .iter()
                .position(|s| s.data_size == n)
                .ok_or_else(|| bad(format!("no size line for {n}")))
        };
        for line in text.lines().filter_map(|l| l.strip_prefix("# ")) {
            let (kind, rest) = line.split_once(' ').unwrap_or((line, ""));
            match kind {
                "environment" => {
                    let f = Fields::parse(rest)?;
                    environment = Some(Environment {
                        hardware_threads: f.get("hardware_threads")?,
                        kernel_float_bits: f.get("kernel_float_bits")?,
                        oracle_float_bits: f.get("oracle_float_bits")?,
                        memory_cap_bytes: f.get("memory_cap_bytes")?,
                        repeats: f.get("repeats")?,
                        timing: String::new(),
                        seed: f.get("seed")?,
                        clusters: f.get("clusters")?,
                        spread: f.get("spread")?,
                        noise: f.get("noise")?,
                        grid: f.get_opt("grid")?,
                    })
                }
                "timing" => timing = Some(rest.to_string()),
                "size" => {
                    let f = Fields::parse(rest)?;
                    sizes.push(SizeReport {
                        data_size: f.get("data_size")?,
                        eps: f.get("eps")?,
                        min_pts: f.get("min_pts")?,
                        clusters_found: f.get("clusters_found")?,
                        noise_points: f.get("noise_points")?,
                        serial: SerialProfile::new(String::new(), 0.0, 0.0, 0.0),
                        rows: Vec::new(),
                        skipped: Vec::new(),
                    });
                }
                "serial" => {
                    let f = Fields::parse(rest)?;
                    let i = find(&mut sizes, f.get("data_size")?)?;
                    sizes[i].serial = SerialProfile {
                        storage: f.get("storage")?,
                        dist_ms: f.get("dist_ms")?,
                        dist_pct: f.get("dist_pct")?,
                        cluster_ms: f.get("cluster_ms")?,
                        cluster_pct: f.get("cluster_pct")?,
                        merge_ms: f.get("merge_ms")?,
                        merge_pct: f.get("merge_pct")?,
                        total_ms: f.get("total_ms")?,
                    };
                }
                "skipped" => {
                    let f = Fields::parse(rest)?;
                    let i = find(&mut sizes, f.get("data_size")?)?;
                    sizes[i].skipped.push(Skipped {
                        variant: f.get("variant")?,
                        merge_backend: f.get("merge_backend")?,
                        threads: f.get("threads")?,
                        required_bytes: f.get("required_bytes")?,
                        cap_bytes: f.get("cap_bytes")?,
                    });
                }
                _ => {}
            }
        }
        let mut environment = environment.ok_or_else(|| bad("missing environment line"))?;
        environment.timing = timing.ok_or_else(|| bad("missing timing line"))?;

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        for row in reader.deserialize::<BenchRow>() {
            let row = row.map_err(|e| bad(e.to_string()))?;
            let i = find(&mut sizes, row.data_size)?;
            sizes[i].rows.push(row);
        }
        Ok(BenchReport { environment, sizes })
    }

    pub fn encode(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        }
    }

    pub fn decode(text: &str, format: ReportFormat) -> Result<Self, CliError> {
        match format {
            ReportFormat::Csv => Self::from_csv(text),
            ReportFormat::Json => Self::from_json(text),
        }
    }

    pub fn write(&self, path: &Path, format: ReportFormat) -> Result<(), CliError> {
        std::fs::write(path, self.encode(format)).map_err(|e| CliError::Core(e.into()))
    }
}

const CSV_HEADER: [&str; 16] = [
    "data_size",
    "variant",
    "merge_backend",
    "threads",
    "tile_size",
    "unroll_width",
    "dist_ms",
    "cluster_ms",
    "fused_ms",
    "kernel_ms",
    "merge_ms",
    "total_ms",
    "kernel_speedup_vs_serial",
    "speedup_vs_serial",
    "speedup_vs_baseline_variant",
    "equivalent",
];
