//! Multi-seed batches with deterministic aggregation.
//!
//! Seeds run independently (in parallel when worker threads are available)
//! and everything downstream, files included, is assembled in ascending
//! seed order, so the output is a pure function of the configuration.
//! The `DFP_THREADS` environment variable caps the worker count.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::ProbeValues;
use crate::process::{ProcessState, ProbeSpec, RecordRule, RunRecord, StopRule};
use crate::rng;
use crate::trajectory::{closed_form, envelopes, EnvelopeConfig};

use super::persist;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct EnsembleConfig {
    pub n: u32,
    pub seeds: Vec<u64>,
    pub stop: StopRule,
    /// Snapshot stride; None picks the default of 100 per unit time.
    pub stride: Option<u64>,
    pub probe_pairs: u32,
    pub probe_vertices: u32,
    /// Envelope parameters for the deviation bands; None picks defaults.
    pub envelope: Option<EnvelopeConfig>,
    /// When set, per-seed files and summary.json land here.
    pub out_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

pub struct EnsembleOutput {
    /// One record per seed, ascending by seed.
    pub records: Vec<RunRecord>,
    pub summary: EnsembleSummary,
}

// ============================================================================
// Summary shapes
// ============================================================================

/// Mean, sample standard deviation, and range of one observable across
/// seeds at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObsStat {
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

fn obs_stat(values: &[f64]) -> ObsStat {
    let k = values.len();
    let mean = values.iter().sum::<f64>() / k as f64;
    let var = if k > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64
    } else {
        0.0
    };
    ObsStat {
        mean,
        stddev: var.sqrt(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KindStat {
    pub mean: f64,
    pub count: u64,
}

fn kind_stat(sum: u64, count: u64) -> KindStat {
    KindStat {
        mean: if count > 0 { sum as f64 / count as f64 } else { 0.0 },
        count,
    }
}

/// Per-kind probe means at one grid point, over every contributing sample
/// (seed x probe).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProbeStats {
    pub x0: KindStat,
    pub x1: KindStat,
    pub x2: KindStat,
    pub y00: KindStat,
    pub y01: KindStat,
    pub y10: KindStat,
    pub y11: KindStat,
    pub w0: KindStat,
    pub w1: KindStat,
    pub d0: KindStat,
    pub d1: KindStat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridStat {
    pub i: u64,
    pub t: f64,
    pub q0: ObsStat,
    pub q1: ObsStat,
    pub m0: ObsStat,
    pub m1: ObsStat,
    pub blue: ObsStat,
    pub green: ObsStat,
    pub max_degree: ObsStat,
    pub max_codegree: ObsStat,
    pub probes: ProbeStats,
}

/// How often the scaled open-pair counts stayed inside the predicted band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandStat {
    pub samples: u64,
    pub inside: u64,
    pub fraction_inside: f64,
}

fn band_stat(samples: u64, inside: u64) -> BandStat {
    BandStat {
        samples,
        inside,
        fraction_inside: if samples > 0 {
            inside as f64 / samples as f64
        } else {
            1.0
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeBands {
    pub q0: BandStat,
    pub q1: BandStat,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalStats {
    pub terminated_count: u32,
    pub mean_final_i: f64,
    pub mean_final_t: f64,
    /// Mean of final_i / (sqrt(ln n) n^{3/2}); the termination constant
    /// when every run terminated.
    pub final_size_normalized_mean: f64,
    pub final_size_normalized_stderr: f64,
    pub mean_blue_fraction: f64,
    pub mean_greedy_blue_normalized: f64,
    pub max_degree: u32,
    pub max_codegree_seen: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub schema: u32,
    pub n: u32,
    pub seeds: Vec<u64>,
    pub rng_algorithm: String,
    pub stop: StopRule,
    pub stride: u64,
    pub probe_pairs: u32,
    pub probe_vertices: u32,
    pub envelope: EnvelopeConfig,
    /// Grid points present in every run, ascending by step.
    pub grid: Vec<GridStat>,
    pub bands: EnvelopeBands,
    pub finals: FinalStats,
}

// ============================================================================
// Execution
// ============================================================================

/// Runs every seed and aggregates. Seeds must be distinct; they are
/// processed (and reported) in ascending order regardless of input order.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleOutput> {
    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    if seeds.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("seeds must be distinct".into()));
    }
    let stride = cfg.stride.unwrap_or_else(|| RecordRule::default_stride(cfg.n));
    let envelope = match cfg.envelope {
        Some(e) => e,
        None => EnvelopeConfig::defaults(cfg.n)?,
    };
    let record_rule = RecordRule {
        stride,
        probes: if cfg.probe_pairs == 0 && cfg.probe_vertices == 0 {
            ProbeSpec::None
        } else {
            ProbeSpec::Random {
                pairs: cfg.probe_pairs,
                vertices: cfg.probe_vertices,
            }
        },
    };

    let run_one = |&seed: &u64| -> Result<RunRecord> {
        let mut st = ProcessState::init(cfg.n, seed)?;
        st.run(cfg.stop, &record_rule)
    };
    let records: Vec<RunRecord> = match worker_pool(seeds.len()) {
        Some(pool) => pool.install(|| seeds.par_iter().map(run_one).collect::<Result<_>>())?,
        None => seeds.par_iter().map(run_one).collect::<Result<_>>()?,
    };

    let summary = summarize(cfg, &seeds, stride, &envelope, &records)?;

    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for record in &records {
            match cfg.format {
                OutputFormat::Csv => {
                    let run_path = dir.join(format!("run_{}.csv", record.seed));
                    persist::write_text(&run_path, &persist::run_csv(record))?;
                    if !record.probe_pairs.is_empty() || !record.probe_vertices.is_empty() {
                        let probe_path = dir.join(format!("probes_{}.csv", record.seed));
                        persist::write_text(&probe_path, &persist::probe_csv(record))?;
                    }
                }
                OutputFormat::Json => {
                    let run_path = dir.join(format!("run_{}.json", record.seed));
                    persist::write_text(&run_path, &persist::to_json(record)?)?;
                }
            }
        }
        persist::write_text(&dir.join("summary.json"), &persist::to_json(&summary)?)?;
    }

    Ok(EnsembleOutput { records, summary })
}

fn worker_pool(jobs: usize) -> Option<rayon::ThreadPool> {
    let cap = std::env::var("DFP_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&c| c >= 1)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cap.min(jobs.max(1)))
        .build()
        .ok()
}

// ============================================================================
// Aggregation
// ============================================================================

fn summarize(
    cfg: &EnsembleConfig,
    seeds: &[u64],
    stride: u64,
    envelope: &EnvelopeConfig,
    records: &[RunRecord],
) -> Result<EnsembleSummary> {
    let n = cfg.n;
    let nf = n as f64;
    let n2 = nf * nf;

    // Steps present in every record.
    let mut common: Vec<u64> = records[0].snapshots.iter().map(|s| s.i).collect();
    for record in &records[1..] {
        let set: std::collections::HashSet<u64> =
            record.snapshots.iter().map(|s| s.i).collect();
        common.retain(|i| set.contains(i));
    }

    let mut grid = Vec::with_capacity(common.len());
    let mut q0_samples = 0u64;
    let mut q0_inside = 0u64;
    let mut q1_samples = 0u64;
    let mut q1_inside = 0u64;

    for &i in &common {
        let t = crate::process::scaled_time(i, n);
        let snaps: Vec<_> = records
            .iter()
            .map(|r| {
                let at = r
                    .snapshots
                    .binary_search_by_key(&i, |s| s.i)
                    .expect("common step present in every record");
                &r.snapshots[at]
            })
            .collect();

        let pull = |f: &dyn Fn(&crate::observables::Snapshot) -> f64| -> Vec<f64> {
            snaps.iter().map(|s| f(s)).collect()
        };
        let mut probes = ProbeAccum::default();
        for s in &snaps {
            probes.add_snapshot(s);
        }

        let point = closed_form(t)?;
        let env = envelopes(t, envelope);
        // The exact start dominates the curve at i = 0.
        let (q0_ref, q1_ref) = if i == 0 {
            (nf * (nf - 1.0) / 2.0 / n2, 0.0)
        } else {
            (point.q0, point.q1)
        };
        for s in &snaps {
            q0_samples += 1;
            if (s.q0 as f64 / n2 - q0_ref).abs() <= env.delta_q {
                q0_inside += 1;
            }
            q1_samples += 1;
            if (s.q1 as f64 / n2 - q1_ref).abs() <= env.delta_q {
                q1_inside += 1;
            }
        }

        grid.push(GridStat {
            i,
            t,
            q0: obs_stat(&pull(&|s| s.q0 as f64)),
            q1: obs_stat(&pull(&|s| s.q1 as f64)),
            m0: obs_stat(&pull(&|s| s.m0 as f64)),
            m1: obs_stat(&pull(&|s| s.m1 as f64)),
            blue: obs_stat(&pull(&|s| s.blue as f64)),
            green: obs_stat(&pull(&|s| s.green as f64)),
            max_degree: obs_stat(&pull(&|s| s.max_degree as f64)),
            max_codegree: obs_stat(&pull(&|s| s.max_codegree as f64)),
            probes: probes.finish(),
        });
    }

    let norm = (nf.ln()).sqrt() * nf.powf(1.5);
    let per_seed_c: Vec<f64> = records
        .iter()
        .map(|r| r.summary.final_i as f64 / norm)
        .collect();
    let c_stat = obs_stat(&per_seed_c);
    let k = records.len() as f64;
    let finals = FinalStats {
        terminated_count: records.iter().filter(|r| r.summary.terminated).count() as u32,
        mean_final_i: records
            .iter()
            .map(|r| r.summary.final_i as f64)
            .sum::<f64>()
            / k,
        mean_final_t: records.iter().map(|r| r.summary.final_t).sum::<f64>() / k,
        final_size_normalized_mean: c_stat.mean,
        final_size_normalized_stderr: if records.len() > 1 {
            c_stat.stddev / k.sqrt()
        } else {
            0.0
        },
        mean_blue_fraction: records
            .iter()
            .map(|r| {
                let total = r.summary.blue + r.summary.green;
                if total > 0 {
                    r.summary.blue as f64 / total as f64
                } else {
                    0.0
                }
            })
            .sum::<f64>()
            / k,
        mean_greedy_blue_normalized: records
            .iter()
            .map(|r| r.summary.greedy_blue_normalized)
            .sum::<f64>()
            / k,
        max_degree: records.iter().map(|r| r.summary.max_degree).max().unwrap_or(0),
        max_codegree_seen: records
            .iter()
            .map(|r| r.summary.max_codegree_seen)
            .max()
            .unwrap_or(0),
    };

    Ok(EnsembleSummary {
        schema: persist::SCHEMA_VERSION,
        n,
        seeds: seeds.to_vec(),
        rng_algorithm: rng::ALGORITHM_ID.to_string(),
        stop: cfg.stop,
        stride,
        probe_pairs: cfg.probe_pairs,
        probe_vertices: cfg.probe_vertices,
        envelope: *envelope,
        grid,
        bands: EnvelopeBands {
            q0: band_stat(q0_samples, q0_inside),
            q1: band_stat(q1_samples, q1_inside),
        },
        finals,
    })
}

#[derive(Default)]
struct ProbeAccum {
    sums: [u64; 11],
    counts: [u64; 11],
}

impl ProbeAccum {
    fn add(&mut self, slot: usize, value: u64) {
        self.sums[slot] += value;
        self.counts[slot] += 1;
    }

    fn add_snapshot(&mut self, s: &crate::observables::Snapshot) {
        for p in &s.pair_probes {
            match p.values {
                ProbeValues::Full(o) => {
                    self.add(0, o.x0);
                    self.add(1, o.x1);
                    self.add(2, o.x2);
                    self.add(3, o.y00);
                    self.add(4, o.y01);
                    self.add(5, o.y10);
                    self.add(6, o.y11);
                }
                ProbeValues::EdgeTracked { x0, y00 } => {
                    self.add(0, x0);
                    self.add(3, y00);
                }
                ProbeValues::Stopped => {}
            }
        }
        for v in &s.vertex_probes {
            self.add(7, v.values.w0);
            self.add(8, v.values.w1);
            self.add(9, v.values.d0);
            self.add(10, v.values.d1);
        }
    }

    fn finish(&self) -> ProbeStats {
        let get = |j: usize| kind_stat(self.sums[j], self.counts[j]);
        ProbeStats {
            x0: get(0),
            x1: get(1),
            x2: get(2),
            y00: get(3),
            y01: get(4),
            y10: get(5),
            y11: get(6),
            w0: get(7),
            w1: get(8),
            d0: get(9),
            d1: get(10),
        }
    }
}
