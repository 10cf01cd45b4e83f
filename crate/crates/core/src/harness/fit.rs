//! Final size scaling across graph orders.
//!
//! Runs batches to termination at several n and normalizes the final edge
//! count by sqrt(ln n) n^{3/2}. If that scale is right, the normalized
//! constant is flat in n; the report exposes the per-n constants and the
//! spread ratio so a drift would show up directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::StopRule;

use super::ensemble::{run_ensemble, EnsembleConfig, OutputFormat};
use super::persist::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub n_list: Vec<u32>,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitEntry {
    pub n: u32,
    pub seeds: u64,
    pub mean_final: f64,
    pub min_final: u64,
    pub max_final: u64,
    /// Mean final edge count over sqrt(ln n) n^{3/2}.
    pub c: f64,
    pub c_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema: u32,
    pub entries: Vec<FitEntry>,
    /// Largest normalized constant over the smallest.
    pub c_max_over_min: f64,
}

pub fn fit_final_size(cfg: &FitConfig) -> Result<FitReport> {
    if cfg.n_list.is_empty() {
        return Err(Error::InvalidParameter("empty n list".into()));
    }
    let mut n_list = cfg.n_list.clone();
    n_list.sort_unstable();
    n_list.dedup();

    let mut entries = Vec::with_capacity(n_list.len());
    for &n in &n_list {
        let batch = EnsembleConfig {
            n,
            seeds: cfg.seeds.clone(),
            stop: StopRule::ToTermination,
            stride: Some(0),
            probe_pairs: 0,
            probe_vertices: 0,
            envelope: None,
            out_dir: None,
            format: OutputFormat::Csv,
        };
        let out = run_ensemble(&batch)?;
        let finals: Vec<u64> = out
            .records
            .iter()
            .map(|r| r.summary.blue + r.summary.green)
            .collect();
        let k = finals.len() as f64;
        let scale = (n as f64).ln().sqrt() * (n as f64).powf(1.5);
        let cs: Vec<f64> = finals.iter().map(|&m| m as f64 / scale).collect();
        let c = cs.iter().sum::<f64>() / k;
        let c_stderr = if finals.len() > 1 {
            let var = cs.iter().map(|v| (v - c) * (v - c)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        } else {
            0.0
        };
        entries.push(FitEntry {
            n,
            seeds: finals.len() as u64,
            mean_final: finals.iter().sum::<u64>() as f64 / k,
            min_final: *finals.iter().min().unwrap(),
            max_final: *finals.iter().max().unwrap(),
            c,
            c_stderr,
        });
    }
    let c_min = entries.iter().map(|e| e.c).fold(f64::INFINITY, f64::min);
    let c_max = entries.iter().map(|e| e.c).fold(0.0, f64::max);
    Ok(FitReport {
        schema: SCHEMA_VERSION,
        entries,
        c_max_over_min: c_max / c_min,
    })
}
