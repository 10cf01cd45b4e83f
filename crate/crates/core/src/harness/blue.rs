//! Color balance of the edge sequence and independence in the sparse part.
//!
//! Each inserted edge is blue when it was chosen open with no partial
//! neighbor, green otherwise, with edges promoted into triangles folded
//! into the green total at a 2:1 exchange so blue + green always equals
//! the step count. The blue share drifts from 1 toward a limit above 2/3,
//! and the blue subgraph stays sparse enough for a greedy independent set
//! to cover order sqrt(n log n) vertices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::independence;
use crate::process::ProcessState;
use crate::trajectory::solve_r;

use super::compare::RunSeries;
use super::persist::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlueRow {
    pub i: u64,
    pub t: f64,
    /// Mean of blue / (blue + green) across the series.
    pub mean_fraction: f64,
    pub predicted: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlueReport {
    pub schema: u32,
    pub n: u32,
    pub rows: Vec<BlueRow>,
    pub final_mean_fraction: f64,
    pub final_predicted: f64,
    /// Final mean minus 2/3, the floor the fraction never crosses.
    pub two_thirds_gap: f64,
}

/// Blue fraction along the shared grid against (2t + r(t)) / 3t.
pub fn blue_fraction_check(n: u32, series: &[RunSeries]) -> Result<BlueReport> {
    if series.is_empty() {
        return Err(Error::InvalidInput("no run series given".into()));
    }
    let grid: Vec<u64> = series[0].rows.iter().map(|r| r.i).collect();
    for s in &series[1..] {
        let other: Vec<u64> = s.rows.iter().map(|r| r.i).collect();
        if other != grid {
            return Err(Error::GridMismatch(format!(
                "seed {} and seed {} record different step grids",
                series[0].seed, s.seed
            )));
        }
    }
    let k = series.len() as f64;
    let mut rows = Vec::new();
    for (at, &i) in grid.iter().enumerate() {
        if i == 0 {
            continue;
        }
        let t = series[0].rows[at].t;
        let mut mean = 0.0;
        for s in series {
            let row = &s.rows[at];
            let total = (row.blue + row.green) as f64;
            mean += row.blue as f64 / total;
        }
        mean /= k;
        let predicted = (2.0 * t + solve_r(t)?) / (3.0 * t);
        rows.push(BlueRow {
            i,
            t,
            mean_fraction: mean,
            predicted,
            deviation: mean - predicted,
        });
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(
            "run table holds only the step-0 row; nothing to measure".into(),
        ));
    }
    let last = rows.last().unwrap();
    Ok(BlueReport {
        schema: SCHEMA_VERSION,
        n,
        rows: rows.clone(),
        final_mean_fraction: last.mean_fraction,
        final_predicted: last.predicted,
        two_thirds_gap: last.mean_fraction - 2.0 / 3.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceEstimate {
    pub n: u32,
    pub blue_edges: u64,
    /// Greedy independent set size in the blue subgraph.
    pub greedy: u64,
    /// Greedy size divided by sqrt(n ln n).
    pub normalized: f64,
    /// Exact optimum in the blue subgraph, computed only for small n.
    pub exact_blue: Option<u64>,
    /// Exact optimum in the whole graph, computed only for small n.
    pub exact_whole: Option<u64>,
    pub max_degree: u32,
}

const EXACT_INDEPENDENCE_N: u32 = 40;

/// Independent-set yield of the blue subgraph of a finished or paused run.
pub fn greedy_blue_independence(state: &ProcessState) -> IndependenceEstimate {
    let n = state.n();
    let blue = state.blue_edges();
    let greedy = independence::greedy_min_degree(n, &blue);
    let scale = (n as f64 * (n as f64).ln()).sqrt();
    let normalized = if scale > 0.0 {
        greedy.len() as f64 / scale
    } else {
        0.0
    };
    let (exact_blue, exact_whole) = if n <= EXACT_INDEPENDENCE_N {
        (
            Some(independence::exact_max_independent(n, &blue)),
            Some(independence::exact_max_independent(n, &state.edges())),
        )
    } else {
        (None, None)
    };
    IndependenceEstimate {
        n,
        blue_edges: blue.len() as u64,
        greedy: greedy.len() as u64,
        normalized,
        exact_blue,
        exact_whole,
        max_degree: state.max_degree(),
    }
}
