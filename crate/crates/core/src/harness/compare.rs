//! Empirical runs against the predicted trajectory.
//!
//! Counts are normalized by their natural scales (n^2 for open-pair counts,
//! n^{3/2} for edges, n for per-pair and per-vertex pair counts, sqrt(n)
//! for degrees and y-type counts) and set against the curve values on the
//! shared time grid, with envelope bands recomputed from the supplied
//! configuration. At step 0 the exact initial counts replace the curve so
//! the comparison starts from a true baseline.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::RunRecord;
use crate::trajectory::{envelopes, EnvelopeConfig};

use super::persist::{self, ProbeKind, ProbeRow, RunRow, TrajectoryRow};

/// One run's tables, as parsed from disk or lifted from a record.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSeries {
    pub seed: u64,
    pub rows: Vec<RunRow>,
    pub probes: Vec<ProbeRow>,
}

impl RunSeries {
    pub fn from_record(record: &RunRecord) -> RunSeries {
        RunSeries {
            seed: record.seed,
            rows: persist::run_rows(record),
            probes: persist::probe_rows(record),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub empirical: f64,
    pub predicted: f64,
    /// (empirical - predicted) / predicted; absent when the prediction is
    /// zero but the measurement is not.
    pub relative: Option<f64>,
}

fn deviation(empirical: f64, predicted: f64) -> Deviation {
    let relative = if predicted != 0.0 {
        Some((empirical - predicted) / predicted)
    } else if empirical == 0.0 {
        Some(0.0)
    } else {
        None
    };
    Deviation {
        empirical,
        predicted,
        relative,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub i: u64,
    pub t: f64,
    pub q0: Deviation,
    pub q1: Deviation,
    pub e0: Deviation,
    pub x0: Option<Deviation>,
    pub x1: Option<Deviation>,
    pub x2: Option<Deviation>,
    pub y00: Option<Deviation>,
    pub y01: Option<Deviation>,
    pub y10: Option<Deviation>,
    pub y11: Option<Deviation>,
    pub w0: Option<Deviation>,
    pub w1: Option<Deviation>,
    pub d0: Option<Deviation>,
    pub d1: Option<Deviation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandFraction {
    pub observable: String,
    pub samples: u64,
    pub inside: u64,
    pub fraction_inside: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstDeviation {
    pub observable: String,
    pub t: f64,
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema: u32,
    pub n: u32,
    pub seeds: Vec<u64>,
    pub rows: Vec<CompareRow>,
    /// Per-sample fraction inside the envelope band, per observable.
    pub bands: Vec<BandFraction>,
    /// Largest |relative| per observable over the grid.
    pub worst: Vec<WorstDeviation>,
}

const OBSERVABLE_ORDER: [&str; 14] = [
    "Q0", "Q1", "E0", "X0", "X1", "X2", "Y00", "Y01", "Y10", "Y11", "W0", "W1", "D0", "D1",
];

struct Tally {
    samples: u64,
    inside: u64,
    worst_rel: f64,
    worst_t: f64,
    any_rel: bool,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            samples: 0,
            inside: 0,
            worst_rel: 0.0,
            worst_t: 0.0,
            any_rel: false,
        }
    }

    fn sample(&mut self, value: f64, predicted: f64, band: f64) {
        self.samples += 1;
        if (value - predicted).abs() <= band {
            self.inside += 1;
        }
    }

    fn observe_relative(&mut self, d: &Deviation, t: f64) {
        if let Some(rel) = d.relative {
            if !self.any_rel || rel.abs() > self.worst_rel.abs() {
                self.worst_rel = rel;
                self.worst_t = t;
            }
            self.any_rel = true;
        }
    }
}

/// Compares run series against the trajectory table. Every series must
/// share one step grid, and the table must contain each grid time.
pub fn compare(
    n: u32,
    series: &[RunSeries],
    trajectory: &[TrajectoryRow],
    cfg: &EnvelopeConfig,
) -> Result<CompareReport> {
    if series.is_empty() {
        return Err(Error::InvalidInput("no run series given".into()));
    }
    if cfg.n != n {
        return Err(Error::InvalidParameter(format!(
            "envelope configured for n = {}, runs have n = {n}",
            cfg.n
        )));
    }
    let grid: Vec<u64> = series[0].rows.iter().map(|r| r.i).collect();
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty run table".into()));
    }
    for s in &series[1..] {
        let other: Vec<u64> = s.rows.iter().map(|r| r.i).collect();
        if other != grid {
            return Err(Error::GridMismatch(format!(
                "seed {} records steps {:?}.., seed {} records {:?}..",
                series[0].seed,
                &grid[..grid.len().min(4)],
                s.seed,
                &other[..other.len().min(4)]
            )));
        }
    }

    let nf = n as f64;
    let n2 = nf * nf;
    let n32 = nf.powf(1.5);
    let sqn = nf.sqrt();

    let probe_index: Vec<HashMap<u64, Vec<ProbeRow>>> = series
        .iter()
        .map(|s| {
            let mut map: HashMap<u64, Vec<ProbeRow>> = HashMap::new();
            for &p in &s.probes {
                map.entry(p.i).or_default().push(p);
            }
            map
        })
        .collect();

    let mut tallies: HashMap<&str, Tally> = OBSERVABLE_ORDER
        .iter()
        .map(|&name| (name, Tally::new()))
        .collect();
    let mut rows = Vec::with_capacity(grid.len());

    for (at, &i) in grid.iter().enumerate() {
        let t = series[0].rows[at].t;
        let point = find_point(trajectory, t)?;
        let env = envelopes(t, cfg);

        // Curve values, with the exact start substituted at step 0.
        let zero = i == 0;
        let p_q0 = if zero { (nf - 1.0) / (2.0 * nf) } else { point.q0 };
        let p_q1 = if zero { 0.0 } else { point.q1 };
        let p_e0 = if zero { 0.0 } else { point.r };
        let p_x0 = if zero { (nf - 2.0) / nf } else { point.x0 };
        let p_x1 = if zero { 0.0 } else { point.x1 };
        let p_x2 = if zero { 0.0 } else { point.x2 };
        let p_y = |y: f64| if zero { 0.0 } else { y };
        let p_w0 = if zero {
            (nf - 1.0) / nf
        } else {
            2.0 * point.q0
        };
        let p_w1 = if zero { 0.0 } else { 2.0 * point.q1 };
        let p_d0 = if zero { 0.0 } else { 2.0 * point.r };
        let p_d1 = if zero { 0.0 } else { 2.0 * (t - point.r) };

        let mut mean_q0 = 0.0;
        let mut mean_q1 = 0.0;
        let mut mean_e0 = 0.0;
        for s in series {
            let row = &s.rows[at];
            let v0 = row.q0 as f64 / n2;
            let v1 = row.q1 as f64 / n2;
            let ve = row.m0 as f64 / n32;
            mean_q0 += v0;
            mean_q1 += v1;
            mean_e0 += ve;
            tallies.get_mut("Q0").unwrap().sample(v0, p_q0, env.delta_q);
            tallies.get_mut("Q1").unwrap().sample(v1, p_q1, env.delta_q);
            tallies
                .get_mut("E0")
                .unwrap()
                .sample(ve, p_e0, env.delta_r / 2.0);
        }
        let k = series.len() as f64;
        mean_q0 /= k;
        mean_q1 /= k;
        mean_e0 /= k;

        // Probe kinds: scale, band, and curve value per kind.
        let kind_info = |kind: ProbeKind| -> (f64, f64, f64) {
            match kind {
                ProbeKind::X0 => (nf, p_x0, env.delta_x),
                ProbeKind::X1 => (nf, p_x1, env.delta_x),
                ProbeKind::X2 => (nf, p_x2, env.delta_x),
                ProbeKind::Y00 => (sqn, p_y(point.y00), env.delta_y),
                ProbeKind::Y01 => (sqn, p_y(point.y01), env.delta_y),
                ProbeKind::Y10 => (sqn, p_y(point.y10), env.delta_y),
                ProbeKind::Y11 => (sqn, p_y(point.y11), env.delta_y),
                ProbeKind::W0 => (nf, p_w0, env.delta_q),
                ProbeKind::W1 => (nf, p_w1, env.delta_q),
                ProbeKind::D0 => (sqn, p_d0, env.delta_r),
                ProbeKind::D1 => (sqn, p_d1, env.delta_r),
            }
        };
        let mut sums: HashMap<ProbeKind, (f64, u64)> = HashMap::new();
        for (s, index) in series.iter().zip(&probe_index) {
            let Some(list) = index.get(&i) else { continue };
            let _ = s;
            for p in list {
                let (scale, predicted, band) = kind_info(p.kind);
                let value = p.value as f64 / scale;
                tallies
                    .get_mut(kind_name(p.kind))
                    .unwrap()
                    .sample(value, predicted, band);
                let e = sums.entry(p.kind).or_insert((0.0, 0));
                e.0 += value;
                e.1 += 1;
            }
        }
        let probe_dev = |kind: ProbeKind| -> Option<Deviation> {
            let &(sum, count) = sums.get(&kind)?;
            let (_, predicted, _) = kind_info(kind);
            Some(deviation(sum / count as f64, predicted))
        };

        let row = CompareRow {
            i,
            t,
            q0: deviation(mean_q0, p_q0),
            q1: deviation(mean_q1, p_q1),
            e0: deviation(mean_e0, p_e0),
            x0: probe_dev(ProbeKind::X0),
            x1: probe_dev(ProbeKind::X1),
            x2: probe_dev(ProbeKind::X2),
            y00: probe_dev(ProbeKind::Y00),
            y01: probe_dev(ProbeKind::Y01),
            y10: probe_dev(ProbeKind::Y10),
            y11: probe_dev(ProbeKind::Y11),
            w0: probe_dev(ProbeKind::W0),
            w1: probe_dev(ProbeKind::W1),
            d0: probe_dev(ProbeKind::D0),
            d1: probe_dev(ProbeKind::D1),
        };
        tallies.get_mut("Q0").unwrap().observe_relative(&row.q0, t);
        tallies.get_mut("Q1").unwrap().observe_relative(&row.q1, t);
        tallies.get_mut("E0").unwrap().observe_relative(&row.e0, t);
        for (name, dev) in [
            ("X0", &row.x0),
            ("X1", &row.x1),
            ("X2", &row.x2),
            ("Y00", &row.y00),
            ("Y01", &row.y01),
            ("Y10", &row.y10),
            ("Y11", &row.y11),
            ("W0", &row.w0),
            ("W1", &row.w1),
            ("D0", &row.d0),
            ("D1", &row.d1),
        ] {
            if let Some(d) = dev {
                tallies.get_mut(name).unwrap().observe_relative(d, t);
            }
        }
        rows.push(row);
    }

    let mut bands = Vec::new();
    let mut worst = Vec::new();
    for name in OBSERVABLE_ORDER {
        let tally = &tallies[name];
        if tally.samples > 0 {
            bands.push(BandFraction {
                observable: name.to_string(),
                samples: tally.samples,
                inside: tally.inside,
                fraction_inside: tally.inside as f64 / tally.samples as f64,
            });
        }
        if tally.any_rel {
            worst.push(WorstDeviation {
                observable: name.to_string(),
                t: tally.worst_t,
                relative: tally.worst_rel,
            });
        }
    }

    Ok(CompareReport {
        schema: persist::SCHEMA_VERSION,
        n,
        seeds: series.iter().map(|s| s.seed).collect(),
        rows,
        bands,
        worst,
    })
}

fn kind_name(kind: ProbeKind) -> &'static str {
    match kind {
        ProbeKind::X0 => "X0",
        ProbeKind::X1 => "X1",
        ProbeKind::X2 => "X2",
        ProbeKind::Y00 => "Y00",
        ProbeKind::Y01 => "Y01",
        ProbeKind::Y10 => "Y10",
        ProbeKind::Y11 => "Y11",
        ProbeKind::W0 => "W0",
        ProbeKind::W1 => "W1",
        ProbeKind::D0 => "D0",
        ProbeKind::D1 => "D1",
    }
}

fn find_point(trajectory: &[TrajectoryRow], t: f64) -> Result<crate::trajectory::TrajectoryPoint> {
    let tol = 1e-9 * t.abs().max(1.0);
    trajectory
        .iter()
        .find(|row| (row.point.t - t).abs() <= tol)
        .map(|row| row.point)
        .ok_or_else(|| {
            Error::GridMismatch(format!(
                "no trajectory entry at t = {t}; regenerate the table on the run grid"
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ensemble::{run_ensemble, EnsembleConfig, OutputFormat};
    use crate::process::StopRule;
    use crate::trajectory::closed_form;

    fn setup(n: u32, seeds: Vec<u64>) -> (Vec<RunSeries>, Vec<TrajectoryRow>, EnvelopeConfig) {
        let cfg = EnsembleConfig {
            n,
            seeds,
            stop: StopRule::Steps(24),
            stride: Some(8),
            probe_pairs: 6,
            probe_vertices: 4,
            envelope: None,
            out_dir: None,
            format: OutputFormat::Csv,
        };
        let out = run_ensemble(&cfg).unwrap();
        let series: Vec<RunSeries> = out.records.iter().map(RunSeries::from_record).collect();
        let env = EnvelopeConfig::defaults(n).unwrap();
        let points: Vec<_> = series[0]
            .rows
            .iter()
            .map(|r| closed_form(r.t).unwrap())
            .collect();
        let rows = persist::trajectory_rows(&points, &env);
        (series, rows, env)
    }

    #[test]
    fn baseline_row_is_exact() {
        let (series, traj, env) = setup(20, vec![1, 2, 3]);
        let report = compare(20, &series, &traj, &env).unwrap();
        let first = &report.rows[0];
        assert_eq!(first.i, 0);
        // Averaging identical samples can cost an ulp, nothing more.
        assert!(first.q0.relative.unwrap().abs() < 1e-14);
        assert_eq!(first.q1.relative, Some(0.0));
        assert_eq!(first.e0.relative, Some(0.0));
        if let Some(x0) = &first.x0 {
            assert!(x0.relative.unwrap().abs() < 1e-14);
        }
        if let Some(w0) = &first.w0 {
            assert!(w0.relative.unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn small_n_bands_swallow_everything() {
        let (series, traj, env) = setup(20, vec![1, 2, 3]);
        let report = compare(20, &series, &traj, &env).unwrap();
        for band in &report.bands {
            if band.observable == "Q0" || band.observable == "Q1" {
                assert_eq!(band.fraction_inside, 1.0, "{}", band.observable);
            }
        }
        assert_eq!(report.rows.len(), 4);
    }

    #[test]
    fn missing_trajectory_times_are_a_grid_mismatch() {
        let (series, traj, env) = setup(20, vec![1, 2]);
        let short = &traj[..2];
        assert!(matches!(
            compare(20, &series, short, &env),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn diverging_series_grids_are_a_grid_mismatch() {
        let (mut series, traj, env) = setup(20, vec![1, 2]);
        series[1].rows.pop();
        assert!(matches!(
            compare(20, &series, &traj, &env),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn wrong_envelope_n_is_rejected() {
        let (series, traj, _) = setup(20, vec![1]);
        let other = EnvelopeConfig::defaults(50).unwrap();
        assert!(compare(20, &series, &traj, &other).is_err());
    }
}
