//! On-disk formats.
//!
//! CSV tables carry one header line and end with a newline. Floats print
//! with 17 significant digits so a parse returns the identical value.
//! JSON documents carry a `schema` field and also end with a newline.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::ProbeValues;
use crate::process::RunRecord;
use crate::trajectory::{envelopes, EnvelopeConfig, TrajectoryPoint};

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, enough for exact f64 round trips.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

// ============================================================================
// Run tables
// ============================================================================

pub const RUN_HEADER: &str = "i,t,Q0,Q1,m0,m1,blue,green,max_deg,max_codeg";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunRow {
    pub i: u64,
    pub t: f64,
    pub q0: u64,
    pub q1: u64,
    pub m0: u64,
    pub m1: u64,
    pub blue: u64,
    pub green: u64,
    pub max_deg: u32,
    pub max_codeg: u32,
}

pub fn run_rows(record: &RunRecord) -> Vec<RunRow> {
    record
        .snapshots
        .iter()
        .map(|s| RunRow {
            i: s.i,
            t: s.t,
            q0: s.q0,
            q1: s.q1,
            m0: s.m0,
            m1: s.m1,
            blue: s.blue,
            green: s.green,
            max_deg: s.max_degree,
            max_codeg: s.max_codegree,
        })
        .collect()
}

pub fn run_csv(record: &RunRecord) -> String {
    let mut out = String::from(RUN_HEADER);
    out.push('\n');
    for r in run_rows(record) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.i,
            format_f64(r.t),
            r.q0,
            r.q1,
            r.m0,
            r.m1,
            r.blue,
            r.green,
            r.max_deg,
            r.max_codeg
        ));
    }
    out
}

pub fn parse_run_csv(text: &str) -> Result<Vec<RunRow>> {
    let mut rows = Vec::new();
    for (idx, line) in non_empty_lines(text, RUN_HEADER)? {
        let f = split_fields(line, 10, idx)?;
        rows.push(RunRow {
            i: parse_field(f[0], idx, "i")?,
            t: parse_field(f[1], idx, "t")?,
            q0: parse_field(f[2], idx, "Q0")?,
            q1: parse_field(f[3], idx, "Q1")?,
            m0: parse_field(f[4], idx, "m0")?,
            m1: parse_field(f[5], idx, "m1")?,
            blue: parse_field(f[6], idx, "blue")?,
            green: parse_field(f[7], idx, "green")?,
            max_deg: parse_field(f[8], idx, "max_deg")?,
            max_codeg: parse_field(f[9], idx, "max_codeg")?,
        });
    }
    Ok(rows)
}

// ============================================================================
// Probe tables
// ============================================================================

pub const PROBE_HEADER: &str = "i,t,kind,id,value";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProbeKind {
    X0,
    X1,
    X2,
    Y00,
    Y01,
    Y10,
    Y11,
    W0,
    W1,
    D0,
    D1,
}

impl ProbeKind {
    pub const ALL: [ProbeKind; 11] = [
        ProbeKind::X0,
        ProbeKind::X1,
        ProbeKind::X2,
        ProbeKind::Y00,
        ProbeKind::Y01,
        ProbeKind::Y10,
        ProbeKind::Y11,
        ProbeKind::W0,
        ProbeKind::W1,
        ProbeKind::D0,
        ProbeKind::D1,
    ];
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
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
        };
        f.write_str(s)
    }
}

impl FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ProbeKind> {
        Ok(match s {
            "X0" => ProbeKind::X0,
            "X1" => ProbeKind::X1,
            "X2" => ProbeKind::X2,
            "Y00" => ProbeKind::Y00,
            "Y01" => ProbeKind::Y01,
            "Y10" => ProbeKind::Y10,
            "Y11" => ProbeKind::Y11,
            "W0" => ProbeKind::W0,
            "W1" => ProbeKind::W1,
            "D0" => ProbeKind::D0,
            "D1" => ProbeKind::D1,
            _ => return Err(Error::InvalidInput(format!("unknown probe kind {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeRow {
    pub i: u64,
    pub t: f64,
    pub kind: ProbeKind,
    pub id: u32,
    pub value: u64,
}

/// Flattens a record's snapshots into probe rows. A fully tracked pair
/// yields its seven pair kinds; a triangle-free edge keeps contributing X0
/// and Y00; a triangle edge yields nothing.
pub fn probe_rows(record: &RunRecord) -> Vec<ProbeRow> {
    let mut out = Vec::new();
    for s in &record.snapshots {
        for p in &s.pair_probes {
            let row = |kind, value| ProbeRow {
                i: s.i,
                t: s.t,
                kind,
                id: p.pair.0,
                value,
            };
            match p.values {
                ProbeValues::Full(o) => {
                    out.push(row(ProbeKind::X0, o.x0));
                    out.push(row(ProbeKind::X1, o.x1));
                    out.push(row(ProbeKind::X2, o.x2));
                    out.push(row(ProbeKind::Y00, o.y00));
                    out.push(row(ProbeKind::Y01, o.y01));
                    out.push(row(ProbeKind::Y10, o.y10));
                    out.push(row(ProbeKind::Y11, o.y11));
                }
                ProbeValues::EdgeTracked { x0, y00 } => {
                    out.push(row(ProbeKind::X0, x0));
                    out.push(row(ProbeKind::Y00, y00));
                }
                ProbeValues::Stopped => {}
            }
        }
        for v in &s.vertex_probes {
            let row = |kind, value| ProbeRow {
                i: s.i,
                t: s.t,
                kind,
                id: v.vertex,
                value,
            };
            out.push(row(ProbeKind::W0, v.values.w0));
            out.push(row(ProbeKind::W1, v.values.w1));
            out.push(row(ProbeKind::D0, v.values.d0));
            out.push(row(ProbeKind::D1, v.values.d1));
        }
    }
    out
}

pub fn probe_csv(record: &RunRecord) -> String {
    let mut out = String::from(PROBE_HEADER);
    out.push('\n');
    for r in probe_rows(record) {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.i,
            format_f64(r.t),
            r.kind,
            r.id,
            r.value
        ));
    }
    out
}

pub fn parse_probe_csv(text: &str) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::new();
    for (idx, line) in non_empty_lines(text, PROBE_HEADER)? {
        let f = split_fields(line, 5, idx)?;
        rows.push(ProbeRow {
            i: parse_field(f[0], idx, "i")?,
            t: parse_field(f[1], idx, "t")?,
            kind: f[2]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("line {idx}: bad probe kind {:?}", f[2])))?,
            id: parse_field(f[3], idx, "id")?,
            value: parse_field(f[4], idx, "value")?,
        });
    }
    Ok(rows)
}

// ============================================================================
// Trajectory tables
// ============================================================================

pub const TRAJECTORY_HEADER: &str =
    "t,r,q0,q1,x0,x1,x2,y00,y01,y10,y11,delta_q,delta_x,delta_y,delta_r";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    #[serde(flatten)]
    pub point: TrajectoryPoint,
    pub delta_q: f64,
    pub delta_x: f64,
    pub delta_y: f64,
    pub delta_r: f64,
}

/// Pairs each point with its envelope widths.
pub fn trajectory_rows(points: &[TrajectoryPoint], cfg: &EnvelopeConfig) -> Vec<TrajectoryRow> {
    points
        .iter()
        .map(|&point| {
            let env = envelopes(point.t, cfg);
            TrajectoryRow {
                point,
                delta_q: env.delta_q,
                delta_x: env.delta_x,
                delta_y: env.delta_y,
                delta_r: env.delta_r,
            }
        })
        .collect()
}

pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for r in rows {
        let p = &r.point;
        let cols = [
            p.t, p.r, p.q0, p.q1, p.x0, p.x1, p.x2, p.y00, p.y01, p.y10, p.y11, r.delta_q,
            r.delta_x, r.delta_y, r.delta_r,
        ];
        let line: Vec<String> = cols.iter().map(|&x| format_f64(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut rows = Vec::new();
    for (idx, line) in non_empty_lines(text, TRAJECTORY_HEADER)? {
        let f = split_fields(line, 15, idx)?;
        let mut vals = [0f64; 15];
        for (slot, raw) in vals.iter_mut().zip(f.iter()) {
            *slot = parse_field(raw, idx, "column")?;
        }
        rows.push(TrajectoryRow {
            point: TrajectoryPoint {
                t: vals[0],
                r: vals[1],
                q0: vals[2],
                q1: vals[3],
                x0: vals[4],
                x1: vals[5],
                x2: vals[6],
                y00: vals[7],
                y01: vals[8],
                y10: vals[9],
                y11: vals[10],
            },
            delta_q: vals[11],
            delta_x: vals[12],
            delta_y: vals[13],
            delta_r: vals[14],
        });
    }
    Ok(rows)
}

// ============================================================================
// JSON and files
// ============================================================================

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad JSON: {e}")))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

// ============================================================================
// Parsing helpers
// ============================================================================

fn non_empty_lines<'a>(text: &'a str, header: &str) -> Result<Vec<(usize, &'a str)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == header => {}
        Some((_, first)) => {
            return Err(Error::InvalidInput(format!(
                "bad header: expected {header:?}, found {first:?}"
            )))
        }
        None => return Err(Error::InvalidInput("empty file".into())),
    }
    Ok(lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect())
}

fn split_fields(line: &str, want: usize, idx: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != want {
        return Err(Error::InvalidInput(format!(
            "line {idx}: expected {want} fields, found {}",
            fields.len()
        )));
    }
    Ok(fields)
}

fn parse_field<T: FromStr>(raw: &str, idx: usize, what: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::InvalidInput(format!("line {idx}: bad {what} value {raw:?}")))
}
