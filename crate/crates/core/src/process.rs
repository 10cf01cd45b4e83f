//! Incremental engine for the diamond-free random graph process.
//!
//! Start from n isolated vertices; repeatedly pick, uniformly at random, a
//! non-edge whose insertion keeps every edge of the graph on at most one
//! triangle (an "open" pair), and insert it. The engine keeps the full
//! five-way pair classification current after every insertion, so sampling
//! is O(1) and one step costs O(max degree).
//!
//! Classes only move forward: O0 → {O1, C, E0}, O1 → {C, E1}, E0 → E1;
//! closed pairs stay closed and edges never leave. Inserting uv can only
//! change pairs that share a vertex with uv, or, when uv completes a
//! triangle uvz, with uz or vz; those are exactly the pairs the sweeps in
//! [`ProcessState::apply_edge`] visit.
//!
//! Each inserted edge is colored: blue when it was drawn from O0 (it created
//! no triangle), green when drawn from O1. Every triangle therefore carries
//! two blue edges and one green edge.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::independence;
use crate::observables::{self, ProbeConfig, Snapshot};
use crate::pair::{pair_count, PairId, PairState};
use crate::rng::{self, Rng};

const NOT_OPEN: u32 = u32::MAX;

/// Largest supported vertex count; keeps pair ids inside u32 and the dense
/// per-pair tables within addressable desk-scale memory.
pub const MAX_N: u32 = 46_340;

/// Stream labels for auxiliary randomness derived from the run seed, so
/// probe selection and snapshot sampling never touch the process stream.
const PROBE_STREAM: u64 = 0x70726f_6265;
const SNAPSHOT_STREAM: u64 = 0x736e_6170;

// ============================================================================
// State
// ============================================================================

#[derive(Clone, Debug)]
pub struct ProcessState {
    n: u32,
    step: u64,
    seed: u64,
    rng: Rng,
    /// Sorted neighbor list per vertex.
    adj: Vec<Vec<u32>>,
    /// Dense class table indexed by PairId.
    states: Vec<PairState>,
    /// Every O0/O1 pair, in no particular order.
    open: Vec<PairId>,
    /// PairId → position in `open`, or NOT_OPEN.
    open_pos: Vec<u32>,
    /// Third triangle vertex for each E1 edge.
    apex: HashMap<PairId, u32>,
    /// Green edges (chosen from O1) in insertion order.
    green_edges: Vec<PairId>,
    q0: u64,
    q1: u64,
    m0: u64,
    m1: u64,
    blue: u64,
    green: u64,
    max_degree: u32,
}

/// One recorded class change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub pair: PairId,
    pub from: PairState,
    pub to: PairState,
}

/// Everything a single edge insertion changed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateDelta {
    pub chosen: PairId,
    pub prior: PairState,
    /// Triangle apex when the chosen pair was O1.
    pub witness: Option<u32>,
    /// Every pair whose class changed, the chosen pair included, each once.
    pub transitions: Vec<Transition>,
}

impl ProcessState {
    /// Fresh process on n isolated vertices with a deterministic stream.
    pub fn init(n: u32, seed: u64) -> Result<ProcessState> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 vertices, got {n}"
            )));
        }
        if n > MAX_N {
            return Err(Error::InvalidParameter(format!(
                "n = {n} exceeds supported maximum {MAX_N}"
            )));
        }
        let pairs = pair_count(n) as usize;
        Ok(ProcessState {
            n,
            step: 0,
            seed,
            rng: Rng::from_seed(seed),
            adj: vec![Vec::new(); n as usize],
            states: vec![PairState::O0; pairs],
            open: (0..pairs as u32).map(PairId).collect(),
            open_pos: (0..pairs as u32).collect(),
            apex: HashMap::new(),
            green_edges: Vec::new(),
            q0: pairs as u64,
            q1: 0,
            m0: 0,
            m1: 0,
            blue: 0,
            green: 0,
            max_degree: 0,
        })
    }

    // ------------------------------------------------------------------
    // Read access
    // ------------------------------------------------------------------

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Steps taken, i.e. edges inserted so far.
    pub fn step(&self) -> u64 {
        self.step
    }

    /// Scaled time t = i / n^{3/2}.
    pub fn t(&self) -> f64 {
        scaled_time(self.step, self.n)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn q0(&self) -> u64 {
        self.q0
    }

    pub fn q1(&self) -> u64 {
        self.q1
    }

    pub fn m0(&self) -> u64 {
        self.m0
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn blue_count(&self) -> u64 {
        self.blue
    }

    pub fn green_count(&self) -> u64 {
        self.green
    }

    pub fn open_count(&self) -> u64 {
        self.open.len() as u64
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn pair_state(&self, p: PairId) -> PairState {
        self.states[p.0 as usize]
    }

    pub fn state_of(&self, u: u32, v: u32) -> PairState {
        self.states[PairId::encode(u, v, self.n).0 as usize]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.adj[v as usize].len() as u32
    }

    pub fn is_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Number of common neighbors.
    pub fn codegree(&self, u: u32, v: u32) -> u32 {
        merge_count(&self.adj[u as usize], &self.adj[v as usize])
    }

    /// The unique common neighbor of an O1 or E1 pair, if any.
    pub fn witness(&self, u: u32, v: u32) -> Option<u32> {
        first_common(&self.adj[u as usize], &self.adj[v as usize])
    }

    /// Apex (third triangle vertex) stored for an E1 edge.
    pub fn apex_of(&self, p: PairId) -> Option<u32> {
        self.apex.get(&p).copied()
    }

    /// All edges, ascending by (u, v).
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity((self.m0 + self.m1) as usize);
        for u in 0..self.n {
            for &v in &self.adj[u as usize] {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Edges inserted without creating a triangle, ascending by (u, v).
    pub fn blue_edges(&self) -> Vec<(u32, u32)> {
        let mut green: Vec<PairId> = self.green_edges.clone();
        green.sort_unstable();
        self.edges()
            .into_iter()
            .filter(|&(u, v)| {
                green
                    .binary_search(&PairId::encode(u, v, self.n))
                    .is_err()
            })
            .collect()
    }

    pub fn green_edges(&self) -> &[PairId] {
        &self.green_edges
    }

    // ------------------------------------------------------------------
    // Classification from scratch
    // ------------------------------------------------------------------

    /// Recomputes the class of {u, v} from adjacency alone, ignoring the
    /// class table. Self-check counterpart of the incremental bookkeeping.
    pub fn classify_pair(&self, u: u32, v: u32) -> Result<PairState> {
        if u == v {
            return Err(Error::InvalidParameter(format!(
                "classify_pair needs two distinct vertices, got {u} twice"
            )));
        }
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidParameter(format!(
                "vertex out of range: ({u}, {v}) with n = {}",
                self.n
            )));
        }
        let cod = self.codegree(u, v);
        if self.is_edge(u, v) {
            return Ok(if cod == 0 { PairState::E0 } else { PairState::E1 });
        }
        Ok(match cod {
            0 => PairState::O0,
            1 => {
                let z = self.witness(u, v).expect("codegree 1 pair has a witness");
                if self.codegree(u, z) == 0 && self.codegree(v, z) == 0 {
                    PairState::O1
                } else {
                    PairState::C
                }
            }
            _ => PairState::C,
        })
    }

    // ------------------------------------------------------------------
    // Sampling
    // ------------------------------------------------------------------

    /// Uniform draw from the open set. Consumes rng state; the graph is
    /// untouched.
    pub fn sample_open(&mut self) -> Result<PairId> {
        if self.open.is_empty() {
            return Err(Error::Terminated);
        }
        let j = self.rng.bounded(self.open.len() as u64) as usize;
        Ok(self.open[j])
    }

    /// Uniform draw over the open set sorted ascending by PairId. Consumes
    /// the rng exactly like [`sample_open`] (one bounded draw over the same
    /// set size), so a reference engine sharing the seed and the same
    /// canonical ordering picks the identical pair. Test use only; cost
    /// O(|O| log |O|).
    pub fn sample_open_canonical(&mut self) -> Result<PairId> {
        if self.open.is_empty() {
            return Err(Error::Terminated);
        }
        let mut sorted = self.open.clone();
        sorted.sort_unstable();
        let j = self.rng.bounded(sorted.len() as u64) as usize;
        Ok(sorted[j])
    }

    // ------------------------------------------------------------------
    // Insertion
    // ------------------------------------------------------------------

    /// Inserts the open pair p as an edge and updates every affected pair.
    pub fn apply_edge(&mut self, p: PairId) -> Result<UpdateDelta> {
        let prior = self.states[p.0 as usize];
        let (u, v) = p.vertices(self.n);
        if !prior.is_open() {
            return Err(Error::InvalidTransition { u, v, state: prior });
        }
        let mut delta = UpdateDelta {
            chosen: p,
            prior,
            witness: None,
            transitions: Vec::new(),
        };

        match prior {
            PairState::O0 => {
                self.record(p, PairState::E0, &mut delta);
                self.remove_open(p);
                self.q0 -= 1;
                self.m0 += 1;
                self.blue += 1;
                self.insert_adjacency(u, v);
                self.promote_or_close_sweep(u, v, &mut delta);
                self.promote_or_close_sweep(v, u, &mut delta);
            }
            PairState::O1 => {
                let z = self
                    .witness(u, v)
                    .expect("O1 pair must have exactly one common neighbor");
                delta.witness = Some(z);
                let uz = PairId::encode(u, z, self.n);
                let vz = PairId::encode(v, z, self.n);

                self.record(p, PairState::E1, &mut delta);
                self.remove_open(p);
                self.q1 -= 1;
                self.m1 += 1;
                self.green += 1;
                self.green_edges.push(p);
                self.apex.insert(p, z);

                debug_assert_eq!(self.states[uz.0 as usize], PairState::E0);
                debug_assert_eq!(self.states[vz.0 as usize], PairState::E0);
                self.record(uz, PairState::E1, &mut delta);
                self.record(vz, PairState::E1, &mut delta);
                self.m0 -= 2;
                self.m1 += 2;
                self.apex.insert(uz, v);
                self.apex.insert(vz, u);

                self.insert_adjacency(u, v);
                for (a, b) in [(u, v), (v, u), (u, z), (z, u), (v, z), (z, v)] {
                    self.close_sweep(a, b, &mut delta);
                }
            }
            _ => unreachable!(),
        }

        self.step += 1;
        Ok(delta)
    }

    /// O0 insertion of uv: every pair {other, w} for w adjacent to `swept`
    /// gains the common neighbor `swept`. It stays open only if it had no
    /// common neighbor before and its two connecting edges are both
    /// triangle-free.
    fn promote_or_close_sweep(&mut self, swept: u32, other: u32, delta: &mut UpdateDelta) {
        for idx in 0..self.adj[swept as usize].len() {
            let w = self.adj[swept as usize][idx];
            if w == other {
                continue;
            }
            let partial = PairId::encode(other, w, self.n);
            let connecting = PairId::encode(swept, w, self.n);
            match self.states[partial.0 as usize] {
                PairState::O0 => {
                    if self.states[connecting.0 as usize] == PairState::E0 {
                        self.record(partial, PairState::O1, delta);
                        self.q0 -= 1;
                        self.q1 += 1;
                    } else {
                        self.close_open(partial, PairState::O0, delta);
                    }
                }
                PairState::O1 => self.close_open(partial, PairState::O1, delta),
                PairState::C => {}
                s => debug_assert!(
                    !s.is_edge(),
                    "O0 insertion cannot touch a pair adjacent to both endpoints"
                ),
            }
        }
    }

    /// O1 insertion: edge {a, b} just became E1, so every open pair joining
    /// b to a neighbor of a is closed.
    fn close_sweep(&mut self, a: u32, b: u32, delta: &mut UpdateDelta) {
        for idx in 0..self.adj[a as usize].len() {
            let w = self.adj[a as usize][idx];
            if w == b {
                continue;
            }
            let q = PairId::encode(b, w, self.n);
            let st = self.states[q.0 as usize];
            if st.is_open() {
                self.close_open(q, st, delta);
            }
        }
    }

    fn close_open(&mut self, p: PairId, from: PairState, delta: &mut UpdateDelta) {
        self.record(p, PairState::C, delta);
        self.remove_open(p);
        match from {
            PairState::O0 => self.q0 -= 1,
            PairState::O1 => self.q1 -= 1,
            _ => unreachable!(),
        }
    }

    fn record(&mut self, p: PairId, to: PairState, delta: &mut UpdateDelta) {
        let from = self.states[p.0 as usize];
        debug_assert_ne!(from, to);
        self.states[p.0 as usize] = to;
        delta.transitions.push(Transition { pair: p, from, to });
    }

    fn remove_open(&mut self, p: PairId) {
        let pos = self.open_pos[p.0 as usize];
        debug_assert_ne!(pos, NOT_OPEN);
        let last = self.open.pop().expect("open list cannot be empty here");
        if (pos as usize) < self.open.len() {
            self.open[pos as usize] = last;
            self.open_pos[last.0 as usize] = pos;
        }
        self.open_pos[p.0 as usize] = NOT_OPEN;
    }

    fn insert_adjacency(&mut self, u: u32, v: u32) {
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a as usize];
            let at = list.binary_search(&b).unwrap_err();
            list.insert(at, b);
            self.max_degree = self.max_degree.max(list.len() as u32);
        }
    }

    // ------------------------------------------------------------------
    // Validation (test support; O(n^2) and worse)
    // ------------------------------------------------------------------

    /// Recounts every counter and open-list entry from the class table.
    pub fn validate_counters(&self) -> Result<()> {
        let mut counts = [0u64; 5];
        for s in &self.states {
            let k = match s {
                PairState::O0 => 0,
                PairState::O1 => 1,
                PairState::E0 => 2,
                PairState::E1 => 3,
                PairState::C => 4,
            };
            counts[k] += 1;
        }
        let expect = [self.q0, self.q1, self.m0, self.m1];
        if counts[..4] != expect {
            return Err(Error::InvalidInput(format!(
                "counter drift: recounted {:?}, stored {:?}",
                &counts[..4],
                expect
            )));
        }
        if self.open.len() as u64 != self.q0 + self.q1 {
            return Err(Error::InvalidInput("open list length drift".into()));
        }
        for (idx, p) in self.open.iter().enumerate() {
            if self.open_pos[p.0 as usize] != idx as u32 || !self.states[p.0 as usize].is_open() {
                return Err(Error::InvalidInput(format!("open list broken at {idx}")));
            }
        }
        if self.m1 % 3 != 0 {
            return Err(Error::InvalidInput(format!("m1 = {} not divisible by 3", self.m1)));
        }
        if self.green != self.m1 / 3 || self.blue != self.m0 + 2 * (self.m1 / 3) {
            return Err(Error::InvalidInput("blue/green accounting drift".into()));
        }
        if self.blue + self.green != self.step {
            return Err(Error::InvalidInput("color totals do not sum to step count".into()));
        }
        Ok(())
    }

    /// True iff every edge has codegree at most 1.
    pub fn is_diamond_free(&self) -> bool {
        self.edges()
            .iter()
            .all(|&(u, v)| self.codegree(u, v) <= 1)
    }

    /// Full recomputation of the class table; compares every pair against
    /// [`classify_pair`].
    pub fn validate_full(&self) -> Result<()> {
        self.validate_counters()?;
        if !self.is_diamond_free() {
            return Err(Error::InvalidInput("graph is not diamond-free".into()));
        }
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                let p = PairId::encode(u, v, self.n);
                let fresh = self.classify_pair(u, v)?;
                if fresh != self.states[p.0 as usize] {
                    return Err(Error::InvalidInput(format!(
                        "class drift at ({u}, {v}): table {:?}, recomputed {fresh:?}",
                        self.states[p.0 as usize]
                    )));
                }
            }
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Whole runs
    // ------------------------------------------------------------------

    /// Drives the process until the stop rule triggers or the open set
    /// empties, recording snapshots per the record rule.
    pub fn run(&mut self, stop: StopRule, record: &RecordRule) -> Result<RunRecord> {
        let probes = self.resolve_probes(&record.probes)?;
        let mut snapshots: Vec<Snapshot> = Vec::new();
        snapshots.push(observables::snapshot(self, &probes));

        let mut terminated = false;
        loop {
            if let StopRule::Steps(m) = stop {
                if self.step >= m {
                    break;
                }
            }
            let p = match self.sample_open() {
                Ok(p) => p,
                Err(Error::Terminated) => {
                    terminated = true;
                    break;
                }
                Err(e) => return Err(e),
            };
            self.apply_edge(p)?;
            if record.stride > 0 && self.step % record.stride == 0 {
                snapshots.push(observables::snapshot(self, &probes));
            }
        }
        if snapshots.last().map(|s| s.i) != Some(self.step) {
            snapshots.push(observables::snapshot(self, &probes));
        }

        let max_codegree_seen = snapshots.iter().map(|s| s.max_codegree).max().unwrap_or(0);
        let blue_edges = self.blue_edges();
        let greedy = independence::greedy_min_degree(self.n, &blue_edges);
        let norm = (self.n as f64 * (self.n as f64).ln()).sqrt();
        let summary = RunSummary {
            terminated,
            final_i: self.step,
            final_t: self.t(),
            blue: self.blue,
            green: self.green,
            max_degree: self.max_degree,
            max_codegree_seen,
            greedy_blue_independence: greedy.len() as u64,
            greedy_blue_normalized: greedy.len() as f64 / norm,
        };
        Ok(RunRecord {
            schema: 1,
            n: self.n,
            seed: self.seed,
            rng_algorithm: rng::ALGORITHM_ID.to_string(),
            stop,
            stride: record.stride,
            probe_pairs: probes.pairs,
            probe_vertices: probes.vertices,
            snapshots,
            summary,
        })
    }

    fn resolve_probes(&self, spec: &ProbeSpec) -> Result<ProbeConfig> {
        match spec {
            ProbeSpec::None => Ok(ProbeConfig::default()),
            ProbeSpec::Random { pairs, vertices } => {
                let mut stream = rng::derive_stream(self.seed, PROBE_STREAM);
                let pair_ids = stream
                    .distinct(*pairs as usize, pair_count(self.n))
                    .into_iter()
                    .map(|x| PairId(x as u32))
                    .collect();
                let vertex_ids = stream
                    .distinct(*vertices as usize, self.n as u64)
                    .into_iter()
                    .map(|x| x as u32)
                    .collect();
                Ok(ProbeConfig {
                    pairs: pair_ids,
                    vertices: vertex_ids,
                })
            }
            ProbeSpec::Fixed { pairs, vertices } => {
                for p in pairs {
                    if (p.0 as u64) >= pair_count(self.n) {
                        return Err(Error::InvalidParameter(format!(
                            "probe pair id {} out of range",
                            p.0
                        )));
                    }
                }
                for &v in vertices {
                    if v >= self.n {
                        return Err(Error::InvalidParameter(format!(
                            "probe vertex {v} out of range"
                        )));
                    }
                }
                Ok(ProbeConfig {
                    pairs: pairs.clone(),
                    vertices: vertices.clone(),
                })
            }
        }
    }

    /// Seeded stream for snapshot-internal sampling, keyed by step so each
    /// snapshot is reproducible in isolation without touching the process
    /// stream.
    pub(crate) fn snapshot_stream(&self) -> Rng {
        rng::derive_stream(self.seed, SNAPSHOT_STREAM ^ self.step.rotate_left(17))
    }
}

pub fn scaled_time(step: u64, n: u32) -> f64 {
    step as f64 / (n as f64).powf(1.5)
}

fn merge_count(a: &[u32], b: &[u32]) -> u32 {
    let (mut i, mut j, mut count) = (0usize, 0usize, 0u32);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn first_common(a: &[u32], b: &[u32]) -> Option<u32> {
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

// ============================================================================
// Run plumbing
// ============================================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopRule {
    /// Run until the step counter reaches this value (or the process dies).
    Steps(u64),
    /// Run until the open set is empty.
    ToTermination,
}

/// What to record while running.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordRule {
    /// Snapshot every `stride` steps; 0 records only the endpoints.
    pub stride: u64,
    pub probes: ProbeSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeSpec {
    None,
    /// Fixed random sample drawn from a probe-specific stream at start.
    Random { pairs: u32, vertices: u32 },
    Fixed { pairs: Vec<PairId>, vertices: Vec<u32> },
}

impl RecordRule {
    /// 100 snapshots per unit of scaled time.
    pub fn default_stride(n: u32) -> u64 {
        ((n as f64).powf(1.5) / 100.0).ceil() as u64
    }

    pub fn endpoints_only() -> RecordRule {
        RecordRule {
            stride: 0,
            probes: ProbeSpec::None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// True when the open set emptied (the natural end of the process).
    pub terminated: bool,
    /// Final step count; the final graph size when terminated.
    pub final_i: u64,
    pub final_t: f64,
    pub blue: u64,
    pub green: u64,
    pub max_degree: u32,
    pub max_codegree_seen: u32,
    pub greedy_blue_independence: u64,
    /// Greedy size divided by sqrt(n ln n).
    pub greedy_blue_normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: u32,
    pub n: u32,
    pub seed: u64,
    pub rng_algorithm: String,
    pub stop: StopRule,
    pub stride: u64,
    pub probe_pairs: Vec<PairId>,
    pub probe_vertices: Vec<u32>,
    pub snapshots: Vec<Snapshot>,
    pub summary: RunSummary,
}
