//! Local pair and vertex statistics, and whole-state snapshots.
//!
//! For a pair {u, v}, each third vertex w falls into one bucket according to
//! the classes of the two side pairs {u, w} and {v, w}:
//!
//! * both sides open: counted in `x`, refined into `x0` (both O0), `x1`
//!   (exactly one O0), `x2` (both O1 with distinct witnesses);
//! * one side an edge, the other open: counted in `y`, refined by the edge
//!   and open classes into `y00`, `y01`, `y10`, `y11`;
//! * both sides edges: counted in `z`;
//! * a closed side: counted nowhere.
//!
//! One wrinkle in the `y` refinement: when {u, v} is itself an edge, an open
//! side pair always has the opposite endpoint as its unique common neighbor,
//! so its O1 class is an artifact of the tracked edge. Such a vertex counts
//! in `y00`, which keeps the bucket meaningful for edges that started as
//! tracked open pairs.

use serde::{Deserialize, Serialize};

use crate::pair::{pair_count, PairId, PairState};
use crate::process::ProcessState;

/// Codegree is exact for graphs up to this many vertices, sampled beyond.
const EXACT_CODEGREE_N: u32 = 200;
const CODEGREE_SAMPLES: u64 = 100_000;

// ============================================================================
// Per-pair and per-vertex counts
// ============================================================================

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairObservables {
    /// Vertices with both sides open.
    pub x: u64,
    pub x0: u64,
    pub x1: u64,
    pub x2: u64,
    /// Vertices with one side an edge and the other open.
    pub y: u64,
    pub y00: u64,
    pub y01: u64,
    pub y10: u64,
    pub y11: u64,
    /// Common neighbors.
    pub z: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexObservables {
    /// Pairs {v, u} currently O0.
    pub w0: u64,
    /// Pairs {v, u} currently O1.
    pub w1: u64,
    /// Neighbors joined by a triangle-free edge.
    pub d0: u64,
    /// Neighbors joined by a triangle edge.
    pub d1: u64,
}

/// Counts the third-vertex buckets around {u, v}.
pub fn pair_observables(
    state: &ProcessState,
    u: u32,
    v: u32,
) -> crate::error::Result<PairObservables> {
    if u == v {
        return Err(crate::error::Error::InvalidParameter(format!(
            "pair observables need two distinct vertices, got {u} twice"
        )));
    }
    if u >= state.n() || v >= state.n() {
        return Err(crate::error::Error::InvalidParameter(format!(
            "vertex out of range: ({u}, {v}) with n = {}",
            state.n()
        )));
    }
    let mut obs = PairObservables::default();
    for w in 0..state.n() {
        if w == u || w == v {
            continue;
        }
        let a = state.state_of(u, w);
        let b = state.state_of(v, w);
        match (a.is_open(), b.is_open(), a.is_edge(), b.is_edge()) {
            (true, true, _, _) => {
                obs.x += 1;
                match (a, b) {
                    (PairState::O0, PairState::O0) => obs.x0 += 1,
                    (PairState::O0, PairState::O1) | (PairState::O1, PairState::O0) => {
                        obs.x1 += 1
                    }
                    (PairState::O1, PairState::O1) => {
                        let wu = state.witness(u, w);
                        let wv = state.witness(v, w);
                        if wu != wv {
                            obs.x2 += 1;
                        }
                    }
                    _ => unreachable!(),
                }
            }
            (_, _, true, true) => obs.z += 1,
            (false, true, true, false) => tally_y(state, u, v, a, b, (v, w), &mut obs),
            (true, false, false, true) => tally_y(state, u, v, b, a, (u, w), &mut obs),
            _ => {}
        }
    }
    Ok(obs)
}

/// One side is the edge `edge_state`, the other is the open pair `open_pair`
/// in `open_state`.
fn tally_y(
    state: &ProcessState,
    u: u32,
    v: u32,
    edge_state: PairState,
    open_state: PairState,
    open_pair: (u32, u32),
    obs: &mut PairObservables,
) {
    obs.y += 1;
    match (edge_state, open_state) {
        (PairState::E0, PairState::O0) => obs.y00 += 1,
        (PairState::E0, PairState::O1) => {
            let z = state.witness(open_pair.0, open_pair.1);
            if z == Some(u) || z == Some(v) {
                obs.y00 += 1;
            } else {
                obs.y01 += 1;
            }
        }
        (PairState::E1, PairState::O0) => obs.y10 += 1,
        (PairState::E1, PairState::O1) => obs.y11 += 1,
        _ => unreachable!(),
    }
}

/// Counts the open-pair and edge classes incident to one vertex.
pub fn vertex_observables(state: &ProcessState, v: u32) -> VertexObservables {
    assert!(v < state.n(), "vertex {v} out of range for n = {}", state.n());
    let mut obs = VertexObservables::default();
    for u in 0..state.n() {
        if u == v {
            continue;
        }
        match state.state_of(v, u) {
            PairState::O0 => obs.w0 += 1,
            PairState::O1 => obs.w1 += 1,
            PairState::E0 => obs.d0 += 1,
            PairState::E1 => obs.d1 += 1,
            PairState::C => {}
        }
    }
    obs
}

// ============================================================================
// Snapshots
// ============================================================================

/// Which pairs and vertices to probe in each snapshot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProbeConfig {
    pub pairs: Vec<PairId>,
    pub vertices: Vec<u32>,
}

/// Probe payload for one tracked pair. Tracking narrows once the pair
/// becomes an edge: a triangle-free edge still reports `x0` and `y00`, and a
/// triangle edge reports nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeValues {
    Full(PairObservables),
    EdgeTracked { x0: u64, y00: u64 },
    Stopped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairProbe {
    pub pair: PairId,
    pub state: PairState,
    pub values: ProbeValues,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexProbe {
    pub vertex: u32,
    pub values: VertexObservables,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    /// Step count when taken.
    pub i: u64,
    /// Scaled time i / n^{3/2}.
    pub t: f64,
    pub q0: u64,
    pub q1: u64,
    pub m0: u64,
    pub m1: u64,
    pub blue: u64,
    pub green: u64,
    pub max_degree: u32,
    pub max_codegree: u32,
    pub pair_probes: Vec<PairProbe>,
    pub vertex_probes: Vec<VertexProbe>,
}

/// Captures counters, the codegree maximum, and all probe values.
pub fn snapshot(state: &ProcessState, probes: &ProbeConfig) -> Snapshot {
    let pair_probes = probes
        .pairs
        .iter()
        .map(|&p| {
            let s = state.pair_state(p);
            let (u, v) = p.vertices(state.n());
            let values = match s {
                PairState::E1 => ProbeValues::Stopped,
                PairState::E0 => {
                    let obs = pair_observables(state, u, v)
                        .expect("probe pairs are validated at selection");
                    ProbeValues::EdgeTracked {
                        x0: obs.x0,
                        y00: obs.y00,
                    }
                }
                _ => ProbeValues::Full(
                    pair_observables(state, u, v)
                        .expect("probe pairs are validated at selection"),
                ),
            };
            PairProbe {
                pair: p,
                state: s,
                values,
            }
        })
        .collect();
    let vertex_probes = probes
        .vertices
        .iter()
        .map(|&v| VertexProbe {
            vertex: v,
            values: vertex_observables(state, v),
        })
        .collect();
    Snapshot {
        i: state.step(),
        t: state.t(),
        q0: state.q0(),
        q1: state.q1(),
        m0: state.m0(),
        m1: state.m1(),
        blue: state.blue_count(),
        green: state.green_count(),
        max_degree: state.max_degree(),
        max_codegree: max_codegree(state),
        pair_probes,
        vertex_probes,
    }
}

/// Largest codegree over all vertex pairs. Exact by full enumeration at
/// small n; otherwise estimated from 1e5 pairs drawn from a snapshot-local
/// stream, folding in the triangle edges (each has codegree exactly 1).
pub fn max_codegree(state: &ProcessState) -> u32 {
    let n = state.n();
    if n <= EXACT_CODEGREE_N {
        let mut best = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                best = best.max(state.codegree(u, v));
            }
        }
        return best;
    }
    let total = pair_count(n);
    let mut stream = state.snapshot_stream();
    let mut best = if state.m1() > 0 { 1 } else { 0 };
    for _ in 0..CODEGREE_SAMPLES {
        let p = PairId(stream.bounded(total) as u32);
        let (u, v) = p.vertices(n);
        best = best.max(state.codegree(u, v));
    }
    best
}
