//! Slow reference implementations used to cross-check the incremental
//! engine, plus exact one-step expectation formulas.
//!
//! Everything here favors literal definitions over speed: classification
//! works by actually inserting a candidate edge and re-testing the whole
//! graph, and the reference process re-classifies every pair at every step.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::observables::pair_observables;
use crate::pair::{pair_count, PairId, PairState};
use crate::process::ProcessState;
use crate::rng::Rng;

// ============================================================================
// Naive graph
// ============================================================================

/// Adjacency-matrix graph for small n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveGraph {
    n: u32,
    adj: Vec<Vec<bool>>,
    edges: Vec<(u32, u32)>,
}

impl NaiveGraph {
    pub fn new(n: u32) -> NaiveGraph {
        NaiveGraph {
            n,
            adj: vec![vec![false; n as usize]; n as usize],
            edges: Vec::new(),
        }
    }

    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Result<NaiveGraph> {
        let mut g = NaiveGraph::new(n);
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "bad edge ({u}, {v}) for n = {n}"
                )));
            }
            if g.has_edge(u, v) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({u}, {v})"
                )));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn add_edge(&mut self, u: u32, v: u32) {
        debug_assert!(u != v && !self.adj[u as usize][v as usize]);
        self.adj[u as usize][v as usize] = true;
        self.adj[v as usize][u as usize] = true;
        self.edges.push((u.min(v), u.max(v)));
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize][v as usize]
    }

    pub fn codegree(&self, u: u32, v: u32) -> u32 {
        let mut c = 0;
        for w in 0..self.n {
            if w != u && w != v && self.adj[u as usize][w as usize] && self.adj[v as usize][w as usize]
            {
                c += 1;
            }
        }
        c
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }
}

/// True iff every edge lies on at most one triangle.
pub fn is_diamond_free(g: &NaiveGraph) -> bool {
    g.edges().iter().all(|&(u, v)| g.codegree(u, v) <= 1)
}

/// Classifies every pair by the definitions alone: an edge is E0 or E1 by
/// its codegree; a non-edge is tentatively inserted and the whole graph
/// re-tested to decide open versus closed.
pub fn naive_classify_all(g: &NaiveGraph) -> Result<Vec<PairState>> {
    if !is_diamond_free(g) {
        return Err(Error::InvalidInput(
            "classification needs a diamond-free graph".into(),
        ));
    }
    let n = g.n();
    let mut out = Vec::with_capacity(pair_count(n) as usize);
    for p in 0..pair_count(n) {
        let (u, v) = PairId(p as u32).vertices(n);
        let state = if g.has_edge(u, v) {
            if g.codegree(u, v) == 0 {
                PairState::E0
            } else {
                PairState::E1
            }
        } else {
            let mut trial = g.clone();
            trial.add_edge(u, v);
            if is_diamond_free(&trial) {
                if g.codegree(u, v) == 0 {
                    PairState::O0
                } else {
                    PairState::O1
                }
            } else {
                PairState::C
            }
        };
        out.push(state);
    }
    Ok(out)
}

// ============================================================================
// Reference process
// ============================================================================

/// The process driven entirely by re-classification: every step lists the
/// open pairs in ascending id order and draws one bounded random index,
/// matching the incremental engine's canonical sampling draw for draw.
pub struct NaiveProcess {
    pub graph: NaiveGraph,
    rng: Rng,
}

impl NaiveProcess {
    pub fn new(n: u32, seed: u64) -> NaiveProcess {
        NaiveProcess {
            graph: NaiveGraph::new(n),
            rng: Rng::from_seed(seed),
        }
    }

    pub fn classify_all(&self) -> Vec<PairState> {
        naive_classify_all(&self.graph).expect("reference graph stays diamond-free")
    }

    /// Inserts one uniformly chosen open pair; None once no pair is open.
    pub fn step(&mut self) -> Option<PairId> {
        let classes = self.classify_all();
        let open: Vec<PairId> = (0..classes.len())
            .filter(|&i| classes[i].is_open())
            .map(|i| PairId(i as u32))
            .collect();
        if open.is_empty() {
            return None;
        }
        let chosen = open[self.rng.bounded(open.len() as u64) as usize];
        let (u, v) = chosen.vertices(self.graph.n());
        self.graph.add_edge(u, v);
        Some(chosen)
    }
}

// ============================================================================
// One-step expectations
// ============================================================================

/// Integer totals, over the open set, of the one-step class movements.
/// Dividing by `open_count` gives the expected per-step changes:
/// E[Q0 loss], E[Q1 gain], E[Q1 loss].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpectedDeltas {
    pub open_count: u64,
    pub q0_loss_total: u64,
    pub q1_gain_total: u64,
    pub q1_loss_total: u64,
}

impl ExpectedDeltas {
    pub fn mean_q0_loss(&self) -> f64 {
        self.q0_loss_total as f64 / self.open_count as f64
    }

    pub fn mean_q1_gain(&self) -> f64 {
        self.q1_gain_total as f64 / self.open_count as f64
    }

    pub fn mean_q1_loss(&self) -> f64 {
        self.q1_loss_total as f64 / self.open_count as f64
    }
}

/// Totals from the local-count formulas. For an O0 pair e the step removes
/// e itself plus its y00 and y10 vertices from Q0 and promotes the y00 ones
/// into Q1; for an O1 pair uv with witness z the Q1 losses also include the
/// open pairs riding on the edges uz and vz, with uv itself double-counted
/// once across those two.
pub fn expected_deltas_formula(state: &ProcessState) -> Result<ExpectedDeltas> {
    let mut totals = ExpectedDeltas {
        open_count: 0,
        q0_loss_total: 0,
        q1_gain_total: 0,
        q1_loss_total: 0,
    };
    let n = state.n();
    for u in 0..n {
        for v in (u + 1)..n {
            let s = state.state_of(u, v);
            if !s.is_open() {
                continue;
            }
            totals.open_count += 1;
            let obs = pair_observables(state, u, v)?;
            match s {
                PairState::O0 => {
                    totals.q0_loss_total += obs.y00 + obs.y10 + 1;
                    totals.q1_gain_total += obs.y00;
                    totals.q1_loss_total += obs.y01 + obs.y11;
                }
                PairState::O1 => {
                    let z = state.witness(u, v).expect("O1 pair has a witness");
                    let uz = pair_observables(state, u, z)?;
                    let vz = pair_observables(state, v, z)?;
                    totals.q0_loss_total += obs.y00 + obs.y10;
                    totals.q1_loss_total += obs.y01 + obs.y11 + uz.y00 + vz.y00 - 1;
                }
                _ => unreachable!(),
            }
        }
    }
    if totals.open_count == 0 {
        return Err(Error::Terminated);
    }
    Ok(totals)
}

/// Totals by brute force: applies every open pair to a copy of the state
/// and tallies the realized transitions.
pub fn expected_deltas_enumerated(state: &ProcessState) -> Result<ExpectedDeltas> {
    let mut totals = ExpectedDeltas {
        open_count: 0,
        q0_loss_total: 0,
        q1_gain_total: 0,
        q1_loss_total: 0,
    };
    let n = state.n();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = PairId::encode(u, v, n);
            if !state.pair_state(p).is_open() {
                continue;
            }
            totals.open_count += 1;
            let mut copy = state.clone();
            let delta = copy.apply_edge(p)?;
            for tr in &delta.transitions {
                match (tr.from, tr.to) {
                    (PairState::O0, PairState::O1) => {
                        totals.q0_loss_total += 1;
                        totals.q1_gain_total += 1;
                    }
                    (PairState::O0, _) => totals.q0_loss_total += 1,
                    (PairState::O1, _) => totals.q1_loss_total += 1,
                    _ => {}
                }
            }
        }
    }
    if totals.open_count == 0 {
        return Err(Error::Terminated);
    }
    Ok(totals)
}

/// Formula totals, cross-checked against enumeration; the two must agree
/// exactly as integers.
pub fn exact_expected_deltas(state: &ProcessState) -> Result<ExpectedDeltas> {
    let formula = expected_deltas_formula(state)?;
    let enumerated = expected_deltas_enumerated(state)?;
    if formula != enumerated {
        return Err(Error::InvalidInput(format!(
            "one-step expectation mismatch: formula {formula:?}, enumeration {enumerated:?}"
        )));
    }
    Ok(formula)
}

// ============================================================================
// Multiply-partial pairs
// ============================================================================

/// Counts the open pairs partial to at least two members of `pairs`. A pair
/// is partial to a member {u, v} when it shares one endpoint and its other
/// endpoint is joined to the opposite member vertex by an edge. Members on
/// a triangle are rejected; duplicate members count once.
pub fn count_multiply_partial(state: &ProcessState, pairs: &[PairId]) -> Result<u64> {
    let n = state.n();
    let mut members: Vec<PairId> = pairs.to_vec();
    members.sort_unstable();
    members.dedup();
    for &p in &members {
        if (p.0 as u64) >= pair_count(n) {
            return Err(Error::InvalidParameter(format!(
                "pair id {} out of range",
                p.0
            )));
        }
        if state.pair_state(p) == PairState::E1 {
            let (u, v) = p.vertices(n);
            return Err(Error::InvalidParameter(format!(
                "pair ({u}, {v}) lies on a triangle; partials are not tracked past that"
            )));
        }
    }
    let mut hits: HashMap<PairId, u32> = HashMap::new();
    for &m in &members {
        let (u, v) = m.vertices(n);
        for w in 0..n {
            if w == u || w == v {
                continue;
            }
            let uw = state.state_of(u, w);
            let vw = state.state_of(v, w);
            if uw.is_edge() && vw.is_open() {
                *hits.entry(PairId::encode(v, w, n)).or_insert(0) += 1;
            } else if vw.is_edge() && uw.is_open() {
                *hits.entry(PairId::encode(u, w, n)).or_insert(0) += 1;
            }
        }
    }
    Ok(hits.values().filter(|&&c| c >= 2).count() as u64)
}

// ============================================================================
// Fixtures
// ============================================================================

/// A process state advanced by `steps` random insertions (fewer if the
/// process dies first).
pub fn random_mid_state(n: u32, seed: u64, steps: u64) -> ProcessState {
    let mut st = ProcessState::init(n, seed).expect("fixture parameters are valid");
    for _ in 0..steps {
        match st.sample_open() {
            Ok(p) => {
                st.apply_edge(p).expect("sampled pairs are open");
            }
            Err(_) => break,
        }
    }
    st
}

/// A diamond-free graph grown greedily along a shuffled pair order,
/// stopping after `target_edges` insertions or when no pair fits.
pub fn random_greedy_graph(n: u32, seed: u64, target_edges: usize) -> NaiveGraph {
    let mut rng = Rng::from_seed(seed);
    let total = pair_count(n);
    let mut order: Vec<u32> = (0..total as u32).collect();
    for i in (1..order.len()).rev() {
        let j = rng.bounded(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    let mut g = NaiveGraph::new(n);
    let mut added = 0;
    for id in order {
        if added >= target_edges {
            break;
        }
        let (u, v) = PairId(id).vertices(n);
        if g.has_edge(u, v) {
            continue;
        }
        let mut trial = g.clone();
        trial.add_edge(u, v);
        if is_diamond_free(&trial) {
            g = trial;
            added += 1;
        }
    }
    g
}
