//! Cross-checks of the incremental engine against brute-force recomputation.
//!
//! Everything here runs two independent implementations of the same
//! quantity and demands agreement: lockstep replays against the naive
//! process, classification table rebuilds, one-step expectation formulas
//! against full enumeration, and terminal-state audits. Slow by design;
//! sized for small n.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{self, NaiveProcess};
use crate::pair::PairState;
use crate::process::ProcessState;

use super::persist::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub n: u32,
    pub seeds: Vec<u64>,
}

impl VerifyConfig {
    pub fn new(n: u32, seeds: Vec<u64>) -> Result<VerifyConfig> {
        if !(4..=30).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "verification wants 4 <= n <= 30, got {n}"
            )));
        }
        if seeds.is_empty() {
            return Err(Error::InvalidParameter("no seeds given".into()));
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seeds.len() {
            return Err(Error::InvalidParameter("duplicate seeds".into()));
        }
        Ok(VerifyConfig { n, seeds })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub n: u32,
    pub seeds: Vec<u64>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Runs the whole cross-check battery; a failed comparison becomes a failed
/// check, not an error.
pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let checks = vec![
        lockstep_check(cfg)?,
        classification_check(cfg)?,
        delta_check(cfg)?,
        termination_check(cfg)?,
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        schema: SCHEMA_VERSION,
        n: cfg.n,
        seeds: cfg.seeds.clone(),
        checks,
        pass,
    })
}

fn table_of(state: &ProcessState) -> Vec<PairState> {
    let n = state.n();
    let mut table = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            table.push(state.state_of(u, v));
        }
    }
    table
}

/// Same seed, two engines, one insertion at a time, full table equality
/// after every step until both terminate together.
fn lockstep_check(cfg: &VerifyConfig) -> Result<Check> {
    let mut steps_total = 0u64;
    for &seed in &cfg.seeds {
        let mut fast = ProcessState::init(cfg.n, seed)?;
        let mut naive = NaiveProcess::new(cfg.n, seed);
        loop {
            let picked = match fast.sample_open_canonical() {
                Ok(p) => p,
                Err(Error::Terminated) => {
                    if naive.step().is_some() {
                        return Ok(fail(
                            "lockstep",
                            format!("seed {seed}: fast engine stopped first"),
                        ));
                    }
                    break;
                }
                Err(e) => return Err(e),
            };
            let Some(naive_pick) = naive.step() else {
                return Ok(fail(
                    "lockstep",
                    format!("seed {seed}: naive engine stopped first"),
                ));
            };
            if picked != naive_pick {
                let (u, v) = picked.vertices(cfg.n);
                let (nu, nv) = naive_pick.vertices(cfg.n);
                return Ok(fail(
                    "lockstep",
                    format!(
                        "seed {seed} step {}: picked ({u},{v}) vs ({nu},{nv})",
                        fast.step()
                    ),
                ));
            }
            fast.apply_edge(picked)?;
            steps_total += 1;
            let expected = oracle::naive_classify_all(&naive.graph)?;
            if table_of(&fast) != expected {
                return Ok(fail(
                    "lockstep",
                    format!(
                        "seed {seed} step {}: classification tables differ",
                        fast.step()
                    ),
                ));
            }
        }
    }
    Ok(pass(
        "lockstep",
        format!(
            "{} seeds replayed to termination, {} steps, tables equal throughout",
            cfg.seeds.len(),
            steps_total
        ),
    ))
}

/// Random greedy graphs replayed through the engine's pure classifier
/// against literal insert-and-retest classification.
fn classification_check(cfg: &VerifyConfig) -> Result<Check> {
    let mut graphs = 0u64;
    for &seed in &cfg.seeds {
        for round in 0..5u64 {
            let target = (cfg.n as usize * (round as usize + 1)) / 4;
            let graph = oracle::random_greedy_graph(cfg.n, seed ^ (round << 32), target);
            let mut state = ProcessState::init(cfg.n, 0)?;
            for &(u, v) in graph.edges() {
                state.apply_edge(crate::pair::PairId::encode(u, v, cfg.n))?;
            }
            let expected = oracle::naive_classify_all(&graph)?;
            let mut idx = 0usize;
            for u in 0..cfg.n {
                for v in (u + 1)..cfg.n {
                    let got = state.classify_pair(u, v)?;
                    let cached = state.state_of(u, v);
                    if got != expected[idx] || cached != expected[idx] {
                        return Ok(fail(
                            "classification",
                            format!(
                                "seed {seed} round {round} pair ({u},{v}): engine {got:?}/{cached:?}, oracle {:?}",
                                expected[idx]
                            ),
                        ));
                    }
                    idx += 1;
                }
            }
            graphs += 1;
        }
    }
    Ok(pass(
        "classification",
        format!("{graphs} replayed graphs, every pair agrees with reclassification"),
    ))
}

/// One-step expected count changes from the closed formulas against full
/// enumeration over the open list, on mid-run states.
fn delta_check(cfg: &VerifyConfig) -> Result<Check> {
    let mut states = 0u64;
    for &seed in &cfg.seeds {
        for steps in [1u64, 3, 6, 10] {
            let state = oracle::random_mid_state(cfg.n, seed.wrapping_add(steps), steps);
            if state.open_count() == 0 {
                continue;
            }
            match oracle::exact_expected_deltas(&state) {
                Ok(_) => states += 1,
                Err(Error::Terminated) => continue,
                Err(e) => {
                    return Ok(fail(
                        "one-step deltas",
                        format!("seed {seed} after {steps} steps: {e}"),
                    ))
                }
            }
        }
    }
    Ok(pass(
        "one-step deltas",
        format!("{states} states, formula and enumeration agree exactly"),
    ))
}

/// Full runs end diamond-free, internally consistent, and with no open
/// pair left.
fn termination_check(cfg: &VerifyConfig) -> Result<Check> {
    for &seed in &cfg.seeds {
        let mut state = ProcessState::init(cfg.n, seed)?;
        state.run(
            crate::process::StopRule::ToTermination,
            &crate::process::RecordRule::endpoints_only(),
        )?;
        if state.open_count() != 0 {
            return Ok(fail(
                "termination",
                format!("seed {seed}: run stopped with open pairs left"),
            ));
        }
        if let Err(e) = state.validate_full() {
            return Ok(fail("termination", format!("seed {seed}: {e}")));
        }
        if !state.is_diamond_free() {
            return Ok(fail(
                "termination",
                format!("seed {seed}: final graph has an edge on two triangles"),
            ));
        }
    }
    Ok(pass(
        "termination",
        format!(
            "{} full runs end maximal, consistent, and diamond-free",
            cfg.seeds.len()
        ),
    ))
}

fn pass(name: &str, detail: String) -> Check {
    Check {
        name: name.to_string(),
        pass: true,
        detail,
    }
}

fn fail(name: &str, detail: String) -> Check {
    Check {
        name: name.to_string(),
        pass: false,
        detail,
    }
}
