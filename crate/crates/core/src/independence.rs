//! Independent sets in small graphs given as edge lists.

/// Greedy independent set: repeatedly take a vertex of minimum degree in the
/// surviving graph (lowest id on ties) and delete its closed neighborhood.
/// Returns the chosen vertices in pick order.
pub fn greedy_min_degree(n: u32, edges: &[(u32, u32)]) -> Vec<u32> {
    let n = n as usize;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut remaining = n;
    let mut picked = Vec::new();
    while remaining > 0 {
        let mut best = usize::MAX;
        let mut best_deg = usize::MAX;
        for v in 0..n {
            if alive[v] && degree[v] < best_deg {
                best = v;
                best_deg = degree[v];
            }
        }
        let v = best;
        picked.push(v as u32);
        let mut dropped = vec![v as u32];
        for &w in &adj[v] {
            if alive[w as usize] {
                dropped.push(w);
            }
        }
        for &d in &dropped {
            if alive[d as usize] {
                alive[d as usize] = false;
                remaining -= 1;
                for &w in &adj[d as usize] {
                    if alive[w as usize] {
                        degree[w as usize] -= 1;
                    }
                }
            }
        }
    }
    picked
}

/// Exact maximum independent set size by branch and bound over bitmasks.
/// Supports n up to 64.
pub fn exact_max_independent(n: u32, edges: &[(u32, u32)]) -> u64 {
    assert!(n <= 64, "exact search is limited to 64 vertices, got {n}");
    let mut adj = vec![0u64; n as usize];
    for &(u, v) in edges {
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0;
    branch(all, 0, &adj, &mut best);
    best
}

fn branch(cand: u64, current: u64, adj: &[u64], best: &mut u64) {
    if current + cand.count_ones() as u64 <= *best {
        return;
    }
    if cand == 0 {
        *best = current;
        return;
    }
    // Branch on a candidate of maximum degree within the candidate set; a
    // candidate with no candidate neighbors is always taken.
    let mut pick = u32::MAX;
    let mut pick_deg = 0i64;
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros();
        rest &= rest - 1;
        let deg = (adj[v as usize] & cand).count_ones() as i64;
        if pick == u32::MAX || deg > pick_deg {
            pick = v;
            pick_deg = deg;
        }
    }
    let bit = 1u64 << pick;
    branch(cand & !adj[pick as usize] & !bit, current + 1, adj, best);
    if pick_deg > 0 {
        branch(cand & !bit, current, adj, best);
    }
}
