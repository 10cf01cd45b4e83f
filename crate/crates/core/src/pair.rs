//! Canonical indexing of unordered vertex pairs and the five-way pair
//! classification the process maintains.
//!
//! Pairs over the vertex set [0, n) are numbered row by row in the upper
//! triangle: {0,1} → 0, {0,2} → 1, ..., {0,n−1} → n−2, {1,2} → n−1, and so
//! on, for n(n−1)/2 ids total. The dense id is what the state tables and the
//! open-pair list are indexed by.

use serde::{Deserialize, Serialize};

/// Dense index of an unordered pair of vertices. Only meaningful together
/// with the n it was encoded for.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PairId(pub u32);

impl std::fmt::Debug for PairId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PairId({})", self.0)
    }
}

/// Number of unordered pairs over [0, n).
pub fn pair_count(n: u32) -> u64 {
    (n as u64) * (n as u64 - 1) / 2
}

/// Start of vertex u's row in the upper-triangle numbering.
fn row_base(u: u64, n: u64) -> u64 {
    u * (n - 1) - u * (u.saturating_sub(1)) / 2
}

impl PairId {
    pub fn encode(u: u32, v: u32, n: u32) -> PairId {
        debug_assert!(u != v && u < n && v < n);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let id = row_base(a as u64, n as u64) + (b - a - 1) as u64;
        debug_assert!(id < pair_count(n));
        PairId(id as u32)
    }

    /// Inverse of encode: returns (u, v) with u < v.
    ///
    /// The row is located by the quadratic formula in floating point and then
    /// corrected by at most a couple of integer steps, which keeps the lookup
    /// O(1) and exact for every id up to the u32 range.
    pub fn vertices(self, n: u32) -> (u32, u32) {
        let id = self.0 as u64;
        let nf = n as f64;
        let mut u = (nf - 0.5 - ((nf - 0.5) * (nf - 0.5) - 2.0 * id as f64).max(0.0).sqrt())
            .floor()
            .max(0.0) as u64;
        if u > n as u64 - 2 {
            u = n as u64 - 2;
        }
        while row_base(u, n as u64) > id {
            u -= 1;
        }
        while u + 1 <= n as u64 - 2 && row_base(u + 1, n as u64) <= id {
            u += 1;
        }
        let v = id - row_base(u, n as u64) + u + 1;
        debug_assert!(v < n as u64);
        (u as u32, v as u32)
    }
}

/// The five-way classification of a pair.
///
/// Edges split by the number of triangles they lie on (at most one in a
/// diamond-free graph); non-edges are open when their insertion keeps the
/// graph diamond-free and closed otherwise. Open pairs split by codegree:
/// O0 has none, O1 has exactly one common neighbor with both connecting
/// edges themselves triangle-free.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum PairState {
    /// Open, codegree 0.
    O0,
    /// Open, codegree 1, both edges to the common neighbor in E0.
    O1,
    /// Edge on no triangle.
    E0,
    /// Edge on its unique triangle.
    E1,
    /// Non-edge whose insertion would put some edge on two triangles.
    C,
}

impl PairState {
    #[inline]
    pub fn is_open(self) -> bool {
        matches!(self, PairState::O0 | PairState::O1)
    }

    #[inline]
    pub fn is_edge(self) -> bool {
        matches!(self, PairState::E0 | PairState::E1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_is_order_independent() {
        assert_eq!(PairId::encode(3, 7, 10), PairId::encode(7, 3, 10));
    }

    #[test]
    fn small_n_enumeration_matches_row_major_order() {
        // n = 4: {0,1} {0,2} {0,3} {1,2} {1,3} {2,3}
        let ids: Vec<u32> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(u, v)| PairId::encode(u, v, 4).0)
            .collect();
        assert_eq!(ids, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn decode_inverts_encode_exhaustively() {
        for n in 2u32..=60 {
            for u in 0..n {
                for v in (u + 1)..n {
                    let id = PairId::encode(u, v, n);
                    assert_eq!(id.vertices(n), (u, v), "n={n} u={u} v={v}");
                }
            }
        }
    }

    #[test]
    fn decode_inverts_encode_at_large_n() {
        // Spot-check the float row locator far beyond test scale.
        for n in [2_000u32, 20_000, 65_000] {
            let last = pair_count(n) - 1;
            for id in [0u64, 1, last / 3, last / 2, last - 1, last] {
                let p = PairId(id as u32);
                let (u, v) = p.vertices(n);
                assert_eq!(PairId::encode(u, v, n), p, "n={n} id={id}");
            }
        }
    }

    #[test]
    fn pair_count_matches_formula() {
        assert_eq!(pair_count(2), 1);
        assert_eq!(pair_count(4), 6);
        assert_eq!(pair_count(2000), 1_999_000);
    }
}
