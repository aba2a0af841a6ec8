//! Oracles written against the raw profile, independent of the library's
//! scoring and search code.

#![allow(dead_code)]

use committee::rational::Rational;
use committee::Instance;
use num_traits::Zero;

/// Σ_v Σ_{j ≤ |A_v ∩ S|} λ^v_j, straight from the definition.
pub fn score(instance: &Instance, members: &[usize]) -> Rational {
    let graph = instance.graph();
    let mut total = Rational::zero();
    for v in 0..graph.voter_count() {
        let hits = graph.approvals(v).iter().filter(|c| members.contains(c)).count();
        for w in instance.family().vector(v).weights().iter().take(hits) {
            total += w;
        }
    }
    total
}

/// Every subset of `0..m` with at most `k` elements, as bitmasks.
pub fn small_subsets(m: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    assert!(m <= 24);
    (0u32..1 << m)
        .filter(move |mask| mask.count_ones() as usize <= k)
        .map(move |mask| (0..m).filter(|&c| mask >> c & 1 == 1).collect())
}

/// Best score over committees of size at most `k`.
pub fn opt(instance: &Instance) -> Rational {
    let m = instance.graph().candidate_count();
    small_subsets(m, instance.k())
        .map(|s| score(instance, &s))
        .max()
        .unwrap_or_else(Rational::zero)
}

/// All subsets of `0..m` of size exactly `min(k, m)`.
pub fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let size = k.min(m);
    small_subsets(m, size).filter(|s| s.len() == size).collect()
}
