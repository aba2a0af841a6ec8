//! The bipartite candidate-voter profile graph and its structural analysis:
//! degree statistics, the `K_{d,d}`-freeness parameter, sunflower search and
//! high-degree sets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default cap for [`kdd_parameter`].
pub const DEFAULT_KDD_CAP: usize = 4;

/// Candidate-voter approval structure. Candidates and voters are addressed
/// by their position in declaration order, which is also the tie-break order
/// used throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileGraph {
    candidates: Vec<String>,
    voters: Vec<String>,
    approvals: Vec<Vec<usize>>,
    approvers: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl ProfileGraph {
    /// Builds the graph from candidate ids and `(voter id, approved candidate
    /// indices)` records. Empty approval sets are rejected.
    pub fn new(candidates: Vec<String>, voters: Vec<(String, Vec<usize>)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(candidates.len());
        for (i, id) in candidates.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let mut voter_ids = Vec::with_capacity(voters.len());
        let mut approvals = Vec::with_capacity(voters.len());
        let mut approvers = vec![Vec::new(); candidates.len()];
        let mut seen_voters = HashMap::new();
        for (v, (id, mut set)) in voters.into_iter().enumerate() {
            if seen_voters.insert(id.clone(), v).is_some() {
                return Err(Error::DuplicateId(id));
            }
            if set.is_empty() {
                return Err(Error::EmptyApprovals(id));
            }
            set.sort_unstable();
            if let Some(w) = set.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateMember(w[0]));
            }
            if let Some(&c) = set.iter().find(|&&c| c >= candidates.len()) {
                return Err(Error::UnknownCandidateIndex(c));
            }
            for &c in &set {
                approvers[c].push(v);
            }
            voter_ids.push(id);
            approvals.push(set);
        }
        Ok(Self {
            candidates,
            voters: voter_ids,
            approvals,
            approvers,
            index,
        })
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn voter_count(&self) -> usize {
        self.voters.len()
    }

    pub fn candidate_ids(&self) -> &[String] {
        &self.candidates
    }

    pub fn voter_ids(&self) -> &[String] {
        &self.voters
    }

    pub fn candidate_id(&self, c: usize) -> &str {
        &self.candidates[c]
    }

    pub fn voter_id(&self, v: usize) -> &str {
        &self.voters[v]
    }

    pub fn candidate_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// `A_v`, sorted.
    pub fn approvals(&self, voter: usize) -> &[usize] {
        &self.approvals[voter]
    }

    /// `N(c)`, sorted.
    pub fn approvers(&self, candidate: usize) -> &[usize] {
        &self.approvers[candidate]
    }

    pub fn degree(&self, candidate: usize) -> usize {
        self.approvers[candidate].len()
    }

    pub fn edge_count(&self) -> usize {
        self.approvals.iter().map(Vec::len).sum()
    }

    /// Removes the given candidates, then drops voters left without
    /// approvals. Returns the new graph together with the surviving voters'
    /// indices in the old graph.
    pub fn without_candidates(&self, removed: &[usize]) -> (ProfileGraph, Vec<usize>) {
        let mut gone = vec![false; self.candidates.len()];
        for &c in removed {
            gone[c] = true;
        }
        let mut remap = vec![usize::MAX; self.candidates.len()];
        let mut candidates = Vec::new();
        for (c, id) in self.candidates.iter().enumerate() {
            if !gone[c] {
                remap[c] = candidates.len();
                candidates.push(id.clone());
            }
        }
        let mut kept = Vec::new();
        let mut voters = Vec::new();
        for (v, set) in self.approvals.iter().enumerate() {
            let set: Vec<usize> = set.iter().filter(|&&c| !gone[c]).map(|&c| remap[c]).collect();
            if !set.is_empty() {
                kept.push(v);
                voters.push((self.voters[v].clone(), set));
            }
        }
        let graph = ProfileGraph::new(candidates, voters).expect("sub-graph of a valid graph");
        (graph, kept)
    }

    /// Keeps only the listed voters, in the given order.
    pub fn with_voters(&self, keep: &[usize]) -> ProfileGraph {
        let voters = keep
            .iter()
            .map(|&v| (self.voters[v].clone(), self.approvals[v].clone()))
            .collect();
        ProfileGraph::new(self.candidates.clone(), voters).expect("sub-graph of a valid graph")
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// True iff some `a` candidates are all approved by the same `b` voters.
///
/// Enumerates candidate subsets depth-first, cutting a branch as soon as the
/// running common neighbourhood drops below `b`.
pub fn contains_biclique(graph: &ProfileGraph, a: usize, b: usize) -> bool {
    assert!(a >= 1 && b >= 1, "biclique sides must be positive");
    let mut pool: Vec<usize> = (0..graph.candidate_count())
        .filter(|&c| graph.degree(c) >= b)
        .collect();
    if pool.len() < a {
        return false;
    }
    pool.sort_by_key(|&c| std::cmp::Reverse(graph.degree(c)));
    biclique_from(graph, &pool, 0, a, b, None)
}

fn biclique_from(
    graph: &ProfileGraph,
    pool: &[usize],
    start: usize,
    remaining: usize,
    b: usize,
    common: Option<&[usize]>,
) -> bool {
    if remaining == 0 {
        return true;
    }
    for i in start..pool.len() {
        if pool.len() - i < remaining {
            break;
        }
        let next = match common {
            None => graph.approvers(pool[i]).to_vec(),
            Some(common) => intersect_sorted(common, graph.approvers(pool[i])),
        };
        if next.len() >= b && biclique_from(graph, pool, i + 1, remaining - 1, b, Some(&next)) {
            return true;
        }
    }
    false
}

/// Smallest `d <= cap` such that the graph is `K_{d,d}`-free, or `cap + 1`
/// when every `d` up to the cap still has a biclique.
pub fn kdd_parameter(graph: &ProfileGraph, cap: usize) -> usize {
    assert!(cap >= 1, "cap must be positive");
    (1..=cap)
        .find(|&d| !contains_biclique(graph, d, d))
        .unwrap_or(cap + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    /// `Δ_C`: the largest number of voters approving one candidate.
    pub delta_c: usize,
    /// `δ`: the largest approval set.
    pub delta_v: usize,
    /// The `K_{d,d}` parameter.
    pub d: usize,
    /// False when `d` hit the cap and is only a lower bound.
    pub d_determined: bool,
}

pub fn degree_stats(graph: &ProfileGraph, cap: usize) -> DegreeStats {
    let delta_c = (0..graph.candidate_count())
        .map(|c| graph.degree(c))
        .max()
        .unwrap_or(0);
    let delta_v = (0..graph.voter_count())
        .map(|v| graph.approvals(v).len())
        .max()
        .unwrap_or(0);
    let d = kdd_parameter(graph, cap);
    DegreeStats {
        delta_c,
        delta_v,
        d,
        d_determined: d <= cap,
    }
}

/// Candidates whose pairwise approver intersections all equal `core`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sunflower {
    pub members: Vec<usize>,
    pub core: Vec<usize>,
}

impl Sunflower {
    /// Checks the defining property by direct set comparison.
    pub fn is_valid(&self, graph: &ProfileGraph) -> bool {
        if self.members.len() < 2 {
            return self
                .members
                .first()
                .map_or(self.core.is_empty(), |&x| {
                    intersect_sorted(graph.approvers(x), &self.core) == self.core
                });
        }
        for (i, &x) in self.members.iter().enumerate() {
            for &y in &self.members[i + 1..] {
                if intersect_sorted(graph.approvers(x), graph.approvers(y)) != self.core {
                    return false;
                }
            }
        }
        true
    }

    pub fn petal(&self, graph: &ProfileGraph, member: usize) -> Vec<usize> {
        graph
            .approvers(member)
            .iter()
            .copied()
            .filter(|v| self.core.binary_search(v).is_err())
            .collect()
    }
}

/// Minimum `|C|` that forces a sunflower of size `w` in a `K_{d,d}`-free
/// graph whose candidate degrees are at most `ell`: `d·((w-1)·ell)^d`.
pub fn sunflower_guarantee(d: usize, ell: usize, w: usize) -> Rational {
    let base = rational::from_usize(w.saturating_sub(1) * ell);
    rational::from_usize(d) * rational::pow(&base, d)
}

/// Searches `pool` for a sunflower with at least `min_size` members.
///
/// Grows a core `R` from the empty set: candidates containing `R` whose
/// petals `N(x) \ R` are pairwise disjoint are collected greedily in index
/// order. When fewer than `min_size` are found, every remaining candidate's
/// petal meets the collected petals, so some collected voter `u` lies in many
/// of them; the search continues on the candidates approved by `u` with core
/// `R ∪ {u}`, trying voters in decreasing frequency.
pub fn find_sunflower(graph: &ProfileGraph, pool: &[usize], min_size: usize) -> Option<Sunflower> {
    let min_size = min_size.max(1);
    let mut pool = pool.to_vec();
    pool.sort_unstable();
    pool.dedup();
    if pool.len() < min_size {
        return None;
    }
    grow_core(graph, &pool, &[], min_size)
}

fn grow_core(
    graph: &ProfileGraph,
    pool: &[usize],
    core: &[usize],
    min_size: usize,
) -> Option<Sunflower> {
    let in_core = |v: &usize| core.binary_search(v).is_ok();
    let mut used = vec![false; graph.voter_count()];
    let mut members = Vec::new();
    for &x in pool {
        let petal = graph.approvers(x).iter().filter(|v| !in_core(v));
        if petal.clone().all(|&v| !used[v]) {
            for &v in petal {
                used[v] = true;
            }
            members.push(x);
        }
    }
    if members.len() >= min_size {
        return Some(Sunflower {
            members,
            core: core.to_vec(),
        });
    }

    let mut frequency: HashMap<usize, usize> = HashMap::new();
    for &x in pool {
        for &v in graph.approvers(x) {
            if used[v] && !in_core(&v) {
                *frequency.entry(v).or_default() += 1;
            }
        }
    }
    let mut voters: Vec<(usize, usize)> = frequency
        .into_iter()
        .filter(|&(_, n)| n >= min_size)
        .collect();
    voters.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    for (u, _) in voters {
        let sub_pool: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|&x| graph.approvers(x).binary_search(&u).is_ok())
            .collect();
        let mut sub_core = core.to_vec();
        let at = sub_core.binary_search(&u).unwrap_err();
        sub_core.insert(at, u);
        if let Some(found) = grow_core(graph, &sub_pool, &sub_core, min_size) {
            return Some(found);
        }
    }
    None
}

/// `HD_β(X)`: candidates with `|N(c)| >= d` and `|N(c) ∩ X| >= |X| / β`.
pub fn high_degree_set(graph: &ProfileGraph, voters: &[usize], beta: &Rational, d: usize) -> Vec<usize> {
    let mut x = voters.to_vec();
    x.sort_unstable();
    x.dedup();
    let need = rational::from_usize(x.len()) / beta;
    (0..graph.candidate_count())
        .filter(|&c| graph.degree(c) >= d)
        .filter(|&c| rational::from_usize(intersect_sorted(graph.approvers(c), &x).len()) >= need)
        .collect()
}
