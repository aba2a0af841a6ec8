//! Exhaustive k-subset search; the oracle everything else is checked against.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::graph::ProfileGraph;
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::report::{Committee, Parameters, Recorder, SolveOutcome};
use crate::score::{OwaFamily, Tally};

pub const DEFAULT_SUBSET_BUDGET: u64 = 2_000_000;

/// Best subset found by [`best_subset`].
#[derive(Debug, Clone)]
pub(crate) struct Search {
    pub members: Vec<usize>,
    pub score: Rational,
    pub examined: u64,
}

/// Maximum-score subset of `pool` of size `min(k, |pool|)`. Subsets are
/// visited in lexicographic order of the (sorted) pool and only a strictly
/// better score replaces the incumbent, so ties go to the first subset.
pub(crate) fn best_subset(
    graph: &ProfileGraph,
    family: &OwaFamily,
    pool: &[usize],
    k: usize,
    budget: u64,
) -> Result<Search> {
    let mut pool = pool.to_vec();
    pool.sort_unstable();
    let size = k.min(pool.len());
    let count = rational::binomial(pool.len(), size);
    if count.to_u64().is_none_or(|n| n > budget) {
        return Err(Error::BudgetExceeded {
            what: "subset enumeration",
            needed: count.to_string(),
            budget: budget.to_string(),
        });
    }
    let mut tally = Tally::new(graph, family);
    let mut best = Search { members: Vec::new(), score: Rational::default(), examined: 0 };
    let mut first = true;
    descend(&pool, 0, size, &mut tally, &mut best, &mut first);
    Ok(best)
}

fn descend(
    pool: &[usize],
    from: usize,
    size: usize,
    tally: &mut Tally<'_>,
    best: &mut Search,
    first: &mut bool,
) {
    if tally.members().len() == size {
        best.examined += 1;
        if *first || *tally.score() > best.score {
            *first = false;
            best.score = tally.score().clone();
            best.members = tally.members().to_vec();
        }
        return;
    }
    let missing = size - tally.members().len();
    for i in from..=pool.len() - missing {
        tally.add(pool[i]);
        descend(pool, i + 1, size, tally, best, first);
        tally.pop();
    }
}

/// Maximum-score committee of size `min(k, |C|)`; "no-instance" when a
/// threshold is set and the optimum misses it.
pub fn brute_force(instance: &Instance) -> Result<SolveOutcome> {
    brute_force_with_budget(instance, DEFAULT_SUBSET_BUDGET)
}

pub fn brute_force_with_budget(instance: &Instance, budget: u64) -> Result<SolveOutcome> {
    let mut rec = Recorder::start("exact", instance, Parameters::default());
    let graph = instance.graph();
    let all: Vec<usize> = (0..graph.candidate_count()).collect();
    let found = best_subset(graph, instance.family(), &all, instance.k(), budget)?;
    rec.stats.subsets_examined = found.examined;
    let committee = Committee::new(instance, found.members, instance.k());
    let meets = instance.threshold().is_none_or(|t| committee.score >= *t);
    Ok(rec.finish(instance, meets.then_some(committee)))
}

/// Optimum score over committees of size at most `k` (internal units).
pub fn optimum(instance: &Instance) -> Result<Rational> {
    let graph = instance.graph();
    let all: Vec<usize> = (0..graph.candidate_count()).collect();
    Ok(best_subset(graph, instance.family(), &all, instance.k(), DEFAULT_SUBSET_BUDGET)?.score)
}
