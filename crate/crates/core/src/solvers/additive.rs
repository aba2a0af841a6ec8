//! One-additive approximation: a committee of size at most `k + 1` reaching
//! the threshold, or a certified "no-instance".

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::reductions::{by_singleton_score, check_degree_bound, sunflower_sweep};
use crate::report::{Committee, Overrides, Parameters, Recorder, SolveOutcome, Stats};
use crate::score::restrict;
use crate::solvers::exact::{best_subset, DEFAULT_SUBSET_BUDGET};
use crate::solvers::fptas::fptas_core;

/// Replacements for the size and threshold gates, whose true values keep
/// every desk-scale instance on the exact-search path.
#[derive(Debug, Clone, Default)]
pub struct AdditiveTuning {
    /// Exact search when `|C|` is at most this.
    pub exact_gate: Option<usize>,
    /// Sunflower path when `t` is at most this (internal units).
    pub low_threshold: Option<Rational>,
    /// Size of the high-degree set `H`.
    pub high_degree_size: Option<usize>,
    /// Passed to the inner approximation scheme.
    pub fptas: Overrides,
}

pub fn additive(instance: &Instance) -> Result<SolveOutcome> {
    additive_tuned(instance, &AdditiveTuning::default())
}

pub fn additive_tuned(instance: &Instance, tuning: &AdditiveTuning) -> Result<SolveOutcome> {
    let params = Parameters { overrides: tuning.fptas.clone(), ..Parameters::default() };
    let mut rec = Recorder::start("additive", instance, params);
    instance.threshold().ok_or(Error::MissingThreshold)?;
    let found = solve(instance, tuning, &mut rec.stats)?;
    let committee = found.map(|members| Committee::new(instance, members, instance.k() + 1));
    Ok(rec.finish(instance, committee))
}

fn exact_decision(instance: &Instance, pool: &[usize], t: &Rational, stats: &mut Stats) -> Result<Option<Vec<usize>>> {
    let best = best_subset(instance.graph(), instance.family(), pool, instance.k(), DEFAULT_SUBSET_BUDGET)?;
    stats.subsets_examined += best.examined;
    Ok((best.score >= *t).then_some(best.members))
}

fn solve(instance: &Instance, tuning: &AdditiveTuning, stats: &mut Stats) -> Result<Option<Vec<usize>>> {
    stats.recursive_calls += 1;
    let t = instance.threshold().ok_or(Error::MissingThreshold)?.clone();
    let k = instance.k();
    let graph = instance.graph();
    if t <= Rational::zero() {
        return Ok(Some(Vec::new()));
    }
    if k == 0 || graph.voter_count() == 0 {
        return Ok(None);
    }
    let m = graph.candidate_count();
    let all: Vec<usize> = (0..m).collect();
    let d = instance.degree_stats().d;
    let lambda_min = instance.family().lambda_min().clone();
    let kk = rational::from_usize(k);
    let dm1 = rational::from_usize(d.saturating_sub(1));

    let gate = match tuning.exact_gate {
        Some(g) => rational::from_usize(g),
        None => &kk * &dm1 * rational::pow(&(rational::int(4) * &kk * &kk), d.saturating_sub(1)) + rational::int(1),
    };
    if rational::from_usize(m) <= gate {
        stats.note("exact");
        return exact_decision(instance, &all, &t, stats);
    }

    let low = tuning
        .low_threshold
        .clone()
        .unwrap_or_else(|| rational::int(8) * rational::pow(&kk, 4) * rational::from_usize(d) * &lambda_min);
    if t <= low {
        stats.note("low-threshold");
        let enough = &t / &lambda_min;
        if let Some(c) = all.iter().copied().find(|&c| rational::from_usize(graph.degree(c)) >= enough) {
            stats.note("degree-shortcut");
            return Ok(Some(vec![c]));
        }
        let size = rational::floor_usize(&enough).saturating_mul(k).saturating_add(1);
        check_degree_bound(graph, &all, &enough)?;
        let singles = instance.singleton_scores();
        let mut pool = all;
        stats.rule_firings += sunflower_sweep(graph, &singles, &mut pool, size, false).len();
        return exact_decision(instance, &pool, &t, stats);
    }

    stats.note("approximate");
    let eps = &lambda_min / (rational::int(4) * &kk);
    let Some(partial) = fptas_core(instance, &eps, &tuning.fptas, stats)? else {
        return Ok(None);
    };
    let singles = instance.singleton_scores();
    let h = match tuning.high_degree_size {
        Some(h) => h,
        None => {
            let base = rational::int(4) * &kk * &kk * &lambda_min;
            rational::ceil_usize(&(&kk * &dm1 * rational::pow(&base, d.saturating_sub(1)) + rational::int(1)))
        }
    };
    let mut high = by_singleton_score(&singles, &all);
    high.truncate(h.min(m));

    for &x in &high {
        let mut members = partial.members.clone();
        if !members.contains(&x) {
            members.push(x);
        }
        if instance.score(&members)? >= t {
            stats.note("extend");
            return Ok(Some(members));
        }
    }
    for &y in &high {
        let sub = branch(instance, y, &t, &singles[y])?;
        stats.note("branch");
        if let Some(found) = solve(&sub, tuning, stats)? {
            let mut members: Vec<usize> = found
                .iter()
                .map(|&c| {
                    let id = sub.graph().candidate_id(c);
                    graph.candidate_index(id).ok_or_else(|| Error::UnknownCandidate(id.to_string()))
                })
                .collect::<Result<_>>()?;
            members.push(y);
            return Ok(Some(members));
        }
    }
    Ok(None)
}

/// `G_y`: `y` is taken, its approvers lose their consumed weight, `y` is
/// deleted and voters with nothing left to give are dropped.
fn branch(instance: &Instance, y: usize, t: &Rational, gain: &Rational) -> Result<Instance> {
    let restricted = restrict(instance.family(), instance.graph(), &[y])?;
    let shifted = Instance::from_parts(
        instance.graph().clone(),
        restricted.family,
        instance.k() - 1,
        Some(t - gain),
        instance.scale().clone(),
    )
    .delete_candidates(&[y]);
    let live: Vec<usize> = (0..shifted.graph().voter_count())
        .filter(|&v| !shifted.family().vector(v).is_exhausted())
        .collect();
    Ok(if live.len() == shifted.graph().voter_count() { shifted } else { shifted.keep_voters(&live) })
}
