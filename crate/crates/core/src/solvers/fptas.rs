//! FPT approximation scheme parameterized by `k` and `d`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::reductions::{by_singleton_score, check_degree_bound, sunflower_sweep, threshold_split, top_r};
use crate::report::{Committee, Overrides, Parameters, Recorder, SolveOutcome, Stats, ThresholdCase};
use crate::solvers::exact::{best_subset, DEFAULT_SUBSET_BUDGET};

/// On a yes-instance returns a committee of score at least `(1 - ε)·t`.
/// A "no-instance" answer is certified.
pub fn fptas(instance: &Instance, eps: &Rational) -> Result<SolveOutcome> {
    fptas_with(instance, eps, &Overrides::default())
}

pub fn fptas_with(instance: &Instance, eps: &Rational, overrides: &Overrides) -> Result<SolveOutcome> {
    let params = Parameters {
        epsilon: Some(eps.clone()),
        overrides: overrides.clone(),
        ..Parameters::default()
    };
    let mut rec = Recorder::start("fptas", instance, params);
    let found = fptas_core(instance, eps, overrides, &mut rec.stats)?;
    Ok(rec.finish(instance, found))
}

pub(crate) fn fptas_core(
    instance: &Instance,
    eps: &Rational,
    overrides: &Overrides,
    stats: &mut Stats,
) -> Result<Option<Committee>> {
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(Error::EpsilonOutOfRange(rational::format(eps)));
    }
    let t = instance.threshold().ok_or(Error::MissingThreshold)?.clone();
    let k = instance.k();
    let graph = instance.graph();
    let family = instance.family();
    if t <= Rational::zero() {
        stats.note("empty-threshold");
        return Ok(Some(Committee::empty(k)));
    }
    if k == 0 || graph.voter_count() == 0 {
        stats.note("unreachable");
        return Ok(None);
    }
    let all: Vec<usize> = (0..graph.candidate_count()).collect();
    let d = instance.degree_stats().d;
    let lambda_min = family.lambda_min().clone();
    let r = match overrides.r {
        Some(r) if r <= k => return Err(Error::Document(format!("override r = {r} must exceed k = {k}"))),
        Some(r) => rational::from_usize(r),
        None => top_r(d, k, eps, &lambda_min),
    };
    let split = threshold_split(d, k, &r, eps);
    let forced = overrides.case.is_some() || overrides.degree_bound.is_some() || overrides.sunflower_size.is_some();
    if rational::ceil_usize(&r) >= all.len() && !forced {
        stats.note("brute-force");
        let best = best_subset(graph, family, &all, k, DEFAULT_SUBSET_BUDGET)?;
        stats.subsets_examined += best.examined;
        return Ok((best.score >= t).then(|| Committee::new(instance, best.members, k)));
    }
    let case = overrides.case.unwrap_or(if t <= split {
        ThresholdCase::LowThreshold
    } else {
        ThresholdCase::HighThreshold
    });
    match case {
        ThresholdCase::LowThreshold => {
            stats.note("low-threshold");
            let enough = &t / &lambda_min;
            if let Some(c) = all.iter().copied().find(|&c| rational::from_usize(graph.degree(c)) >= enough) {
                stats.note("degree-shortcut");
                return Ok(Some(Committee::new(instance, vec![c], k)));
            }
            let degree_bound = overrides.degree_bound.clone().unwrap_or_else(|| &split / &lambda_min);
            let size = overrides
                .sunflower_size
                .unwrap_or_else(|| rational::floor_usize(&degree_bound).saturating_mul(k).saturating_add(1));
            check_degree_bound(graph, &all, &degree_bound)?;
            let mut pool = all;
            let singles = instance.singleton_scores();
            stats.rule_firings += sunflower_sweep(graph, &singles, &mut pool, size, false).len();
            let best = best_subset(graph, family, &pool, k, DEFAULT_SUBSET_BUDGET)?;
            stats.subsets_examined += best.examined;
            Ok((best.score >= t).then(|| Committee::new(instance, best.members, k)))
        }
        ThresholdCase::HighThreshold => {
            stats.note("high-threshold");
            let keep = rational::ceil_usize(&r).min(all.len());
            let singles = instance.singleton_scores();
            let mut pool = by_singleton_score(&singles, &all);
            pool.truncate(keep);
            let best = best_subset(graph, family, &pool, k, DEFAULT_SUBSET_BUDGET)?;
            stats.subsets_examined += best.examined;
            let target = (Rational::one() - eps) * &t;
            Ok((best.score >= target).then(|| Committee::new(instance, best.members, k)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::testkit::fixtures::{e1, from_sets};

    #[test]
    fn e1_short_circuits_to_exact() {
        let inst = e1().with_threshold(Some(ratio(7, 2)));
        let out = fptas(&inst, &ratio(1, 2)).unwrap();
        assert_eq!(out.committee.unwrap().score, ratio(7, 2));
        assert_eq!(out.report.stats.path, vec!["brute-force"]);
    }

    #[test]
    fn e1_unreachable_threshold() {
        let inst = e1().with_threshold(Some(int(10)));
        assert!(fptas(&inst, &ratio(1, 2)).unwrap().is_no_instance());
    }

    #[test]
    fn zero_k_positive_t() {
        let inst = e1().with_k(0).with_threshold(Some(int(1)));
        assert!(fptas(&inst, &ratio(1, 2)).unwrap().is_no_instance());
    }

    #[test]
    fn needs_threshold_and_valid_eps() {
        assert!(matches!(fptas(&e1(), &ratio(1, 2)), Err(Error::MissingThreshold)));
        let inst = e1().with_threshold(Some(int(1)));
        assert!(matches!(fptas(&inst, &int(1)), Err(Error::EpsilonOutOfRange(_))));
    }

    #[test]
    fn forced_high_case_meets_relaxed_target() {
        let inst = from_sets(6, &[&[0], &[0], &[1], &[1], &[2], &[3], &[4], &[5]], 2)
            .with_threshold(Some(int(4)));
        let overrides = Overrides { r: Some(3), case: Some(ThresholdCase::HighThreshold), ..Overrides::default() };
        let out = fptas_with(&inst, &ratio(1, 2), &overrides).unwrap();
        assert_eq!(out.committee.unwrap().score, int(4));
        assert_eq!(out.report.stats.path, vec!["high-threshold"]);
    }

    #[test]
    fn forced_low_case_fires_rule() {
        let inst = from_sets(6, &[&[0], &[0], &[1], &[2], &[3], &[4], &[5]], 2)
            .with_threshold(Some(int(3)));
        let overrides = Overrides {
            degree_bound: Some(int(2)),
            sunflower_size: Some(3),
            case: Some(ThresholdCase::LowThreshold),
            ..Overrides::default()
        };
        let out = fptas_with(&inst, &ratio(1, 2), &overrides).unwrap();
        assert!(out.report.stats.rule_firings > 0);
        assert_eq!(out.committee.unwrap().score, int(3));
    }

    #[test]
    fn degree_shortcut_returns_single_candidate() {
        let inst = from_sets(4, &[&[0], &[0], &[0], &[1]], 2).with_threshold(Some(int(2)));
        let overrides = Overrides { case: Some(ThresholdCase::LowThreshold), ..Overrides::default() };
        let out = fptas_with(&inst, &ratio(1, 2), &overrides).unwrap();
        assert_eq!(out.committee.unwrap().members, vec![0]);
    }
}
