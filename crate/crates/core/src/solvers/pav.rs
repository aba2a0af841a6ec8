//! Threshold-parameterized solving under PAV: two harmonic-sum shortcuts,
//! color coding otherwise.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::report::{Committee, Parameters, Recorder, SolveOutcome};
use crate::solvers::color_coding::color_coding_core;

fn is_pav(instance: &Instance) -> bool {
    let graph = instance.graph();
    if graph.voter_count() == 0 {
        return true;
    }
    instance.family().shared_vector(graph).is_some_and(|shared| {
        shared
            .weights()
            .iter()
            .enumerate()
            .all(|(i, w)| *w == rational::ratio(1, i as i64 + 1))
    })
}

pub fn pav_dispatch(instance: &Instance, seed: u64, reps: Option<u64>) -> Result<SolveOutcome> {
    if !is_pav(instance) {
        return Err(Error::NotPav);
    }
    let params = Parameters { seed: Some(seed), reps, ..Parameters::default() };
    let mut rec = Recorder::start("pav", instance, params);
    let t = instance.threshold().ok_or(Error::MissingThreshold)?.clone();
    let k = instance.k();
    let graph = instance.graph();
    if t <= Rational::zero() {
        rec.stats.note("empty-threshold");
        return Ok(rec.finish(instance, Some(Committee::empty(k))));
    }
    let delta = rec.stats.delta_v;
    let widest = (0..graph.voter_count()).find(|&v| graph.approvals(v).len() == delta);
    let kk = rational::from_usize(k);
    let found = if kk <= t {
        rec.stats.note("color-coding");
        color_coding_core(instance, seed, reps, &mut rec.stats)?
    } else if k <= delta && t <= rational::harmonic(k) {
        rec.stats.note("harmonic-k");
        let voter = widest.expect("delta > 0 means some voter");
        let members = graph.approvals(voter)[..k].to_vec();
        Some(Committee::new(instance, members, k))
    } else if k > delta && t <= rational::harmonic(delta) {
        rec.stats.note("harmonic-delta");
        let mut members = widest.map(|v| graph.approvals(v).to_vec()).unwrap_or_default();
        let padding: Vec<usize> = (0..graph.candidate_count())
            .filter(|c| !members.contains(c))
            .take(k.saturating_sub(members.len()))
            .collect();
        members.extend(padding);
        Some(Committee::new(instance, members, k))
    } else {
        rec.stats.note("color-coding");
        color_coding_core(instance, seed, reps, &mut rec.stats)?
    };
    Ok(rec.finish(instance, found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::testkit::fixtures::{e1, from_sets};

    #[test]
    fn single_wide_voter_harmonic_k() {
        let inst = from_sets(3, &[&[0, 1, 2]], 2).with_threshold(Some(ratio(3, 2)));
        let out = pav_dispatch(&inst, 0, None).unwrap();
        assert_eq!(out.report.stats.path, vec!["harmonic-k"]);
        assert!(!out.report.stats.color_coding_invoked);
        let c = out.committee.unwrap();
        assert_eq!(c.members.len(), 2);
        assert_eq!(c.score, ratio(3, 2));
    }

    #[test]
    fn padded_neighbourhood_when_k_exceeds_delta() {
        let inst = from_sets(5, &[&[1, 3], &[4]], 4).with_threshold(Some(ratio(3, 2)));
        let out = pav_dispatch(&inst, 0, None).unwrap();
        assert_eq!(out.report.stats.path, vec!["harmonic-delta"]);
        let c = out.committee.unwrap();
        assert_eq!(c.members, vec![0, 1, 2, 3]);
        assert!(c.score >= ratio(3, 2));
    }

    #[test]
    fn large_threshold_uses_color_coding() {
        let inst = e1().with_threshold(Some(int(3)));
        let out = pav_dispatch(&inst, 5, None).unwrap();
        assert!(out.report.stats.color_coding_invoked);
        assert!(out.committee.unwrap().score >= int(3));
    }

    #[test]
    fn non_pav_rejected() {
        let inst = crate::testkit::fixtures::mixed_rules().with_threshold(Some(int(1)));
        assert!(matches!(pav_dispatch(&inst, 0, None), Err(Error::NotPav)));
    }
}
