mod common;

use committee::graph::{contains_biclique, find_sunflower, high_degree_set, kdd_parameter, sunflower_guarantee, ProfileGraph};
use committee::io::{parse_instance, write_instance};
use committee::rational::{self, from_usize, ratio, Rational};
use committee::reductions::{
    apply_sunflower_rule_exhaustively, kernelize, lift, reduce_candidates_with, reduce_voters,
};
use committee::report::{Overrides, ThresholdCase};
use committee::score::{self, normalize, restrict, OwaFamily, OwaVector};
use committee::solvers::{self, exact};
use committee::testkit::{fixtures, gen_duplicate_heavy, gen_kdd_free, gen_sunflower_fixture, GenRule, GeneratorSpec};
use committee::{Error, Instance};
use num_traits::{One, Zero};
use proptest::collection::vec;
use proptest::prelude::*;

type RawVoter = (Vec<bool>, Vec<i64>);

/// Raw weights for a voter: sorted descending, first entry at least 1.
fn owa_from(raw: &[i64], len: usize) -> Vec<Rational> {
    let mut w: Vec<i64> = raw.iter().take(len).copied().collect();
    w.sort_unstable_by(|a, b| b.cmp(a));
    if let Some(first) = w.first_mut() {
        *first = (*first).max(1);
    }
    w.into_iter().map(|x| ratio(x, 2)).collect()
}

fn graph_and_family(m: usize, voters: &[RawVoter]) -> (ProfileGraph, OwaFamily) {
    let mut sets = Vec::new();
    let mut vectors = Vec::new();
    for (mask, raw) in voters {
        let approvals: Vec<usize> = (0..m).filter(|&c| mask[c]).collect();
        if approvals.is_empty() {
            continue;
        }
        vectors.push(OwaVector::new(owa_from(raw, approvals.len())).unwrap());
        sets.push(approvals);
    }
    if sets.is_empty() {
        sets.push(vec![0]);
        vectors.push(OwaVector::new(vec![rational::int(1)]).unwrap());
    }
    let graph = ProfileGraph::new(
        (0..m).map(|c| format!("c{c}")).collect(),
        sets.into_iter().enumerate().map(|(v, s)| (format!("v{v}"), s)).collect(),
    )
    .unwrap();
    (graph, OwaFamily::new(vectors))
}

fn raw_profile(max_m: usize, max_n: usize) -> impl Strategy<Value = (usize, Vec<RawVoter>, usize)> {
    (1..=max_m).prop_flat_map(move |m| {
        (Just(m), vec((vec(any::<bool>(), m), vec(0i64..=6, m)), 1..=max_n), 0..=m)
    })
}

fn arb_instance(max_m: usize, max_n: usize) -> impl Strategy<Value = Instance> {
    raw_profile(max_m, max_n).prop_map(|(m, voters, k)| {
        let (graph, family) = graph_and_family(m, &voters);
        Instance::new(graph, family, k, None).unwrap()
    })
}

fn mask_members(m: usize, mask: u32) -> Vec<usize> {
    (0..m).filter(|&c| mask >> c & 1 == 1).collect()
}

fn shared_approvers(graph: &ProfileGraph, x: usize, y: usize) -> Vec<usize> {
    graph.approvers(x).iter().copied().filter(|v| graph.approvers(y).contains(v)).collect()
}

/// Candidates given by their approver lists; no two share `d` or more voters,
/// so the profile has no `K_{d,d}`.
fn kdd_free_by_candidates(d: usize, ell: usize, m: usize, picks: &[Vec<usize>]) -> ProfileGraph {
    let mut columns: Vec<Vec<usize>> = Vec::new();
    let mut fresh = 1000;
    for c in 0..m {
        let pick = &picks[c % picks.len()];
        let mut col: Vec<usize> = pick.iter().take(ell).copied().collect();
        col.sort_unstable();
        col.dedup();
        let clash = columns.iter().any(|other| other.iter().filter(|v| col.contains(v)).count() >= d);
        if clash || col.is_empty() {
            col = vec![fresh];
            fresh += 1;
        }
        columns.push(col);
    }
    let mut voters: Vec<usize> = columns.iter().flatten().copied().collect();
    voters.sort_unstable();
    voters.dedup();
    let rows = voters
        .iter()
        .map(|&v| {
            let approvals = (0..m).filter(|&c| columns[c].contains(&v)).collect();
            (format!("v{v}"), approvals)
        })
        .collect();
    ProfileGraph::new((0..m).map(|c| format!("c{c}")).collect(), rows).unwrap()
}

fn brute_biclique(graph: &ProfileGraph, a: usize, b: usize) -> bool {
    let m = graph.candidate_count();
    common::small_subsets(m, a).filter(|s| s.len() == a).any(|s| {
        (0..graph.voter_count()).filter(|&v| s.iter().all(|c| graph.approvals(v).contains(c))).count() >= b
    })
}

fn kdd_spec(seed: u64, m: usize, rule: GenRule, k: usize) -> GeneratorSpec {
    GeneratorSpec {
        candidates: m,
        voters: m + 2,
        max_d: 2 + (seed % 2) as usize,
        max_voter_degree: 3,
        duplicates: if seed.is_multiple_of(5) { 3 } else { 0 },
        rule,
        k,
        seed,
    }
}

fn rule_of(i: u8) -> GenRule {
    [GenRule::Pav, GenRule::Cc, GenRule::Av, GenRule::Random][i as usize % 4]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn score_matches_definition(inst in arb_instance(7, 6)) {
        let m = inst.graph().candidate_count();
        for s in common::small_subsets(m, m) {
            prop_assert_eq!(inst.score(&s).unwrap(), common::score(&inst, &s));
        }
    }

    #[test]
    fn score_splits_over_restriction(inst in arb_instance(7, 6), mask in any::<u32>(), c in 0usize..7) {
        let m = inst.graph().candidate_count();
        let s = mask_members(m, mask);
        let c = c % m;
        prop_assume!(!s.contains(&c));
        let mut with_c = s.clone();
        with_c.push(c);
        let rest = restrict(inst.family(), inst.graph(), &s).unwrap();
        let gain = score::score(inst.graph(), &rest.family, &[c]).unwrap();
        prop_assert_eq!(inst.score(&with_c).unwrap(), inst.score(&s).unwrap() + &gain);
        prop_assert!(inst.score(&with_c).unwrap() >= inst.score(&s).unwrap());
        prop_assert_eq!(score::marginal(inst.graph(), inst.family(), &s, c).unwrap(), gain);
    }

    #[test]
    fn restriction_composes((m, voters, _) in raw_profile(7, 6), a in any::<u32>(), b in any::<u32>()) {
        let (graph, family) = graph_and_family(m, &voters);
        let s = mask_members(m, a);
        let t = mask_members(m, b & !a);
        let step = restrict(&family, &graph, &s).unwrap();
        let twice = restrict(&step.family, &graph, &t).unwrap();
        let mut union = s.clone();
        union.extend(&t);
        let once = restrict(&family, &graph, &union).unwrap();
        prop_assert_eq!(twice.family.vectors(), once.family.vectors());
        prop_assert_eq!(twice.exhausted, once.exhausted);
    }

    #[test]
    fn normalisation_keeps_argmax((m, voters, k) in raw_profile(6, 6), num in 1i64..=7, den in 1i64..=3) {
        let (graph, family) = graph_and_family(m, &voters);
        let factor = ratio(num, den);
        let raw = OwaFamily::new(family.vectors().iter().map(|v| v.scaled_by(&factor)).collect());
        let (norm, _) = normalize(&raw, None).unwrap();
        prop_assert_eq!(norm.lambda_max(), &Rational::one());
        let subsets = common::k_subsets(m, k);
        let raw_scores: Vec<Rational> = subsets.iter().map(|s| score::score(&graph, &raw, s).unwrap()).collect();
        let norm_scores: Vec<Rational> = subsets.iter().map(|s| score::score(&graph, &norm, s).unwrap()).collect();
        let best = |xs: &[Rational]| {
            let top = xs.iter().max().unwrap().clone();
            xs.iter().enumerate().filter(|(_, x)| **x == top).map(|(i, _)| i).collect::<Vec<_>>()
        };
        prop_assert_eq!(best(&raw_scores), best(&norm_scores));
        for (r, n) in raw_scores.iter().zip(&norm_scores) {
            prop_assert_eq!(r, &(n * raw.lambda_max()));
        }
    }

    #[test]
    fn approvals_and_approvers_agree(inst in arb_instance(8, 8)) {
        let g = inst.graph();
        for v in 0..g.voter_count() {
            for c in 0..g.candidate_count() {
                prop_assert_eq!(g.approvals(v).contains(&c), g.approvers(c).contains(&v));
            }
        }
        let edges: usize = (0..g.candidate_count()).map(|c| g.degree(c)).sum();
        prop_assert_eq!(edges, g.edge_count());
    }

    #[test]
    fn found_sunflowers_are_sunflowers(inst in arb_instance(8, 8), size in 1usize..=4) {
        let g = inst.graph();
        let all: Vec<usize> = (0..g.candidate_count()).collect();
        if let Some(flower) = find_sunflower(g, &all, size) {
            prop_assert!(flower.members.len() >= size);
            for (i, &x) in flower.members.iter().enumerate() {
                for &y in &flower.members[i + 1..] {
                    prop_assert_eq!(shared_approvers(g, x, y), flower.core.clone());
                }
            }
        }
    }

    #[test]
    fn sunflower_forced_at_bound(
        case in 0usize..4,
        picks in vec(vec(0usize..12, 1..=3), 1..=40),
    ) {
        let (d, ell, w) = [(2, 2, 2), (2, 1, 3), (3, 1, 2), (2, 2, 3)][case];
        let bound = sunflower_guarantee(d, ell, w);
        prop_assert_eq!(&bound, &from_usize(d * ((w - 1) * ell).pow(d as u32)));
        let m = rational::ceil_usize(&bound);
        let g = kdd_free_by_candidates(d, ell, m, &picks);
        prop_assert!(m > 12 || !brute_biclique(&g, d, d));
        let all: Vec<usize> = (0..m).collect();
        let flower = find_sunflower(&g, &all, w);
        prop_assert!(flower.is_some(), "no sunflower of size {} among {} candidates", w, m);
        prop_assert!(flower.unwrap().is_valid(&g));
    }

    #[test]
    fn bicliques_match_enumeration(inst in arb_instance(6, 7), a in 1usize..=3, b in 1usize..=3) {
        let g = inst.graph();
        let found = contains_biclique(g, a, b);
        prop_assert_eq!(found, brute_biclique(g, a, b));
        if found {
            prop_assert!(contains_biclique(g, a.max(2) - 1, b));
            prop_assert!(contains_biclique(g, a, b.max(2) - 1));
        }
        let d = kdd_parameter(g, 5);
        if d <= 5 {
            prop_assert!(!contains_biclique(g, d, d));
            prop_assert!(!contains_biclique(g, d + 1, d + 1));
        }
    }

    #[test]
    fn high_degree_set_is_a_filter(inst in arb_instance(8, 8), mask in any::<u32>(), p in 1i64..=6, q in 1i64..=3, d in 1usize..=3) {
        let g = inst.graph();
        let x: Vec<usize> = (0..g.voter_count()).filter(|&v| mask >> v & 1 == 1).collect();
        let beta = ratio(p, q);
        let expected: Vec<usize> = (0..g.candidate_count())
            .filter(|&c| g.degree(c) >= d)
            .filter(|&c| {
                let hits = x.iter().filter(|v| g.approvers(c).contains(v)).count() as i64;
                // |N(c) ∩ X| >= |X| / β  ⇔  hits·p >= |X|·q
                hits * p >= x.len() as i64 * q
            })
            .collect();
        prop_assert_eq!(high_degree_set(g, &x, &beta, d), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sunflower_rule_keeps_opt(w in 6usize..=10, core in 0usize..=2, seed in any::<u64>(), k in 1usize..=2) {
        let inst = gen_sunflower_fixture(w, core, seed).with_k(k);
        let g = inst.graph();
        let max_degree = (0..g.candidate_count()).map(|c| g.degree(c)).max().unwrap();
        let (after, dels) = apply_sunflower_rule_exhaustively(&inst, &from_usize(max_degree), max_degree * k + 1).unwrap();
        prop_assert_eq!(after.graph().candidate_count() + dels.len(), g.candidate_count());
        prop_assert_eq!(common::opt(&after), common::opt(&inst));
    }

    #[test]
    fn sunflower_rule_rejects_high_degrees(inst in arb_instance(6, 6)) {
        let g = inst.graph();
        let max_degree = (0..g.candidate_count()).map(|c| g.degree(c)).max().unwrap();
        prop_assume!(max_degree >= 2);
        let res = apply_sunflower_rule_exhaustively(&inst, &from_usize(max_degree - 1), 3);
        prop_assert!(matches!(res, Err(Error::DegreeExceedsBound { .. })), "got {:?}", res.map(|r| r.1));
    }

    #[test]
    fn kernel_keeps_most_of_opt(seed in any::<u64>(), m in 5usize..=12, rule in 0u8..4, k in 1usize..=3, e in 1i64..=3) {
        let Ok(inst) = gen_kdd_free(&kdd_spec(seed, m, rule_of(rule), k)) else { return Ok(()) };
        let eps = ratio(e, 4);
        let reduced = kernelize(&inst, &eps).unwrap();
        let kernel_best = exact::brute_force(&reduced.instance).unwrap().committee.unwrap();
        let lifted = lift(&kernel_best, &reduced.trace, &inst).unwrap();
        prop_assert!(lifted.members.len() <= inst.k());
        let opt = common::opt(&inst);
        prop_assert!(common::score(&inst, &lifted.members) >= (Rational::one() - &eps) * &opt);
        prop_assert_eq!(reduced.trace.replay(&inst).unwrap(), reduced.instance);
    }

    #[test]
    fn duplicate_heavy_kernel(seed in any::<u64>(), m in 2usize..=3, rule in 0u8..3) {
        let inst = gen_duplicate_heavy(m, 1, 2000..=5000, rule_of(rule), seed);
        let eps = ratio(1, 2);
        let reduced = kernelize(&inst, &eps).unwrap();
        prop_assert!(reduced.instance.graph().voter_count() <= inst.graph().voter_count());
        let kernel_best = exact::brute_force(&reduced.instance).unwrap().committee.unwrap();
        let lifted = lift(&kernel_best, &reduced.trace, &inst).unwrap();
        prop_assert!(common::score(&inst, &lifted.members) >= (Rational::one() - &eps) * common::opt(&inst));
        prop_assert_eq!(reduced.trace.replay(&inst).unwrap(), reduced.instance);
    }

    #[test]
    fn candidate_stage_only_deletes_candidates(
        seed in any::<u64>(),
        m in 5usize..=12,
        k in 1usize..=3,
        extra in 1usize..=4,
        high in any::<bool>(),
        bound in 1usize..=4,
    ) {
        let Ok(inst) = gen_kdd_free(&kdd_spec(seed, m, GenRule::Pav, k)) else { return Ok(()) };
        let g = inst.graph();
        let max_degree = (0..g.candidate_count()).map(|c| g.degree(c)).max().unwrap();
        let overrides = Overrides {
            degree_bound: Some(from_usize(max_degree.max(bound))),
            sunflower_size: Some(2 + extra % 2),
            r: Some(k + extra),
            case: Some(if high { ThresholdCase::HighThreshold } else { ThresholdCase::LowThreshold }),
        };
        let out = reduce_candidates_with(&inst, &ratio(1, 2), &overrides).unwrap();
        let h = out.instance.graph();
        prop_assert!(h.candidate_count() <= g.candidate_count());
        prop_assert_eq!(out.instance.k(), inst.k());
        for c in 0..h.candidate_count() {
            prop_assert!(g.candidate_index(h.candidate_id(c)).is_some());
        }
        // surviving voters keep their id, their vector and what is left of their approvals
        for v in 0..h.voter_count() {
            let orig = g.voter_ids().iter().position(|id| id == h.voter_id(v)).unwrap();
            let now = out.instance.family().vector(v).weights();
            let before = inst.family().vector(orig).weights();
            // entries past the approval count are never read, so trimming them is allowed
            prop_assert!(now.len() >= h.approvals(v).len().min(before.len()));
            prop_assert_eq!(now, &before[..now.len()]);
            let kept: Vec<String> = g.approvals(orig).iter().map(|&c| g.candidate_id(c).to_string())
                .filter(|id| h.candidate_index(id).is_some()).collect();
            prop_assert_eq!(out.instance.candidate_ids(h.approvals(v)), kept);
        }
        // voters only vanish when all their candidates did
        for v in 0..g.voter_count() {
            if !h.voter_ids().iter().any(|id| id == g.voter_id(v)) {
                prop_assert!(g.approvals(v).iter().all(|&c| h.candidate_index(g.candidate_id(c)).is_none()));
            }
        }
        prop_assert_eq!(out.trace.replay(&inst).unwrap(), out.instance);
    }

    #[test]
    fn voter_stage_keeps_candidates(seed in any::<u64>(), m in 2usize..=4, rule in 0u8..3) {
        let inst = gen_duplicate_heavy(m, 2, 500..=3000, rule_of(rule), seed);
        let out = reduce_voters(&inst, &ratio(1, 2)).unwrap();
        prop_assert_eq!(out.instance.graph().candidate_ids(), inst.graph().candidate_ids());
        prop_assert!(out.instance.graph().voter_count() <= inst.graph().voter_count());
        prop_assert_eq!(out.trace.replay(&inst).unwrap(), out.instance);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_matches_enumeration(inst in arb_instance(8, 7)) {
        let out = exact::brute_force(&inst).unwrap();
        let c = out.committee.unwrap();
        prop_assert_eq!(&c.score, &common::opt(&inst));
        prop_assert_eq!(&c.score, &common::score(&inst, &c.members));
        prop_assert!(c.members.len() <= inst.k());
    }

    #[test]
    fn greedy_within_factor(inst in arb_instance(8, 7)) {
        let c = solvers::greedy(&inst);
        prop_assert_eq!(&c.score, &common::score(&inst, &c.members));
        prop_assert!(c.members.len() <= inst.k());
        prop_assert!(c.score >= rational::one_minus_inv_e_lower() * common::opt(&inst));
    }

    #[test]
    fn fptas_is_sound_and_complete(inst in arb_instance(8, 7), e in 1i64..=3, num in 1i64..=6) {
        let opt = common::opt(&inst);
        prop_assume!(!opt.is_zero());
        let eps = ratio(e, 4);
        // t ranges over (0, 1.5·OPT]
        let t = &opt * ratio(num, 4);
        let inst = inst.with_threshold(Some(t.clone()));
        let out = solvers::fptas(&inst, &eps).unwrap();
        match out.committee {
            Some(c) => {
                prop_assert!(c.members.len() <= inst.k());
                prop_assert!(common::score(&inst, &c.members) >= (Rational::one() - &eps) * &t);
            }
            None => prop_assert!(opt < t),
        }
    }

    #[test]
    fn additive_is_sound(seed in any::<u64>(), m in 5usize..=10, rule in 0u8..3, k in 1usize..=3, shift in 0usize..3) {
        let Ok(inst) = gen_kdd_free(&kdd_spec(seed, m, rule_of(rule), k)) else { return Ok(()) };
        let opt = common::opt(&inst);
        let t = match shift {
            0 => opt.clone(),
            1 => &opt * ratio(1, 2),
            _ => &opt + ratio(1, 5),
        };
        let inst = inst.with_threshold(Some(t.clone()));
        let out = solvers::additive(&inst).unwrap();
        match out.committee {
            Some(c) => {
                prop_assert!(c.members.len() <= inst.k() + 1);
                prop_assert!(common::score(&inst, &c.members) >= t);
            }
            None => prop_assert!(opt < t),
        }
    }

    #[test]
    fn color_coding_never_lies(sets in vec(vec(0usize..6, 1..=3), 2..=5), k in 1usize..=2, num in 1i64..=5, seed in any::<u64>()) {
        let sets: Vec<Vec<usize>> = sets.into_iter().map(|mut s| { s.sort_unstable(); s.dedup(); s }).collect();
        let refs: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
        let inst = fixtures::from_sets(6, &refs, k);
        let opt = common::opt(&inst);
        let t = &opt * ratio(num, 4);
        prop_assume!(!t.is_zero());
        let inst = inst.with_threshold(Some(t.clone()));
        let first = solvers::color_coding(&inst, seed, Some(20));
        let again = solvers::color_coding(&inst, seed, Some(20));
        match (first, again) {
            (Ok(a), Ok(b)) => {
                if let Some(c) = &a.committee {
                    prop_assert!(c.members.len() <= inst.k());
                    prop_assert!(common::score(&inst, &c.members) >= t);
                }
                prop_assert_eq!(a.report.without_timing(), b.report.without_timing());
            }
            (Err(Error::BudgetExceeded { .. }), Err(Error::BudgetExceeded { .. })) => {}
            (a, b) => prop_assert!(false, "unexpected results {:?} / {:?}", a.err(), b.err()),
        }
    }

    #[test]
    fn documents_round_trip(inst in arb_instance(7, 6), t in proptest::option::of(1i64..=20)) {
        let inst = inst.with_threshold(t.map(|t| ratio(t, 3)));
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back), text);
    }
}
