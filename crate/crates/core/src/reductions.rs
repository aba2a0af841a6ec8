//! Preprocessing: the sunflower deletion rule, candidate-count reduction,
//! voter-multiplicity reduction, and their composition into a
//! `(1 - ε)`-approximate kernel with identity solution lifting.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{find_sunflower, ProfileGraph, Sunflower};
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::report::{Committee, Overrides, ThresholdCase};
use crate::solvers::greedy;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum DeletionReason {
    /// Lowest singleton score inside a sunflower (candidate and voter ids).
    Sunflower { members: Vec<String>, core: Vec<String> },
    /// Not among the `r` highest singleton scores.
    OutsideTopR { r: usize },
    /// A single candidate already certifies the optimum; only the top `k`
    /// singleton scores are kept.
    Certified { by: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateDeletion {
    pub candidate: String,
    #[serde(flatten)]
    pub reason: DeletionReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterGroup {
    /// First voter carrying this approval set.
    pub representative: String,
    pub multiplicity: usize,
    pub kept: usize,
}

/// Provenance of a reduction. Replaying it against the original instance
/// reproduces the reduced instance exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelTrace {
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub case_taken: Option<ThresholdCase>,
    /// Greedy score used by the candidate stage (internal units).
    #[serde(default, with = "rational::serde_opt_str")]
    pub apx_opt: Option<Rational>,
    pub deleted_candidates: Vec<CandidateDeletion>,
    /// Greedy score used by the voter stage (internal units).
    #[serde(default, with = "rational::serde_opt_str")]
    pub voter_apx_opt: Option<Rational>,
    /// `s` as computed; `None` when the voter stage did not run.
    #[serde(default, with = "rational::serde_opt_str")]
    pub raw_voter_scale: Option<Rational>,
    /// The scale actually applied: `s` when `s > 1`, otherwise 1 (identity).
    #[serde(with = "rational::serde_str")]
    pub voter_scale: Rational,
    /// The `n` in `s = ε*·ApxOPT / (k·10·d·n^d)`; taken to be `|C|`.
    pub scale_n: usize,
    pub kept_voter_multiplicities: Vec<VoterGroup>,
    /// Candidate ids of the reduced instance, in order.
    pub kept_candidates: Vec<String>,
    pub candidates_before: usize,
    pub candidates_after: usize,
    pub voters_before: usize,
    pub voters_after: usize,
}

impl KernelTrace {
    fn identity(instance: &Instance, epsilon: &Rational) -> Self {
        let graph = instance.graph();
        Self {
            epsilon: epsilon.clone(),
            case_taken: None,
            apx_opt: None,
            deleted_candidates: Vec::new(),
            voter_apx_opt: None,
            raw_voter_scale: None,
            voter_scale: Rational::one(),
            scale_n: graph.candidate_count(),
            kept_voter_multiplicities: Vec::new(),
            kept_candidates: graph.candidate_ids().to_vec(),
            candidates_before: graph.candidate_count(),
            candidates_after: graph.candidate_count(),
            voters_before: graph.voter_count(),
            voters_after: graph.voter_count(),
        }
    }

    /// Re-applies the recorded deletions and voter copies to `original`.
    pub fn replay(&self, original: &Instance) -> Result<Instance> {
        let graph = original.graph();
        let removed = self
            .deleted_candidates
            .iter()
            .map(|d| {
                graph
                    .candidate_index(&d.candidate)
                    .ok_or_else(|| Error::TraceMismatch(format!("unknown candidate {}", d.candidate)))
            })
            .collect::<Result<Vec<_>>>()?;
        let reduced = original.delete_candidates(&removed);
        if self.kept_voter_multiplicities.is_empty() {
            return Ok(reduced);
        }
        let groups = approval_groups(reduced.graph());
        let quota: HashMap<&str, usize> = self
            .kept_voter_multiplicities
            .iter()
            .map(|g| (g.representative.as_str(), g.kept))
            .collect();
        let mut keep = Vec::new();
        for members in &groups {
            let rep = reduced.graph().voter_id(members[0]);
            let kept = *quota
                .get(rep)
                .ok_or_else(|| Error::TraceMismatch(format!("no quota for voter group {rep}")))?;
            keep.extend(members.iter().take(kept));
        }
        keep.sort_unstable();
        Ok(reduced.keep_voters(&keep))
    }
}

fn check_epsilon(eps: &Rational) -> Result<()> {
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(Error::EpsilonOutOfRange(rational::format(eps)));
    }
    Ok(())
}

/// Candidate indices ordered by singleton score (descending), ties by index.
pub(crate) fn by_singleton_score(singles: &[Rational], pool: &[usize]) -> Vec<usize> {
    let mut order = pool.to_vec();
    order.sort_by(|&a, &b| singles[b].cmp(&singles[a]).then(a.cmp(&b)));
    order
}

/// Fails unless every candidate in `pool` has degree at most `bound`.
pub(crate) fn check_degree_bound(graph: &ProfileGraph, pool: &[usize], bound: &Rational) -> Result<()> {
    match pool
        .iter()
        .find(|&&c| rational::from_usize(graph.degree(c)) > *bound)
    {
        Some(&c) => Err(Error::DegreeExceedsBound {
            candidate: graph.candidate_id(c).to_string(),
            degree: graph.degree(c),
            bound: rational::format(bound),
        }),
        None => Ok(()),
    }
}

/// One sunflower-rule firing: the sunflower found and the member deleted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Firing {
    pub deleted: usize,
    pub sunflower: Sunflower,
}

/// Repeatedly finds a sunflower of size at least `size` inside `pool` and
/// removes its member of lowest singleton score (ties by index). Stops after
/// the first firing when `once` is set.
pub(crate) fn sunflower_sweep(
    graph: &ProfileGraph,
    singles: &[Rational],
    pool: &mut Vec<usize>,
    size: usize,
    once: bool,
) -> Vec<Firing> {
    let mut firings = Vec::new();
    while pool.len() >= size {
        let Some(sunflower) = find_sunflower(graph, pool, size) else { break };
        let deleted = *sunflower
            .members
            .iter()
            .min_by(|&&a, &&b| singles[a].cmp(&singles[b]).then(a.cmp(&b)))
            .expect("sunflowers are non-empty");
        pool.retain(|&c| c != deleted);
        firings.push(Firing { deleted, sunflower });
        if once {
            break;
        }
    }
    firings
}

fn deletion_record(graph: &ProfileGraph, firing: &Firing) -> CandidateDeletion {
    CandidateDeletion {
        candidate: graph.candidate_id(firing.deleted).to_string(),
        reason: DeletionReason::Sunflower {
            members: firing
                .sunflower
                .members
                .iter()
                .map(|&c| graph.candidate_id(c).to_string())
                .collect(),
            core: firing
                .sunflower
                .core
                .iter()
                .map(|&v| graph.voter_id(v).to_string())
                .collect(),
        },
    }
}

fn sunflower_rule(
    instance: &Instance,
    degree_bound: &Rational,
    size: usize,
    once: bool,
) -> Result<(Instance, Vec<CandidateDeletion>)> {
    let graph = instance.graph();
    let mut pool: Vec<usize> = (0..graph.candidate_count()).collect();
    check_degree_bound(graph, &pool, degree_bound)?;
    let singles = instance.singleton_scores();
    let firings = sunflower_sweep(graph, &singles, &mut pool, size, once);
    let removed: Vec<usize> = firings.iter().map(|f| f.deleted).collect();
    let records = firings.iter().map(|f| deletion_record(graph, f)).collect();
    Ok((instance.delete_candidates(&removed), records))
}

/// A single application of the sunflower rule with degree bound `W` and
/// sunflower size `w`. Every candidate degree must be at most `W`.
pub fn apply_sunflower_rule(
    instance: &Instance,
    degree_bound: &Rational,
    size: usize,
) -> Result<(Instance, Vec<CandidateDeletion>)> {
    sunflower_rule(instance, degree_bound, size, true)
}

/// Applies the sunflower rule until no sunflower of size `w` remains.
pub fn apply_sunflower_rule_exhaustively(
    instance: &Instance,
    degree_bound: &Rational,
    size: usize,
) -> Result<(Instance, Vec<CandidateDeletion>)> {
    sunflower_rule(instance, degree_bound, size, false)
}

/// `r = 4dk / (ε·λ_min) + k`.
pub fn top_r(d: usize, k: usize, eps: &Rational, lambda_min: &Rational) -> Rational {
    rational::from_usize(4 * d * k) / (eps * lambda_min) + rational::from_usize(k)
}

/// `2k·r^d·(d-1) / ((r-k)·ε)`, the split between the two threshold regimes.
pub fn threshold_split(d: usize, k: usize, r: &Rational, eps: &Rational) -> Rational {
    let numer = rational::from_usize(2 * k * d.saturating_sub(1)) * rational::pow(r, d);
    numer / ((r - rational::from_usize(k)) * eps)
}

fn resolve_r(overrides: &Overrides, d: usize, k: usize, eps: &Rational, lambda_min: &Rational) -> Result<Rational> {
    match overrides.r {
        Some(r) if r <= k => Err(Error::Document(format!("override r = {r} must exceed k = {k}"))),
        Some(r) => Ok(rational::from_usize(r)),
        None => Ok(top_r(d, k, eps, lambda_min)),
    }
}

/// Output of [`reduce_candidates`] and [`reduce_voters`].
#[derive(Debug, Clone)]
pub struct Reduced {
    pub instance: Instance,
    pub trace: KernelTrace,
}

/// Reduces the number of candidates while keeping `OPT >= (1 - ε)·OPT`.
pub fn reduce_candidates(instance: &Instance, eps: &Rational) -> Result<Reduced> {
    reduce_candidates_with(instance, eps, &Overrides::default())
}

pub fn reduce_candidates_with(instance: &Instance, eps: &Rational, overrides: &Overrides) -> Result<Reduced> {
    check_epsilon(eps)?;
    let mut trace = KernelTrace::identity(instance, eps);
    let graph = instance.graph();
    let k = instance.k();
    if k == 0 || graph.voter_count() == 0 {
        return Ok(Reduced { instance: instance.clone(), trace });
    }
    let d = instance.degree_stats().d;
    let lambda_min = instance.family().lambda_min().clone();
    let apx = greedy::greedy(instance).score;
    let r = resolve_r(overrides, d, k, eps, &lambda_min)?;
    let split = threshold_split(d, k, &r, eps);
    let case = overrides.case.unwrap_or(if apx > split {
        ThresholdCase::HighThreshold
    } else {
        ThresholdCase::LowThreshold
    });
    trace.apx_opt = Some(apx);
    trace.case_taken = Some(case);

    let singles = instance.singleton_scores();
    let all: Vec<usize> = (0..graph.candidate_count()).collect();
    let id = |c: usize| graph.candidate_id(c).to_string();
    let mut deletions = Vec::new();
    match case {
        ThresholdCase::HighThreshold => {
            let keep = rational::ceil_usize(&r);
            if graph.candidate_count() > keep {
                let mut dropped = by_singleton_score(&singles, &all).split_off(keep);
                dropped.sort_unstable();
                deletions.extend(dropped.into_iter().map(|c| CandidateDeletion {
                    candidate: id(c),
                    reason: DeletionReason::OutsideTopR { r: keep },
                }));
            }
        }
        ThresholdCase::LowThreshold => {
            let psi = (rational::e_over_e_minus_one_upper() * &split).ceil();
            let certify_degree = &psi / &lambda_min;
            let heavy = all
                .iter()
                .copied()
                .find(|&c| rational::from_usize(graph.degree(c)) >= certify_degree);
            if let Some(heavy) = heavy {
                let mut dropped = by_singleton_score(&singles, &all).split_off(k.min(all.len()));
                dropped.sort_unstable();
                deletions.extend(dropped.into_iter().map(|c| CandidateDeletion {
                    candidate: id(c),
                    reason: DeletionReason::Certified { by: id(heavy) },
                }));
            } else {
                let degree_bound = overrides.degree_bound.clone().unwrap_or(certify_degree);
                let size = overrides
                    .sunflower_size
                    .unwrap_or_else(|| rational::floor_usize(&degree_bound).saturating_mul(k).saturating_add(1));
                check_degree_bound(graph, &all, &degree_bound)?;
                let mut pool = all.clone();
                let firings = sunflower_sweep(graph, &singles, &mut pool, size, false);
                deletions.extend(firings.iter().map(|f| deletion_record(graph, f)));
            }
        }
    }
    let removed: Vec<usize> = deletions
        .iter()
        .map(|d| graph.candidate_index(&d.candidate).expect("own candidate"))
        .collect();
    let reduced = instance.delete_candidates(&removed);
    trace.deleted_candidates = deletions;
    trace.kept_candidates = reduced.graph().candidate_ids().to_vec();
    trace.candidates_after = reduced.graph().candidate_count();
    trace.voters_after = reduced.graph().voter_count();
    trace.scale_n = reduced.graph().candidate_count();
    Ok(Reduced { instance: reduced, trace })
}

/// Voters grouped by identical approval set, groups ordered by first
/// occurrence and members in voter order.
fn approval_groups(graph: &ProfileGraph) -> Vec<Vec<usize>> {
    let mut slot: HashMap<&[usize], usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for v in 0..graph.voter_count() {
        let at = *slot.entry(graph.approvals(v)).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[at].push(v);
    }
    groups
}

/// `ε* = (1 - 1/e)·ε/2`, with `1 - 1/e` bounded from below.
pub fn voter_stage_eps_star(eps: &Rational) -> Rational {
    rational::one_minus_inv_e_lower() * eps / rational::int(2)
}

/// Replaces each group of `m_v` identical voters by `⌊m_v / s⌋` copies,
/// where `s = ε*·ApxOPT / (k·10·d·n^d)` and `n = |C|`. Candidates are
/// untouched. When `s <= 1` the instance is returned unchanged.
pub fn reduce_voters(instance: &Instance, eps: &Rational) -> Result<Reduced> {
    check_epsilon(eps)?;
    let mut trace = KernelTrace::identity(instance, eps);
    let graph = instance.graph();
    let groups = approval_groups(graph);
    for members in &groups {
        let first = instance.family().vector(members[0]);
        if members.iter().any(|&v| instance.family().vector(v) != first) {
            return Err(Error::HeterogeneousGroup {
                approvals: instance.candidate_ids(graph.approvals(members[0])),
            });
        }
    }
    let k = instance.k();
    if k == 0 || graph.voter_count() == 0 {
        return Ok(Reduced { instance: instance.clone(), trace });
    }
    let d = instance.degree_stats().d;
    let n = graph.candidate_count();
    let apx = greedy::greedy(instance).score;
    let denom = rational::from_usize(k * 10 * d) * rational::pow(&rational::from_usize(n), d);
    let s = voter_stage_eps_star(eps) * &apx / denom;
    trace.voter_apx_opt = Some(apx);
    trace.raw_voter_scale = Some(s.clone());
    trace.scale_n = n;

    let shrink = s > Rational::one();
    let mut keep = Vec::new();
    for members in &groups {
        let kept = if shrink {
            rational::floor_usize(&(rational::from_usize(members.len()) / &s))
        } else {
            members.len()
        };
        trace.kept_voter_multiplicities.push(VoterGroup {
            representative: graph.voter_id(members[0]).to_string(),
            multiplicity: members.len(),
            kept,
        });
        keep.extend(members.iter().take(kept));
    }
    if !shrink {
        return Ok(Reduced { instance: instance.clone(), trace });
    }
    trace.voter_scale = s;
    keep.sort_unstable();
    let reduced = instance.keep_voters(&keep);
    trace.voters_after = reduced.graph().voter_count();
    Ok(Reduced { instance: reduced, trace })
}

/// Candidate reduction with `ε/2`, then voter reduction with `ε/2`.
pub fn kernelize(instance: &Instance, eps: &Rational) -> Result<Reduced> {
    kernelize_with(instance, eps, &Overrides::default())
}

pub fn kernelize_with(instance: &Instance, eps: &Rational, overrides: &Overrides) -> Result<Reduced> {
    check_epsilon(eps)?;
    let half = eps / rational::int(2);
    let first = reduce_candidates_with(instance, &half, overrides)?;
    let second = reduce_voters(&first.instance, &half)?;
    let mut trace = first.trace;
    trace.epsilon = eps.clone();
    trace.voter_apx_opt = second.trace.voter_apx_opt;
    trace.raw_voter_scale = second.trace.raw_voter_scale;
    trace.voter_scale = second.trace.voter_scale;
    trace.scale_n = second.trace.scale_n;
    trace.kept_voter_multiplicities = second.trace.kept_voter_multiplicities;
    trace.voters_after = second.instance.graph().voter_count();
    trace.candidates_after = second.instance.graph().candidate_count();
    Ok(Reduced { instance: second.instance, trace })
}

/// Identity lifting: the same candidates, re-scored on the original instance.
pub fn lift(solution: &Committee, trace: &KernelTrace, original: &Instance) -> Result<Committee> {
    let members = solution
        .members
        .iter()
        .map(|&c| {
            let id = trace
                .kept_candidates
                .get(c)
                .ok_or(Error::UnknownCandidateIndex(c))?;
            original
                .graph()
                .candidate_index(id)
                .ok_or_else(|| Error::UnknownCandidate(id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Committee::new(original, members, solution.size_bound))
}
