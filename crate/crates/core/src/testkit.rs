//! Instance generators with structural control, small named fixtures, and a
//! property-suite runner that checks solvers against the exhaustive oracle.

use std::collections::HashSet;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{contains_biclique, kdd_parameter, ProfileGraph};
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::reductions::{kernelize, lift};
use crate::report::Committee;
use crate::score::{OwaFamily, OwaVector, ThieleFunction};
use crate::solvers::{additive, color_coding, exact, fptas, greedy};

pub mod fixtures {
    use super::*;

    fn pav_family(graph: &ProfileGraph) -> OwaFamily {
        OwaFamily::new(
            (0..graph.voter_count())
                .map(|v| pav_vector(graph.approvals(v).len()))
                .collect(),
        )
    }

    /// Candidates `a, b, c`; `v1 -> {a, b}`, `v2 -> {b, c}`, `v3 -> {c}`;
    /// PAV; `k = 2`; no threshold.
    pub fn e1() -> Instance {
        let graph = ProfileGraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ("v1".into(), vec![0, 1]),
                ("v2".into(), vec![1, 2]),
                ("v3".into(), vec![2]),
            ],
        )
        .expect("valid fixture");
        let family = pav_family(&graph);
        Instance::new(graph, family, 2, None).expect("valid fixture")
    }

    /// Candidates `c0..c{m-1}`, voter `v{i}` approving `sets[i]`, PAV.
    pub fn from_sets(m: usize, sets: &[&[usize]], k: usize) -> Instance {
        let graph = ProfileGraph::new(
            (0..m).map(|c| format!("c{c}")).collect(),
            sets.iter()
                .enumerate()
                .map(|(v, s)| (format!("v{v}"), s.to_vec()))
                .collect(),
        )
        .expect("valid fixture");
        let family = pav_family(&graph);
        Instance::new(graph, family, k, None).expect("valid fixture")
    }

    /// Two voters with the same approval set, one PAV and one AV.
    pub fn mixed_rules() -> Instance {
        let graph = ProfileGraph::new(
            vec!["a".into(), "b".into()],
            vec![("v1".into(), vec![0, 1]), ("v2".into(), vec![0, 1])],
        )
        .expect("valid fixture");
        let family = OwaFamily::new(vec![pav_vector(2), av_vector(2)]);
        Instance::new(graph, family, 1, None).expect("valid fixture")
    }
}

pub(crate) fn pav_vector(len: usize) -> OwaVector {
    OwaVector::new((1..=len).map(|j| rational::ratio(1, j as i64)).collect()).expect("PAV is non-increasing")
}

fn av_vector(len: usize) -> OwaVector {
    OwaVector::new(vec![Rational::one(); len]).expect("AV is non-increasing")
}

/// Scoring rule used by the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GenRule {
    #[default]
    Pav,
    Cc,
    Av,
    /// An independent random non-increasing vector per approval set.
    Random,
}

impl std::str::FromStr for GenRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pav" => Ok(GenRule::Pav),
            "cc" => Ok(GenRule::Cc),
            "av" => Ok(GenRule::Av),
            "random" => Ok(GenRule::Random),
            other => Err(format!("unknown rule `{other}` (pav, cc, av, random)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub candidates: usize,
    /// Total number of voters, duplicates included.
    pub voters: usize,
    /// The output is `K_{d,d}`-free for this `d`.
    pub max_d: usize,
    pub max_voter_degree: usize,
    /// Size of the single group of identical voters (0 or 1 for none).
    pub duplicates: usize,
    pub rule: GenRule,
    pub k: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(candidates: usize, voters: usize, max_d: usize, seed: u64) -> Self {
        Self {
            candidates,
            voters,
            max_d,
            max_voter_degree: 3,
            duplicates: 0,
            rule: GenRule::Pav,
            k: 2,
            seed,
        }
    }
}

const ATTEMPTS_PER_VOTER: usize = 200;

fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> OwaVector {
    let mut raw: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=6)).collect();
    raw.sort_unstable_by(|a, b| b.cmp(a));
    if let Some(first) = raw.first_mut() {
        *first = (*first).max(1);
    }
    OwaVector::new(raw.into_iter().map(|w| rational::ratio(w, 6)).collect()).expect("sorted descending")
}

fn rule_vector(rule: GenRule, len: usize, rng: &mut ChaCha8Rng) -> OwaVector {
    match rule {
        GenRule::Pav => pav_vector(len),
        GenRule::Cc => OwaVector::new(vec![Rational::one()]).expect("CC"),
        GenRule::Av => av_vector(len),
        GenRule::Random => random_vector(rng, len),
    }
}

/// Random profile with no `K_{d,d}` for `d = spec.max_d`. Voters are drawn
/// one at a time; each candidate is added to the current approval set only
/// if the graph stays `K_{d,d}`-free. Approval sets are pairwise distinct
/// except for one optional group of `spec.duplicates` identical voters whose
/// set has fewer than `d` candidates (so the copies never form a biclique).
pub fn gen_kdd_free(spec: &GeneratorSpec) -> Result<Instance> {
    if spec.max_d < 2 || spec.candidates == 0 || spec.max_voter_degree == 0 {
        return Err(Error::Document(
            "generator needs max_d >= 2, candidates >= 1 and max_voter_degree >= 1".into(),
        ));
    }
    let d = spec.max_d;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let candidates: Vec<String> = (0..spec.candidates).map(|c| format!("c{c}")).collect();
    let all: Vec<usize> = (0..spec.candidates).collect();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();

    let dup_count = if spec.duplicates >= 2 { spec.duplicates.min(spec.voters) } else { 0 };
    let mut dup_set = Vec::new();
    if dup_count > 0 {
        let size = spec.max_voter_degree.min(d - 1).min(spec.candidates);
        dup_set = all.choose_multiple(&mut rng, size).copied().collect();
        dup_set.sort_unstable();
        seen.insert(dup_set.clone());
    }

    let graph_of = |sets: &[Vec<usize>]| {
        ProfileGraph::new(
            candidates.clone(),
            sets.iter().enumerate().map(|(v, s)| (format!("v{v}"), s.clone())).collect(),
        )
    };

    for voter in 0..spec.voters - dup_count {
        let mut placed = false;
        for _ in 0..ATTEMPTS_PER_VOTER {
            let size = rng.gen_range(1..=spec.max_voter_degree.min(spec.candidates));
            let mut order = all.clone();
            order.shuffle(&mut rng);
            let mut set: Vec<usize> = Vec::new();
            for c in order {
                if set.len() == size {
                    break;
                }
                let mut trial = set.clone();
                trial.push(c);
                trial.sort_unstable();
                if trial.len() < d {
                    set = trial;
                    continue;
                }
                let mut with = sets.clone();
                with.push(trial.clone());
                if !contains_biclique(&graph_of(&with)?, d, d) {
                    set = trial;
                }
            }
            if !set.is_empty() && seen.insert(set.clone()) {
                sets.push(set);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::GeneratorExhausted(voter));
        }
    }

    // the duplicate group sits at a seeded position among the voters
    let at = rng.gen_range(0..=sets.len());
    for _ in 0..dup_count {
        sets.insert(at, dup_set.clone());
    }
    let graph = graph_of(&sets)?;
    let dup_vector = rule_vector(spec.rule, dup_set.len(), &mut rng);
    let vectors = (0..sets.len())
        .map(|v| {
            if dup_count > 0 && sets[v] == dup_set {
                dup_vector.clone()
            } else {
                rule_vector(spec.rule, sets[v].len(), &mut rng)
            }
        })
        .collect();
    let instance = Instance::new(graph, OwaFamily::new(vectors), spec.k, None)?;
    let reached = kdd_parameter(instance.graph(), d);
    if reached > d {
        return Err(Error::GeneratorExhausted(spec.voters));
    }
    Ok(instance)
}

/// `w` candidates all approved by the same `core_size` voters and each by
/// one to three private voters, plus two unrelated candidates. PAV, `k = 2`.
pub fn gen_sunflower_fixture(w: usize, core_size: usize, seed: u64) -> Instance {
    assert!(w >= 2, "a sunflower needs at least two members");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extra = 2;
    let candidates: Vec<String> = (0..w + extra).map(|c| format!("c{c}")).collect();
    let mut voters: Vec<(String, Vec<usize>)> = Vec::new();
    for i in 0..core_size {
        voters.push((format!("core{i}"), (0..w).collect()));
    }
    for member in 0..w {
        for j in 0..rng.gen_range(1..=3) {
            voters.push((format!("p{member}_{j}"), vec![member]));
        }
    }
    for e in 0..extra {
        let c = w + e;
        for j in 0..rng.gen_range(1..=4) {
            let mut set = vec![c];
            // some outsiders also like one sunflower member
            if rng.gen_bool(0.5) {
                set.push(rng.gen_range(0..w));
            }
            set.sort_unstable();
            voters.push((format!("x{e}_{j}"), set));
        }
    }
    let graph = ProfileGraph::new(candidates, voters).expect("valid fixture");
    let family = OwaFamily::new(
        (0..graph.voter_count())
            .map(|v| pav_vector(graph.approvals(v).len()))
            .collect(),
    );
    Instance::new(graph, family, 2, None).expect("valid fixture")
}

/// Few candidates, each approved alone by a large block of identical
/// voters, plus a handful of single voters approving two candidates. Built
/// so that the voter-scaling factor of the kernel exceeds one. Every voter in
/// a block shares one OWA vector.
pub fn gen_duplicate_heavy(candidates: usize, k: usize, copies: std::ops::RangeInclusive<usize>, rule: GenRule, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<String> = (0..candidates).map(|c| format!("c{c}")).collect();
    let mut voters: Vec<(String, Vec<usize>)> = Vec::new();
    let mut vectors = Vec::new();
    for c in 0..candidates {
        let block = rule_vector(rule, 1, &mut rng);
        for j in 0..rng.gen_range(copies.clone()) {
            voters.push((format!("b{c}_{j}"), vec![c]));
            vectors.push(block.clone());
        }
    }
    // distinct pairs, one voter each, keep the profile K_{2,2}-free
    let mut pairs: Vec<(usize, usize)> = (0..candidates)
        .flat_map(|a| (a + 1..candidates).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(&mut rng);
    for (i, &(a, b)) in pairs.iter().take(rng.gen_range(0..=3)).enumerate() {
        voters.push((format!("p{i}"), vec![a, b]));
        vectors.push(rule_vector(rule, 2, &mut rng));
    }
    let graph = ProfileGraph::new(ids, voters).expect("valid profile");
    Instance::new(graph, OwaFamily::new(vectors), k, None).expect("valid profile")
}

/// A random non-decreasing Thiele function with `f(0) = 0`, which may or
/// may not be concave.
pub fn random_thiele(rng: &mut ChaCha8Rng, len: usize) -> ThieleFunction {
    let mut values = vec![Rational::zero()];
    for _ in 1..len {
        let step = rational::ratio(rng.gen_range(0..=6), rng.gen_range(1..=3));
        let next = values.last().expect("non-empty") + step;
        values.push(next);
    }
    ThieleFunction::new(values).expect("non-decreasing by construction")
}

pub type GreedyFn = fn(&Instance) -> Committee;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub cases: usize,
    pub seed: u64,
    pub greedy: GreedyFn,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { cases: 40, seed: 2024, greedy: greedy::greedy }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub suite: &'static str,
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub checked: Vec<(&'static str, usize)>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The spec of the `i`-th instance of a suite; everything derives from the
/// returned seed, so a failure report is enough to rebuild the instance.
pub fn suite_spec(seed: u64) -> GeneratorSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rule = [GenRule::Pav, GenRule::Cc, GenRule::Av, GenRule::Random][rng.gen_range(0..4)];
    let candidates = rng.gen_range(5..=10);
    GeneratorSpec {
        candidates,
        voters: rng.gen_range(4..=candidates + 4),
        max_d: rng.gen_range(2..=3),
        max_voter_degree: rng.gen_range(2..=3),
        duplicates: if rng.gen_bool(0.3) { rng.gen_range(2..=5) } else { 0 },
        rule,
        k: rng.gen_range(1..=3),
        seed,
    }
}

type SuiteCheck = fn(&Instance, &SuiteConfig, u64) -> std::result::Result<(), String>;

/// Runs the solver invariants over generated instances against the
/// exhaustive oracle.
pub fn run_property_suite(config: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::default();
    let suites: [(&'static str, SuiteCheck); 5] = [
        ("greedy-ratio", check_greedy),
        ("fptas-contract", check_fptas),
        ("additive-contract", check_additive),
        ("kernel-quality", check_kernel),
        ("color-coding-one-sided", check_color_coding),
    ];
    for (name, check) in suites {
        let mut checked = 0;
        for i in 0..config.cases {
            let seed = config.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            let instance = match gen_kdd_free(&suite_spec(seed)) {
                Ok(inst) => inst,
                Err(e) => {
                    report.failures.push(Failure { suite: name, seed, detail: format!("generator: {e}") });
                    continue;
                }
            };
            checked += 1;
            if let Err(detail) = check(&instance, config, seed) {
                report.failures.push(Failure { suite: name, seed, detail });
            }
        }
        report.checked.push((name, checked));
    }
    report
}

fn opt(instance: &Instance) -> std::result::Result<Rational, String> {
    exact::optimum(instance).map_err(|e| e.to_string())
}

fn check_greedy(instance: &Instance, config: &SuiteConfig, _: u64) -> std::result::Result<(), String> {
    let best = opt(instance)?;
    let got = (config.greedy)(instance);
    if got.members.len() > instance.k() {
        return Err(format!("greedy returned {} members", got.members.len()));
    }
    if got.score < rational::one_minus_inv_e_lower() * &best {
        return Err(format!(
            "greedy {} below (1-1/e)·{}",
            rational::format(&got.score),
            rational::format(&best)
        ));
    }
    Ok(())
}

fn check_fptas(instance: &Instance, _: &SuiteConfig, _: u64) -> std::result::Result<(), String> {
    let best = opt(instance)?;
    let inst = instance.with_threshold(Some(best.clone()));
    for eps in [rational::ratio(1, 4), rational::ratio(1, 2)] {
        let out = fptas(&inst, &eps).map_err(|e| e.to_string())?;
        let Some(c) = out.committee else {
            return Err(format!("no-instance at eps {} on a yes-instance", rational::format(&eps)));
        };
        if c.score < (Rational::one() - &eps) * &best {
            return Err(format!("score {} misses (1-eps)t", rational::format(&c.score)));
        }
    }
    Ok(())
}

fn check_additive(instance: &Instance, _: &SuiteConfig, seed: u64) -> std::result::Result<(), String> {
    let best = opt(instance)?;
    // alternate between yes (t = OPT) and no (t just above OPT) instances
    let t = if seed.is_multiple_of(2) { best.clone() } else { &best + rational::ratio(1, 7) };
    let inst = instance.with_threshold(Some(t.clone()));
    let out = additive(&inst).map_err(|e| e.to_string())?;
    match out.committee {
        Some(c) if c.members.len() > inst.k() + 1 => Err(format!("size {} > k+1", c.members.len())),
        Some(c) if c.score < t => Err(format!("score {} < t", rational::format(&c.score))),
        Some(_) => Ok(()),
        None if best >= t => Err("no-instance on a yes-instance".into()),
        None => Ok(()),
    }
}

fn check_kernel(instance: &Instance, _: &SuiteConfig, _: u64) -> std::result::Result<(), String> {
    let best = opt(instance)?;
    for eps in [rational::ratio(1, 4), rational::ratio(1, 2)] {
        let kernel = kernelize(instance, &eps).map_err(|e| e.to_string())?;
        let solved = exact::brute_force(&kernel.instance.with_threshold(None)).map_err(|e| e.to_string())?;
        let sol = solved.committee.ok_or("brute force without threshold always answers")?;
        let lifted = lift(&sol, &kernel.trace, instance).map_err(|e| e.to_string())?;
        if lifted.score < (Rational::one() - &eps) * &best {
            return Err(format!("lifted {} below (1-eps)·OPT", rational::format(&lifted.score)));
        }
    }
    Ok(())
}

fn check_color_coding(instance: &Instance, _: &SuiteConfig, seed: u64) -> std::result::Result<(), String> {
    if instance.family().shared_vector(instance.graph()).is_none() {
        return Ok(());
    }
    let best = opt(instance)?;
    let t = (best * rational::ratio(1, 2)).ceil().min(rational::int(4));
    let inst = instance.with_threshold(Some(t.clone()));
    match color_coding(&inst, seed, Some(50)) {
        Ok(out) => match out.committee {
            Some(c) if c.score < t => Err(format!("returned score {} < t", rational::format(&c.score))),
            _ => Ok(()),
        },
        Err(Error::BudgetExceeded { .. }) => Ok(()),
        Err(e) => Err(e.to_string()),
    }
}
