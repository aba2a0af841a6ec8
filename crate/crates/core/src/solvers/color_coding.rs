//! Randomized color coding parameterized by `t` and `k`, for instances in
//! which every voter uses the same OWA vector.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::report::{Committee, Parameters, Recorder, SolveOutcome, Stats};
use crate::score::Tally;

/// Largest `k·t′` for which the `2^{k·t′}` patterns are enumerated.
pub const DEFAULT_PATTERN_BUDGET: usize = 24;
/// Largest default repetition count `k^k·t′^{t′}` accepted for one `t′`.
pub const DEFAULT_REPETITION_CAP: u64 = 10_000_000;

/// A returned committee always reaches `t`; "no-instance" may be wrong
/// with small probability.
pub fn color_coding(instance: &Instance, seed: u64, reps: Option<u64>) -> Result<SolveOutcome> {
    let params = Parameters { seed: Some(seed), reps, ..Parameters::default() };
    let mut rec = Recorder::start("colorcoding", instance, params);
    let found = color_coding_core(instance, seed, reps, &mut rec.stats)?;
    Ok(rec.finish(instance, found))
}

pub(crate) fn color_coding_core(
    instance: &Instance,
    seed: u64,
    reps: Option<u64>,
    stats: &mut Stats,
) -> Result<Option<Committee>> {
    stats.color_coding_invoked = true;
    let t = instance.threshold().ok_or(Error::MissingThreshold)?.clone();
    let k = instance.k();
    if t <= Rational::zero() {
        return Ok(Some(Committee::empty(k)));
    }
    let graph = instance.graph();
    if graph.voter_count() == 0 {
        return Ok(None);
    }
    let shared = instance.family().shared_vector(graph).ok_or(Error::HeterogeneousFamily)?;
    let colors = k.min(graph.candidate_count());
    if colors == 0 {
        return Ok(None);
    }
    let max_satisfied = graph.voter_count().min(rational::ceil_usize(&(&t / shared.first())));
    for satisfied in 1..=max_satisfied {
        if colors * satisfied > DEFAULT_PATTERN_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "pattern enumeration (k·t′)",
                needed: (colors * satisfied).to_string(),
                budget: DEFAULT_PATTERN_BUDGET.to_string(),
            });
        }
        let rounds = match reps {
            Some(r) => r,
            None => {
                let needed = (colors as u128).pow(colors as u32) * (satisfied as u128).pow(satisfied as u32);
                if needed > DEFAULT_REPETITION_CAP as u128 {
                    return Err(Error::BudgetExceeded {
                        what: "color-coding repetitions",
                        needed: needed.to_string(),
                        budget: DEFAULT_REPETITION_CAP.to_string(),
                    });
                }
                needed as u64
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(satisfied as u64);
        for _ in 0..rounds {
            stats.repetitions += 1;
            if let Some(members) = one_round(instance, colors, satisfied, &t, &mut rng, stats) {
                stats.note(format!("t'={satisfied}"));
                return Ok(Some(Committee::new(instance, members, k)));
            }
        }
    }
    Ok(None)
}

/// One random coloring. For every pattern, each candidate color class
/// contributes its first candidate (id order) whose approvers cover the
/// voter colors demanded by that pattern row. The candidates that can be
/// chosen this way are exactly those not dominated by an earlier class
/// member, so the pattern space collapses to a product of those choices.
fn one_round(
    instance: &Instance,
    colors: usize,
    satisfied: usize,
    t: &Rational,
    rng: &mut ChaCha8Rng,
    stats: &mut Stats,
) -> Option<Vec<usize>> {
    let graph = instance.graph();
    let candidate_color: Vec<usize> = (0..graph.candidate_count()).map(|_| rng.gen_range(0..colors)).collect();
    let voter_color: Vec<usize> = (0..graph.voter_count()).map(|_| rng.gen_range(0..satisfied)).collect();
    let touched: Vec<u32> = (0..graph.candidate_count())
        .map(|c| graph.approvers(c).iter().fold(0u32, |mask, &v| mask | (1 << voter_color[v])))
        .collect();
    let mut choices: Vec<Vec<usize>> = vec![Vec::new(); colors];
    let mut seen: Vec<Vec<u32>> = vec![Vec::new(); colors];
    for c in 0..graph.candidate_count() {
        let class = candidate_color[c];
        let mask = touched[c];
        if !seen[class].iter().any(|&earlier| earlier & mask == mask) {
            choices[class].push(c);
        }
        seen[class].push(mask);
    }
    if choices.iter().any(Vec::is_empty) {
        return None;
    }
    let mut tally = Tally::new(graph, instance.family());
    search(&choices, 0, &mut tally, t, stats)
}

fn search(choices: &[Vec<usize>], class: usize, tally: &mut Tally<'_>, t: &Rational, stats: &mut Stats) -> Option<Vec<usize>> {
    if class == choices.len() {
        stats.committees_evaluated += 1;
        return (tally.score() >= t).then(|| tally.members().to_vec());
    }
    for &c in &choices[class] {
        tally.add(c);
        let found = search(choices, class + 1, tally, t, stats);
        tally.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}
