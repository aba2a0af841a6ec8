//! Committee-selection algorithms. Every solver returns a [`SolveOutcome`]
//! whose committee is scored on the instance it was given.

pub mod additive;
pub mod color_coding;
pub mod exact;
pub mod fptas;
pub mod greedy;
pub mod pav;

pub use additive::{additive, additive_tuned, AdditiveTuning};
pub use color_coding::color_coding;
pub use exact::{brute_force, brute_force_with_budget, optimum};
pub use fptas::{fptas, fptas_with};
pub use greedy::{greedy, greedy_outcome};
pub use pav::pav_dispatch;

use crate::error::Result;
use crate::instance::Instance;
use crate::rational;
use crate::report::{Committee, Parameters, Recorder, SolveOutcome};

/// Optimization by exhaustive search, with the `k·Δ_C` ceiling used as an
/// immediate "no-instance" certificate for larger thresholds: each member
/// adds at most `Δ_C·λ_1 <= Δ_C`.
pub fn decide_by_delta(instance: &Instance) -> Result<SolveOutcome> {
    let mut rec = Recorder::start("delta", instance, Parameters::default());
    let ceiling = rational::from_usize(instance.k() * rec.stats.delta_c);
    if instance.threshold().is_some_and(|t| *t > ceiling) {
        rec.stats.note("delta-cutoff");
        return Ok(rec.finish(instance, None));
    }
    rec.stats.note("exhaustive");
    let inner = brute_force(instance)?;
    rec.stats.subsets_examined = inner.report.stats.subsets_examined;
    let committee: Option<Committee> = inner.committee;
    Ok(rec.finish(instance, committee))
}
