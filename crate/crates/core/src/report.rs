//! Run reports: everything needed to reproduce a solve or reduction, plus
//! the statistics gathered along the way.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::graph::DegreeStats;
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::reductions::KernelTrace;

/// A committee together with its exact score on the instance it was
/// computed for (internal units).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Committee {
    pub members: Vec<usize>,
    pub score: Rational,
    /// `k`, or `k + 1` for the additive solver.
    pub size_bound: usize,
}

impl Committee {
    pub fn new(instance: &Instance, mut members: Vec<usize>, size_bound: usize) -> Self {
        members.sort_unstable();
        members.dedup();
        let score = instance.score(&members).expect("members come from the instance");
        Self { members, score, size_bound }
    }

    pub fn empty(size_bound: usize) -> Self {
        Self { members: Vec::new(), score: Rational::default(), size_bound }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Committee,
    NoInstance,
}

/// Which side of the `2k·r^d·(d-1) / ((r-k)·ε)` split a run took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdCase {
    LowThreshold,
    HighThreshold,
}

/// Test-facing knobs replacing the theoretical constants, which are far too
/// large to let any reduction fire on small instances.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overrides {
    /// Degree bound `W` for the sunflower rule.
    #[serde(rename = "W", default, with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<Rational>,
    /// Sunflower size `w`.
    #[serde(rename = "w", default, skip_serializing_if = "Option::is_none")]
    pub sunflower_size: Option<usize>,
    /// Number of top candidates `r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    /// Forces one side of the threshold split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<ThresholdCase>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        *self == Overrides::default()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub k: usize,
    /// Threshold in input units.
    #[serde(default, with = "rational::serde_opt_str")]
    pub t: Option<Rational>,
    #[serde(default, with = "rational::serde_opt_str")]
    pub epsilon: Option<Rational>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub reps: Option<u64>,
    #[serde(default, skip_serializing_if = "Overrides::is_empty")]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub d: usize,
    pub d_determined: bool,
    pub delta_c: usize,
    pub delta_v: usize,
    pub candidates: usize,
    pub voters: usize,
    /// The `λ_max` divided out at load time.
    #[serde(with = "rational::serde_str")]
    pub lambda_max: Rational,
    /// Minimum first weight after normalisation.
    #[serde(with = "rational::serde_str")]
    pub lambda_min: Rational,
    /// Branches taken, in order.
    pub path: Vec<String>,
    pub rule_firings: usize,
    pub subsets_examined: u64,
    pub repetitions: u64,
    pub committees_evaluated: u64,
    pub recursive_calls: u64,
    pub color_coding_invoked: bool,
    pub wall_time_ms: u64,
}

impl Stats {
    pub fn for_instance(instance: &Instance, degrees: DegreeStats) -> Self {
        Self {
            d: degrees.d,
            d_determined: degrees.d_determined,
            delta_c: degrees.delta_c,
            delta_v: degrees.delta_v,
            candidates: instance.graph().candidate_count(),
            voters: instance.graph().voter_count(),
            lambda_max: instance.scale().clone(),
            lambda_min: instance.family().lambda_min().clone(),
            ..Self::default()
        }
    }

    pub fn note(&mut self, step: impl Into<String>) {
        self.path.push(step.into());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub solver: String,
    pub verdict: Verdict,
    #[serde(default)]
    pub committee: Option<Vec<String>>,
    /// Score in input units.
    #[serde(default, with = "rational::serde_opt_str")]
    pub score: Option<Rational>,
    pub parameters: Parameters,
    pub stats: Stats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<KernelTrace>,
    /// The instance document the run was started from, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<serde_json::Value>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }

    /// The report with its wall-time field zeroed.
    pub fn without_timing(&self) -> RunReport {
        let mut copy = self.clone();
        copy.stats.wall_time_ms = 0;
        copy
    }
}

/// The result of a solver: a committee or a "no-instance" answer, with the
/// report describing the run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub committee: Option<Committee>,
    pub report: RunReport,
}

impl SolveOutcome {
    pub fn is_no_instance(&self) -> bool {
        self.committee.is_none()
    }
}

/// Collects statistics during a run and assembles the final report.
pub(crate) struct Recorder {
    pub solver: &'static str,
    pub parameters: Parameters,
    pub stats: Stats,
    started: Instant,
}

impl Recorder {
    pub fn start(solver: &'static str, instance: &Instance, mut parameters: Parameters) -> Self {
        parameters.k = instance.k();
        if parameters.t.is_none() {
            parameters.t = instance.threshold().map(|t| instance.to_original(t));
        }
        Self {
            solver,
            parameters,
            stats: Stats::for_instance(instance, instance.degree_stats()),
            started: Instant::now(),
        }
    }

    pub fn finish(mut self, instance: &Instance, committee: Option<Committee>) -> SolveOutcome {
        self.stats.wall_time_ms = self.started.elapsed().as_millis() as u64;
        let report = RunReport {
            solver: self.solver.to_string(),
            verdict: if committee.is_some() { Verdict::Committee } else { Verdict::NoInstance },
            committee: committee.as_ref().map(|c| instance.candidate_ids(&c.members)),
            score: committee.as_ref().map(|c| instance.to_original(&c.score)),
            parameters: self.parameters,
            stats: self.stats,
            trace: None,
            input: None,
        };
        SolveOutcome { committee, report }
    }
}
