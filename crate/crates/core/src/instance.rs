use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{degree_stats, DegreeStats, ProfileGraph, DEFAULT_KDD_CAP};
use crate::rational::Rational;
use crate::score::{self, normalize, OwaFamily};

/// A committee-selection instance: profile graph, one OWA vector per voter,
/// committee size `k` and an optional decision threshold `t`.
///
/// The family is kept normalised (`λ_max <= 1`). `scale` is the `λ_max`
/// divided out at construction; multiplying an internal score by it gives the
/// score in the units of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: ProfileGraph,
    family: OwaFamily,
    k: usize,
    threshold: Option<Rational>,
    scale: Rational,
}

impl Instance {
    /// Drops voters whose vector is empty or all-zero, then normalises.
    /// `threshold` is given in input units.
    pub fn new(
        graph: ProfileGraph,
        family: OwaFamily,
        k: usize,
        threshold: Option<Rational>,
    ) -> Result<Self> {
        if family.len() != graph.voter_count() {
            return Err(Error::FamilyMismatch {
                family: family.len(),
                graph: graph.voter_count(),
            });
        }
        let live: Vec<usize> = (0..graph.voter_count())
            .filter(|&v| !family.vector(v).is_exhausted())
            .collect();
        let (graph, family) = if live.len() == graph.voter_count() {
            (graph, family)
        } else {
            (graph.with_voters(&live), family.select(&live))
        };
        let family = fit_to_approvals(&graph, &family);
        if family.is_empty() {
            return Ok(Self { graph, family, k, threshold, scale: Rational::one() });
        }
        let scale = family.lambda_max().clone();
        let (family, threshold) = normalize(&family, threshold.as_ref())?;
        Ok(Self { graph, family, k, threshold, scale })
    }

    /// Assembles an already-normalised instance.
    pub(crate) fn from_parts(
        graph: ProfileGraph,
        family: OwaFamily,
        k: usize,
        threshold: Option<Rational>,
        scale: Rational,
    ) -> Self {
        debug_assert_eq!(graph.voter_count(), family.len());
        Self { graph, family, k, threshold, scale }
    }

    pub fn graph(&self) -> &ProfileGraph {
        &self.graph
    }

    pub fn family(&self) -> &OwaFamily {
        &self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Threshold in internal (normalised) units.
    pub fn threshold(&self) -> Option<&Rational> {
        self.threshold.as_ref()
    }

    /// The `λ_max` divided out at load time.
    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn to_original(&self, internal: &Rational) -> Rational {
        internal * &self.scale
    }

    pub fn to_internal(&self, original: &Rational) -> Rational {
        original / &self.scale
    }

    pub fn with_k(&self, k: usize) -> Instance {
        Instance { k, ..self.clone() }
    }

    /// Replaces the threshold; `t` is in internal units.
    pub fn with_threshold(&self, t: Option<Rational>) -> Instance {
        Instance { threshold: t, ..self.clone() }
    }

    pub fn score(&self, members: &[usize]) -> Result<Rational> {
        score::score(&self.graph, &self.family, members)
    }

    pub fn singleton_scores(&self) -> Vec<Rational> {
        score::singleton_scores(&self.graph, &self.family)
    }

    pub fn degree_stats(&self) -> DegreeStats {
        degree_stats(&self.graph, DEFAULT_KDD_CAP)
    }

    pub fn candidate_ids(&self, members: &[usize]) -> Vec<String> {
        members
            .iter()
            .map(|&c| self.graph.candidate_id(c).to_string())
            .collect()
    }

    /// Deletes candidates; voters left with no approvals are dropped and the
    /// remaining vectors are cut to the new approval-set sizes.
    pub fn delete_candidates(&self, removed: &[usize]) -> Instance {
        if removed.is_empty() {
            return self.clone();
        }
        let (graph, kept) = self.graph.without_candidates(removed);
        let family = fit_to_approvals(&graph, &self.family.select(&kept));
        Instance::from_parts(graph, family, self.k, self.threshold.clone(), self.scale.clone())
    }

    /// Keeps the listed voters, in the given order.
    pub fn keep_voters(&self, voters: &[usize]) -> Instance {
        let graph = self.graph.with_voters(voters);
        let family = self.family.select(voters);
        Instance::from_parts(graph, family, self.k, self.threshold.clone(), self.scale.clone())
    }
}

fn fit_to_approvals(graph: &ProfileGraph, family: &OwaFamily) -> OwaFamily {
    let fits = (0..graph.voter_count()).all(|v| family.vector(v).len() <= graph.approvals(v).len());
    if fits {
        return family.clone();
    }
    OwaFamily::new(
        (0..graph.voter_count())
            .map(|v| family.vector(v).truncate(graph.approvals(v).len()))
            .collect(),
    )
}
