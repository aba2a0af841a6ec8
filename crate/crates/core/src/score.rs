//! OWA score vectors and all scoring arithmetic.
//!
//! A voter `v` with OWA vector `λ^v` who approves `j` committee members
//! contributes `λ^v_1 + ... + λ^v_j`. Vectors shorter than the voter's
//! approval set are zero-padded, so CC can be written as `(1)`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::ProfileGraph;
use crate::rational::{self, Rational};

/// Returns `true` iff every consecutive pair satisfies `w[i] >= w[i+1]`.
pub fn check_non_increasing(weights: &[Rational]) -> bool {
    weights.windows(2).all(|pair| pair[0] >= pair[1])
}

/// A non-increasing, non-negative weight sequence with cached prefix sums.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OwaVector {
    weights: Vec<Rational>,
    prefix: Vec<Rational>,
}

impl OwaVector {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::NegativeWeight {
                voter: String::new(),
                weight: rational::format(w),
            });
        }
        if !check_non_increasing(&weights) {
            let shown: Vec<String> = weights.iter().map(rational::format).collect();
            return Err(Error::IncreasingOwa(shown.join(", ")));
        }
        Ok(Self::from_checked(weights))
    }

    fn from_checked(weights: Vec<Rational>) -> Self {
        let mut prefix = Vec::with_capacity(weights.len() + 1);
        let mut acc = Rational::zero();
        prefix.push(acc.clone());
        for w in &weights {
            acc += w;
            prefix.push(acc.clone());
        }
        Self { weights, prefix }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// True when the vector is empty or every entry is zero.
    pub fn is_exhausted(&self) -> bool {
        // non-increasing: the first entry is the largest
        self.weights.first().is_none_or(Zero::is_zero)
    }

    /// `λ_j` for 1-based `j`; zero beyond the stored entries.
    pub fn weight(&self, j: usize) -> Rational {
        match j.checked_sub(1).and_then(|i| self.weights.get(i)) {
            Some(w) => w.clone(),
            None => Rational::zero(),
        }
    }

    pub fn first(&self) -> Rational {
        self.weight(1)
    }

    /// `λ_1 + ... + λ_j`, saturating at the stored length.
    pub fn prefix_sum(&self, j: usize) -> &Rational {
        &self.prefix[j.min(self.weights.len())]
    }

    /// `λ_{-j}`: the vector with its `j`-sized prefix removed.
    pub fn strip_prefix(&self, j: usize) -> OwaVector {
        let rest = self.weights.iter().skip(j).cloned().collect();
        Self::from_checked(rest)
    }

    pub fn truncate(&self, len: usize) -> OwaVector {
        Self::from_checked(self.weights.iter().take(len).cloned().collect())
    }

    pub fn scaled_by(&self, factor: &Rational) -> OwaVector {
        Self::from_checked(self.weights.iter().map(|w| w * factor).collect())
    }
}

/// Thiele satisfaction function `f(0), f(1), ..., f(k)` with `f(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThieleFunction {
    values: Vec<Rational>,
}

impl ThieleFunction {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        let shown = || {
            values
                .iter()
                .map(rational::format)
                .collect::<Vec<_>>()
                .join(", ")
        };
        match values.first() {
            Some(f0) if f0.is_zero() => {}
            _ => return Err(Error::InvalidThiele(shown())),
        }
        if values.windows(2).any(|p| p[1] < p[0]) {
            return Err(Error::InvalidThiele(shown()));
        }
        Ok(Self { values })
    }

    pub fn pav(len: usize) -> Self {
        let values = (0..len).map(rational::harmonic).collect();
        Self { values }
    }

    pub fn cc(len: usize) -> Self {
        let values = (0..len)
            .map(|i| if i == 0 { Rational::zero() } else { Rational::one() })
            .collect();
        Self { values }
    }

    pub fn av(len: usize) -> Self {
        let values = (0..len).map(rational::from_usize).collect();
        Self { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `f(i) - f(i-1)` for `i = 1..len-1`.
    pub fn differences(&self) -> Vec<Rational> {
        self.values.windows(2).map(|p| &p[1] - &p[0]).collect()
    }
}

/// `λ_i = f(i) - f(i-1)`.
pub fn owa_from_thiele(f: &ThieleFunction) -> Result<OwaVector> {
    if f.values().len() < 2 {
        return Err(Error::InvalidThiele("need at least f(0) and f(1)".into()));
    }
    OwaVector::new(f.differences())
}

/// True iff `f` is non-decreasing with non-increasing increments.
pub fn is_monotone_submodular(f: &ThieleFunction) -> bool {
    let diffs = f.differences();
    diffs.iter().all(|d| !d.is_negative()) && check_non_increasing(&diffs)
}

/// Per-voter OWA vectors, aligned with the voter order of a [`ProfileGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwaFamily {
    vectors: Vec<OwaVector>,
    lambda_min: Rational,
    lambda_max: Rational,
}

impl OwaFamily {
    pub fn new(vectors: Vec<OwaVector>) -> Self {
        let firsts = vectors.iter().map(OwaVector::first);
        let (lambda_min, lambda_max) = firsts.fold(None, |acc: Option<(Rational, Rational)>, w| {
            Some(match acc {
                None => (w.clone(), w),
                Some((lo, hi)) => (lo.min(w.clone()), hi.max(w)),
            })
        })
        .unwrap_or_else(|| (Rational::zero(), Rational::zero()));
        Self { vectors, lambda_min, lambda_max }
    }

    pub fn vectors(&self) -> &[OwaVector] {
        &self.vectors
    }

    pub fn vector(&self, voter: usize) -> &OwaVector {
        &self.vectors[voter]
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Minimum first entry over voters.
    pub fn lambda_min(&self) -> &Rational {
        &self.lambda_min
    }

    /// Maximum first entry over voters.
    pub fn lambda_max(&self) -> &Rational {
        &self.lambda_max
    }

    /// Keeps the vectors of the listed voters, in the given order.
    pub fn select(&self, voters: &[usize]) -> OwaFamily {
        OwaFamily::new(voters.iter().map(|&v| self.vectors[v].clone()).collect())
    }

    /// Returns the common vector when every voter uses (a zero-padded
    /// truncation of) the same OWA vector.
    pub fn shared_vector(&self, graph: &ProfileGraph) -> Option<OwaVector> {
        let longest = self.vectors.iter().max_by_key(|v| v.len())?;
        // entries past |A_v| are never consumed, so only those slots must agree
        let consistent = self.vectors.iter().enumerate().all(|(voter, vec)| {
            (1..=graph.approvals(voter).len()).all(|j| vec.weight(j) == longest.weight(j))
        });
        consistent.then(|| longest.clone())
    }
}

/// Divides every weight by `λ_max` and rescales the threshold accordingly.
pub fn normalize(
    family: &OwaFamily,
    threshold: Option<&Rational>,
) -> Result<(OwaFamily, Option<Rational>)> {
    let scale = family.lambda_max().clone();
    if scale.is_zero() {
        return Err(Error::AllZeroFamily);
    }
    if scale.is_one() {
        return Ok((family.clone(), threshold.cloned()));
    }
    let inv = scale.recip();
    let vectors = family.vectors.iter().map(|v| v.scaled_by(&inv)).collect();
    Ok((OwaFamily::new(vectors), threshold.map(|t| t / &scale)))
}

fn check_members(graph: &ProfileGraph, members: &[usize]) -> Result<()> {
    let mut seen = vec![false; graph.candidate_count()];
    for &c in members {
        match seen.get_mut(c) {
            None => return Err(Error::UnknownCandidateIndex(c)),
            Some(true) => return Err(Error::DuplicateMember(c)),
            Some(slot) => *slot = true,
        }
    }
    Ok(())
}

fn check_family(graph: &ProfileGraph, family: &OwaFamily) -> Result<()> {
    if family.len() != graph.voter_count() {
        return Err(Error::FamilyMismatch {
            family: family.len(),
            graph: graph.voter_count(),
        });
    }
    Ok(())
}

/// `sco(S) = Σ_v Σ_{j ≤ |N(v) ∩ S|} λ^v_j`.
pub fn score(graph: &ProfileGraph, family: &OwaFamily, members: &[usize]) -> Result<Rational> {
    check_family(graph, family)?;
    check_members(graph, members)?;
    Ok(score_unchecked(graph, family, members))
}

pub(crate) fn score_unchecked(graph: &ProfileGraph, family: &OwaFamily, members: &[usize]) -> Rational {
    let counts = approval_counts(graph, members);
    counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .fold(Rational::zero(), |acc, (v, &n)| acc + family.vector(v).prefix_sum(n))
}

fn approval_counts(graph: &ProfileGraph, members: &[usize]) -> Vec<usize> {
    let mut counts = vec![0usize; graph.voter_count()];
    for &c in members {
        for &v in graph.approvers(c) {
            counts[v] += 1;
        }
    }
    counts
}

/// Result of [`restrict`]: the shortened family plus the voters whose
/// remaining vector is empty or all-zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub family: OwaFamily,
    pub exhausted: Vec<usize>,
}

/// `Λ_S`: removes the `|N(v) ∩ S|`-sized prefix from every `λ^v`.
pub fn restrict(family: &OwaFamily, graph: &ProfileGraph, members: &[usize]) -> Result<Restriction> {
    check_family(graph, family)?;
    check_members(graph, members)?;
    let counts = approval_counts(graph, members);
    let vectors: Vec<OwaVector> = family
        .vectors()
        .iter()
        .zip(&counts)
        .map(|(vec, &j)| if j == 0 { vec.clone() } else { vec.strip_prefix(j) })
        .collect();
    let exhausted = vectors
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_exhausted())
        .map(|(i, _)| i)
        .collect();
    Ok(Restriction { family: OwaFamily::new(vectors), exhausted })
}

/// `sco(S ∪ {c}) - sco(S)` for `c ∉ S`.
pub fn marginal(
    graph: &ProfileGraph,
    family: &OwaFamily,
    members: &[usize],
    candidate: usize,
) -> Result<Rational> {
    check_family(graph, family)?;
    check_members(graph, members)?;
    if candidate >= graph.candidate_count() {
        return Err(Error::UnknownCandidateIndex(candidate));
    }
    if members.contains(&candidate) {
        return Err(Error::AlreadyMember(candidate));
    }
    let counts = approval_counts(graph, members);
    Ok(graph
        .approvers(candidate)
        .iter()
        .fold(Rational::zero(), |acc, &v| acc + family.vector(v).weight(counts[v] + 1)))
}

/// `sco({c}) = Σ_{v ∈ N(c)} λ^v_1` for every candidate.
pub fn singleton_scores(graph: &ProfileGraph, family: &OwaFamily) -> Vec<Rational> {
    (0..graph.candidate_count())
        .map(|c| {
            graph
                .approvers(c)
                .iter()
                .fold(Rational::zero(), |acc, &v| acc + family.vector(v).first())
        })
        .collect()
}

/// Incremental committee scorer: per-voter approval counts plus the running
/// score, so adding or removing a member costs one pass over its approvers.
#[derive(Debug, Clone)]
pub struct Tally<'a> {
    graph: &'a ProfileGraph,
    family: &'a OwaFamily,
    counts: Vec<usize>,
    members: Vec<usize>,
    score: Rational,
}

impl<'a> Tally<'a> {
    pub fn new(graph: &'a ProfileGraph, family: &'a OwaFamily) -> Self {
        Self {
            graph,
            family,
            counts: vec![0; graph.voter_count()],
            members: Vec::new(),
            score: Rational::zero(),
        }
    }

    pub fn with_members(graph: &'a ProfileGraph, family: &'a OwaFamily, members: &[usize]) -> Self {
        let mut tally = Self::new(graph, family);
        for &c in members {
            tally.add(c);
        }
        tally
    }

    /// Marginal gain of `candidate` without adding it.
    pub fn gain(&self, candidate: usize) -> Rational {
        self.graph
            .approvers(candidate)
            .iter()
            .fold(Rational::zero(), |acc, &v| {
                acc + self.family.vector(v).weight(self.counts[v] + 1)
            })
    }

    pub fn add(&mut self, candidate: usize) -> Rational {
        let gain = self.gain(candidate);
        for &v in self.graph.approvers(candidate) {
            self.counts[v] += 1;
        }
        self.members.push(candidate);
        self.score += &gain;
        gain
    }

    /// Removes the most recently added member.
    pub fn pop(&mut self) -> Option<usize> {
        let candidate = self.members.pop()?;
        for &v in self.graph.approvers(candidate) {
            let w = self.family.vector(v).weight(self.counts[v]);
            self.score -= w;
            self.counts[v] -= 1;
        }
        Some(candidate)
    }

    pub fn score(&self) -> &Rational {
        &self.score
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }
}
