//! The JSON instance document (`"format": 1`) and its conversion to and from
//! [`Instance`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ProfileGraph;
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::score::{OwaFamily, OwaVector};

pub const FORMAT_VERSION: u32 = 1;

/// A rational written either as a string (`"7/2"`, `"3"`) or a JSON integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Int(i64),
    Text(String),
}

impl RationalText {
    pub fn parse(&self) -> Result<Rational> {
        match self {
            RationalText::Int(n) => Ok(rational::int(*n)),
            RationalText::Text(s) => rational::parse(s),
        }
    }

    pub fn of(value: &Rational) -> Self {
        RationalText::Text(rational::format(value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Pav,
    Cc,
    Av,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleRecord {
    #[serde(rename = "type")]
    pub kind: RuleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<RationalText>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoterRecord {
    pub id: String,
    pub approvals: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owa: Option<Vec<RationalText>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub format: u32,
    pub candidates: Vec<String>,
    pub voters: Vec<VoterRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleRecord>,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<RationalText>,
}

impl InstanceDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialise")
    }
}

fn parse_weights(voter: &str, weights: &[RationalText]) -> Result<Vec<Rational>> {
    let parsed = weights.iter().map(RationalText::parse).collect::<Result<Vec<_>>>()?;
    if let Some(w) = parsed.iter().find(|w| **w < Rational::default()) {
        return Err(Error::NegativeWeight { voter: voter.to_string(), weight: rational::format(w) });
    }
    Ok(parsed)
}

/// Shared-rule vector for a voter approving `len` candidates. Entries past
/// `len` can never be consumed, so the vector stops there.
fn rule_weights(rule: &RuleRecord, len: usize) -> Result<Vec<Rational>> {
    Ok(match rule.kind {
        RuleKind::Pav => (1..=len).map(|j| rational::ratio(1, j as i64)).collect(),
        RuleKind::Av => vec![rational::int(1); len],
        RuleKind::Cc => vec![rational::int(1)],
        RuleKind::Custom => {
            let weights = rule
                .weights
                .as_ref()
                .ok_or_else(|| Error::Document("rule `custom` needs `weights`".into()))?;
            parse_weights("(shared rule)", weights)?.into_iter().take(len).collect()
        }
    })
}

/// Builds a normalised [`Instance`]. Voters without approvals are dropped.
pub fn document_to_instance(doc: &InstanceDocument) -> Result<Instance> {
    if doc.format != FORMAT_VERSION {
        return Err(Error::Document(format!("unsupported format {}", doc.format)));
    }
    if doc.rule.as_ref().is_some_and(|r| r.kind != RuleKind::Custom && r.weights.is_some()) {
        return Err(Error::Document("`weights` is only allowed with rule `custom`".into()));
    }
    let mut index = HashMap::new();
    for (i, c) in doc.candidates.iter().enumerate() {
        if index.insert(c.as_str(), i).is_some() {
            return Err(Error::DuplicateId(c.clone()));
        }
    }
    let mut voters = Vec::new();
    let mut vectors = Vec::new();
    for record in &doc.voters {
        let approvals = record
            .approvals
            .iter()
            .map(|a| index.get(a.as_str()).copied().ok_or_else(|| Error::UnknownCandidate(a.clone())))
            .collect::<Result<Vec<_>>>()?;
        let weights = match (&record.owa, &doc.rule) {
            (Some(_), Some(_)) => {
                return Err(Error::Document(format!(
                    "voter {} has its own `owa` and the document has a shared `rule`",
                    record.id
                )))
            }
            (None, None) => {
                return Err(Error::Document(format!("voter {} has no `owa` and there is no `rule`", record.id)))
            }
            (Some(owa), None) => parse_weights(&record.id, owa)?,
            (None, Some(rule)) => rule_weights(rule, approvals.len())?,
        };
        let vector = OwaVector::new(weights).map_err(|e| match e {
            Error::NegativeWeight { weight, .. } => Error::NegativeWeight { voter: record.id.clone(), weight },
            other => other,
        })?;
        if approvals.is_empty() {
            continue;
        }
        voters.push((record.id.clone(), approvals));
        vectors.push(vector);
    }
    let graph = ProfileGraph::new(doc.candidates.clone(), voters)?;
    let t = doc.t.as_ref().map(RationalText::parse).transpose()?;
    Instance::new(graph, OwaFamily::new(vectors), doc.k, t)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    document_to_instance(&InstanceDocument::from_json(text)?)
}

/// The document of an instance in input units, with per-voter vectors.
pub fn instance_to_document(instance: &Instance) -> InstanceDocument {
    let graph = instance.graph();
    let voters = (0..graph.voter_count())
        .map(|v| VoterRecord {
            id: graph.voter_id(v).to_string(),
            approvals: instance.candidate_ids(graph.approvals(v)),
            owa: Some(
                instance
                    .family()
                    .vector(v)
                    .weights()
                    .iter()
                    .map(|w| RationalText::of(&instance.to_original(w)))
                    .collect(),
            ),
        })
        .collect();
    InstanceDocument {
        format: FORMAT_VERSION,
        candidates: graph.candidate_ids().to_vec(),
        voters,
        rule: None,
        k: instance.k(),
        t: instance.threshold().map(|t| RationalText::of(&instance.to_original(t))),
    }
}

pub fn write_instance(instance: &Instance) -> String {
    instance_to_document(instance).to_json()
}
