use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("OWA vector must be non-increasing (a voter's satisfaction is submodular only if its weights never increase): {0}")]
    IncreasingOwa(String),
    #[error("negative OWA weight {weight} for voter {voter}")]
    NegativeWeight { voter: String, weight: String },
    #[error("Thiele function must satisfy f(0) = 0 and be non-decreasing: {0}")]
    InvalidThiele(String),
    #[error("family has no positive weight; the instance is invalid")]
    AllZeroFamily,
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("unknown candidate index {0}")]
    UnknownCandidateIndex(usize),
    #[error("candidate index {0} listed twice")]
    DuplicateMember(usize),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("candidate {0} is already in the committee")]
    AlreadyMember(usize),
    #[error("voter {0} has an empty approval set")]
    EmptyApprovals(String),
    #[error("family covers {family} voters but the graph has {graph}")]
    FamilyMismatch { family: usize, graph: usize },
    #[error("voters sharing approval set {approvals:?} carry different OWA vectors")]
    HeterogeneousGroup { approvals: Vec<String> },
    #[error("a single OWA vector shared by every voter is required")]
    HeterogeneousFamily,
    #[error("the shared OWA vector is not the PAV vector")]
    NotPav,
    #[error("a decision threshold t is required")]
    MissingThreshold,
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    EpsilonOutOfRange(String),
    #[error("candidate {candidate} has degree {degree}, above the sunflower-rule bound {bound}")]
    DegreeExceedsBound { candidate: String, degree: usize, bound: String },
    #[error("search budget exceeded: {needed} > {budget} ({what})")]
    BudgetExceeded { what: &'static str, needed: String, budget: String },
    #[error("invalid rational `{0}`")]
    ParseRational(String),
    #[error("invalid instance document: {0}")]
    Document(String),
    #[error("kernel trace does not match the instance: {0}")]
    TraceMismatch(String),
    #[error("generator gave up after {0} attempts")]
    GeneratorExhausted(usize),
}
