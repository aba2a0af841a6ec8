//! Approval-based committee selection under Thiele (OWA) scoring rules:
//! exact and greedy baselines, an FPT approximation scheme, a lossy kernel,
//! a one-additive approximation and color coding, with structural analysis
//! of `K_{d,d}`-free profile graphs.

pub mod error;
pub mod graph;
pub mod instance;
pub mod io;
pub mod rational;
pub mod reductions;
pub mod report;
pub mod score;
pub mod solvers;
pub mod testkit;

pub use error::{Error, Result};
pub use graph::{DegreeStats, ProfileGraph, Sunflower};
pub use instance::Instance;
pub use rational::Rational;
pub use reductions::{kernelize, lift, KernelTrace};
pub use report::{Committee, Overrides, RunReport, SolveOutcome, Verdict};
pub use score::{OwaFamily, OwaVector, ThieleFunction};
