// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at token {position} ({token:?}): {reason}")]
    Syntax {
        position: usize,
        token: String,
        reason: &'static str,
    },

    #[error("generator x{index} exceeds ambient rank {rank}")]
    GeneratorOutOfRange { index: u32, rank: u32 },

    #[error("ambient rank must be at least 1")]
    InvalidRank,

    #[error("ambient ranks differ: {left} vs {right}")]
    RankMismatch { left: u32, right: u32 },

    #[error("expected {expected} images, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("the trivial subgroup is not accepted here")]
    TrivialSubgroup,

    #[error("the identity word is not accepted here")]
    IdentityWord,

    #[error("first subgroup is not contained in the second")]
    NotSubgroup,

    #[error("graph is not a node of this fringe")]
    NotInFringe,

    #[error("subgroups are not comparable in the covering order")]
    NotComparable,

    #[error("edges with different labels cannot be identified")]
    EdgeLabelMismatch,

    #[error("vertex {vertex} is out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },

    #[error("evaluation at n = {n} is below the validity threshold {threshold}")]
    BelowValidity { n: u64, threshold: u64 },

    #[error("degree n must be at least 1")]
    InvalidDegree,

    #[error("trial count must be at least 1")]
    NoTrials,

    #[error("{what} out of range")]
    OutOfRange { what: &'static str },

    #[error("malformed graph text at line {line}: {reason}")]
    GraphFormat { line: usize, reason: String },

    #[error("expansion does not match the primitivity profile: {0}")]
    ShapeViolation(String),
}
