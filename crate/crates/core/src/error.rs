use std::path::PathBuf;

use thiserror::Error;

/// Lattice index of a grid node, `(i, j)` in padded array coordinates.
pub type NodeIndex = (usize, usize);

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain violation: {0}")]
    Domain(String),

    #[error("unphysical state at node {node:?} (rho = {rho}, p = {p})")]
    Unphysical {
        node: Option<NodeIndex>,
        rho: f64,
        p: f64,
    },

    #[error("unphysical ghost value at node {node:?}: {reason}")]
    UnphysicalGhost { node: NodeIndex, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mesh resolution error at node {node:?}: {reason}")]
    MeshResolution { node: NodeIndex, reason: String },

    #[error("stencil construction failed for {} ghost node(s), first at {:?}", .0.len(), .0.first().map(|f| f.0))]
    Stencils(Vec<(NodeIndex, String)>),

    #[error("{failures} ghost fill(s) failed, first: {first}")]
    GhostFill { failures: usize, first: Box<Error> },

    #[error("step {step} (t = {time}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attach a node location to an unphysical-state error that lacks one.
    pub fn at_node(self, node: NodeIndex) -> Self {
        match self {
            Error::Unphysical { node: None, rho, p } => Error::Unphysical {
                node: Some(node),
                rho,
                p,
            },
            other => other,
        }
    }

    /// Innermost cause, looking through step and aggregation wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            Error::GhostFill { first, .. } => first.root(),
            other => other,
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_) | Error::Parse { .. } | Error::Domain(_) => 1,
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
