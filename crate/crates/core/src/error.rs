use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input lies outside the domain of the model.
    #[error("{name} = {value} is out of range: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The covariance matrix fails the uncertainty relation.
    #[error("unphysical covariance matrix (V = {v}, W = {w}, Z = {z})")]
    Unphysical { v: f64, w: f64, z: f64 },

    /// A geometric construction has no solution (e.g. an arcsin argument above one).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Quadrature did not converge or a root went negative beyond tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Pass profile text could not be parsed or failed validation.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Node kinds and link family do not match any known link class.
    #[error("unsupported link: {0}")]
    Classification(String),

    /// Graph definition is inconsistent.
    #[error("invalid graph: {0}")]
    Graph(String),

    /// Dynamic links without capacity data over the requested window.
    #[error("links without capacity data over the window: {}", .0.join(", "))]
    UncoveredLinks(Vec<String>),

    /// A route would need to relay the key through an untrusted node.
    #[error("route from {from} to {to} must relay through untrusted node {node}")]
    UntrustedRelay { from: String, to: String, node: String },

    /// Exhaustive search refused because the graph is too large.
    #[error("graph has {nodes} nodes, exhaustive search is limited to {limit}")]
    TooLarge { nodes: usize, limit: usize },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain { name, value, expected }
    }
}
