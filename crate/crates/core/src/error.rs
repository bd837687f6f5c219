use thiserror::Error;

use crate::diagram::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The violating point is present while the point it should dominate is not,
    /// or it is the first point whose presence breaks monotonicity.
    #[error("not a Ferrers diagram at {point}: {reason}")]
    NotFerrers { point: Point, reason: String },

    #[error("{0} is not in the diagram")]
    NotInDiagram(Point),

    #[error("{0} is not in the first layer")]
    NotInLayer(Point),

    #[error("unsupported diagram: {0}")]
    UnsupportedDiagram(String),

    #[error("{0} is not a normal point")]
    NotNormal(Point),

    #[error("link state mismatch at {point}: {detail}")]
    LinkMismatch { point: Point, detail: String },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("too large: {what} is {size}, limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("Hilbert function did not stabilize up to degree {degree}")]
    InsufficientDegree { degree: usize },

    #[error("arithmetic overflow in the chosen count type")]
    Overflow,

    #[error("internal inconsistency: {0}")]
    Internal(String),
}
