use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("addresses are equal; quad-T distance bound undefined")]
    EqualAddresses,
    #[error("no differing bit within scan budget of {0} bits")]
    ScanBudgetExceeded(usize),
    #[error("point is a polygon vertex (cone point): {0}")]
    VertexHit(String),
    #[error("point is not on a crossable edge: {0}")]
    NotOnEdge(String),
    #[error("trace start lies on a vertex")]
    StartOnVertex,
    #[error("point lies outside its piece: {0}")]
    OutsidePiece(String),
    #[error("invalid direction: {0}")]
    InvalidDirection(String),
    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),
    #[error("rays leave the common branch before the requested depth: {0}")]
    RaysDiverge(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("gluing table has no rule for {0}")]
    MissingRule(String),
}

impl Error {
    /// Stable kebab-case name of the variant, used in structured output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::EqualAddresses => "equal-addresses",
            Error::ScanBudgetExceeded(_) => "scan-budget-exceeded",
            Error::VertexHit(_) => "vertex-hit",
            Error::NotOnEdge(_) => "not-on-edge",
            Error::StartOnVertex => "start-on-vertex",
            Error::OutsidePiece(_) => "outside-piece",
            Error::InvalidDirection(_) => "invalid-direction",
            Error::DegenerateRegression(_) => "degenerate-regression",
            Error::RaysDiverge(_) => "rays-diverge",
            Error::Precondition(_) => "precondition",
            Error::MissingRule(_) => "missing-rule",
        }
    }

    /// Whether the error is caused by the caller's input rather than by the
    /// computation.
    pub fn is_bad_input(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::EqualAddresses
                | Error::StartOnVertex
                | Error::OutsidePiece(_)
                | Error::InvalidDirection(_)
                | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
