use thiserror::Error;

/// Errors surfaced by the library.
///
/// The variant names are part of the contract: the CLI reports them
/// verbatim and maps all of them to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The capacity function is known to exist here but no closed form is
    /// recorded (the transitional region between the staircase and the
    /// volume constraint).
    #[error("UnsupportedRegion: {0}")]
    UnsupportedRegion(String),

    /// A gluing-coefficient shape the library deliberately does not model.
    #[error("UnsupportedPartition: {0}")]
    UnsupportedPartition(String),

    /// An operation that requires an irrational-modelled parameter (nonzero
    /// tilt) was called with an exact rational.
    #[error("RationalParam: {0}")]
    RationalParam(String),

    /// A certificate violated a structural invariant before any
    /// admissibility check could run.
    #[error("MalformedCertificate: {0}")]
    MalformedCertificate(String),

    /// A precondition on an argument's range was violated.
    #[error("DomainError: {0}")]
    Domain(String),

    /// Textual input could not be parsed.
    #[error("ParseError: {0}")]
    Parse(String),
}
