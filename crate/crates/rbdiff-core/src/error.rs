//! Error type shared by the whole engine.
//!
//! Everything here is exact arithmetic, so errors never signal numerical
//! trouble; they signal structural problems (an input that is not an algebra,
//! an operator that fails a precondition, a sequence component demanded past
//! its horizon) or — worst of all — [`Error::InternalMismatch`], raised when
//! two independent evaluation routes for the same quantity disagree.

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Structure constants do not describe a commutative unital associative algebra.
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    /// Two values from different algebras (or different ambient contexts) were combined.
    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    /// A sequence component beyond the available prefix was demanded.
    /// `horizon` is the number of components that are available (indices `0..horizon`).
    #[error("sequence component {demanded} demanded, but only components 0..{horizon} are available")]
    HorizonExceeded { demanded: usize, horizon: usize },

    /// A claimed algebra homomorphism fails unitality or multiplicativity.
    #[error("not an algebra homomorphism: {0}")]
    NotAHomomorphism(String),

    /// The grade-1 seed operator of a word-algebra extension must kill the unit.
    #[error("seed operator does not annihilate the unit: q(1) = {0}")]
    UnitNotAnnihilated(String),

    /// A checker was invoked on data violating its stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The requested operation does not apply to the given inputs
    /// (e.g. asking for a counterexample against a constraint that holds).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A bounded search that was expected to produce a witness came up empty.
    /// Distinct from [`Error::InternalMismatch`]: the theory guarantees existence of a
    /// witness somewhere, but not inside the searched box.
    #[error("bounded search exhausted without a witness: {0}")]
    SearchExhausted(String),

    /// Two independent evaluation routes disagreed. Always a bug; never recoverable.
    #[error("internal consistency failure: {0}")]
    InternalMismatch(String),

    /// Malformed user-facing input (expression text, series spec, CLI argument).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
