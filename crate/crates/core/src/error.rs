use thiserror::Error;

/// Errors produced by game construction, strategy validation, and the solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A game definition violates a structural invariant.
    #[error("invalid game: {0}")]
    Game(String),

    /// A behavior table is malformed or missing a required entry.
    #[error("invalid behavior: {0}")]
    Behavior(String),

    /// A behavior table has no entry for a joint input the game supports.
    #[error("behavior has no entry for joint input {input}")]
    MissingBehaviorEntry { input: String },

    /// A strategy object is inconsistent with the game or with itself.
    #[error("invalid strategy: {0}")]
    Strategy(String),

    /// A state vector or measurement fails validation.
    #[error("invalid measurement or state: {reason} (worst eigenvalue {worst_eigenvalue:.3e})")]
    Measurement {
        reason: String,
        worst_eigenvalue: f64,
    },

    /// The operation is not defined for this game shape.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested method cannot handle this game or strategy.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The SDP constraints are mutually inconsistent.
    #[error("sdp infeasible: constraint `{constraint}` violated with residual {residual:.3e}")]
    SdpInfeasible { constraint: String, residual: f64 },

    /// The SDP solver ran out of iterations before reaching the gap target.
    #[error(
        "sdp did not converge in {iterations} iterations: best bound {best_bound}, gap {gap:.3e}"
    )]
    SdpNonConvergence {
        iterations: usize,
        best_bound: f64,
        gap: f64,
    },

    /// A numerical routine failed (singular factorization, lost positivity).
    #[error("numerical failure: {0}")]
    Numerical(String),
}
