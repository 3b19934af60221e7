use alloc::string::String;

pub type Result<T, E = HatError> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HatError {
    /// Malformed or mismatched input (dimensions, color counts, shapes).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A computation would exceed its configured budget. `requested` is a
    /// decimal integer so that astronomically large counts can be reported.
    #[error("budget exceeded for {what}: {requested} requested, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        requested: String,
        limit: u64,
    },
    /// A precondition of a construction does not hold.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A step that a counting argument guarantees to succeed did not.
    #[error("internal contradiction: {0}")]
    Contradiction(String),
}

impl HatError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        HatError::InvalidInput(msg.into())
    }

    pub(crate) fn budget(what: &'static str, requested: impl core::fmt::Display, limit: u64) -> Self {
        use alloc::string::ToString;
        HatError::BudgetExceeded {
            what,
            requested: requested.to_string(),
            limit,
        }
    }
}
