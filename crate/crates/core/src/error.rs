use thiserror::Error;

/// Everything that can go wrong while building or solving an instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("non-binary valuation {value} at buyer {buyer}, good {good}")]
    NonBinary { buyer: usize, good: usize, value: i64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{what} needs {required} cases but the budget is {budget}")]
    Budget {
        what: &'static str,
        required: u128,
        budget: u128,
    },

    #[error("certificate table has no entry for profile {0}")]
    MissingProfile(String),
}

impl Error {
    pub(crate) fn input(message: impl Into<String>) -> Self {
        Error::Input(message.into())
    }

    /// True for errors caused by a search exceeding its configured budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
