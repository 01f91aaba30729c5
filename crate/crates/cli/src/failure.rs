use std::fmt;

use netflowsym_core::Error;

/// Outcome classes mapped onto process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Unreadable, malformed or inconsistent input.
    Input(String),
    /// A solve or decomposition failed.
    Numerical(String),
    /// A requested check did not hold.
    Assertion(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Assertion(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Assertion(m) => write!(f, "assertion failed: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SolverFailure(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::from(Error::SolverFailure("singular".into())).exit_code(), 3);
        assert_eq!(Failure::from(Error::NotSelfAdjoint).exit_code(), 2);
        assert_eq!(Failure::from(Error::Parse("x".into())).exit_code(), 2);
        assert_eq!(Failure::Assertion(String::new()).exit_code(), 4);
    }
}
