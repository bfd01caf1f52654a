use std::fmt;

/// Command failure, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Invalid flags or inputs (exit 1).
    Usage(anyhow::Error),
    /// A computation or I/O step failed (exit 2).
    Numerical(anyhow::Error),
    /// The run completed but a tolerance check failed (exit 3).
    Verdict(String),
}

impl Failure {
    pub const USAGE: u8 = 1;

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => Self::USAGE,
            Failure::Numerical(_) => 2,
            Failure::Verdict(_) => 3,
        }
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure::Usage(anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Numerical(e) => write!(f, "{e:#}"),
            Failure::Verdict(m) => write!(f, "verdict failed: {m}"),
        }
    }
}

impl From<csl_core::Error> for Failure {
    fn from(e: csl_core::Error) -> Self {
        use csl_core::Error as E;
        match e {
            E::Domain(_) | E::ShapeMismatch(_) => Failure::Usage(e.into()),
            _ => Failure::Numerical(e.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Numerical(e.into())
    }
}

pub type CmdResult = Result<(), Failure>;
