//! Failure classes and their process exit codes.

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Config = 1,
    Numerical = 2,
    Io = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub error: anyhow::Error,
}

pub type CliResult<T> = Result<T, Failure>;

impl Failure {
    pub fn config(msg: impl fmt::Display) -> Self {
        Self {
            kind: Kind::Config,
            error: anyhow::anyhow!("{msg}"),
        }
    }

    pub fn io(path: &Path, err: impl Into<anyhow::Error>) -> Self {
        Self {
            kind: Kind::Io,
            error: err.into().context(path.display().to_string()),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind as u8)
    }

    pub fn context(self, ctx: impl fmt::Display + Send + Sync + 'static) -> Self {
        Self {
            kind: self.kind,
            error: self.error.context(ctx),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl From<rotorbath::Error> for Failure {
    fn from(e: rotorbath::Error) -> Self {
        let kind = if e.is_config() {
            Kind::Config
        } else {
            Kind::Numerical
        };
        // the message already embeds the kick annotation's source
        Self {
            kind,
            error: anyhow::Error::msg(e.to_string()),
        }
    }
}
