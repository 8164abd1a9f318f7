use std::fmt;
use std::path::Path;
use std::process::ExitCode;

/// A failed command, classified by the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Data(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Data(_) => 3,
        })
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Failure::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Data(m) => f.write_str(m),
        }
    }
}

impl From<svad_ntc::Error> for Failure {
    fn from(err: svad_ntc::Error) -> Self {
        use svad_ntc::Error as E;
        let mut root = &err;
        while let E::AtPoint { source, .. } = root {
            root = source;
        }
        match root {
            E::Format(_)
            | E::Framing { .. }
            | E::NonFiniteSample { .. }
            | E::LengthMismatch { .. }
            | E::NtcExceedsSequence { .. } => Failure::Data(err.to_string()),
            _ => Failure::Usage(err.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;
