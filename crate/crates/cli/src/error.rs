use std::fmt;
use std::io;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Config { line: usize, msg: String },
    Usage(String),
    MissingInitial(Vec<i64>),
    UnknownInitial(Vec<i64>),
    NoSuchCluster { id: usize, count: usize },
    Io { path: PathBuf, source: io::Error },
    Core(capwave::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { line, msg } => write!(f, "config line {line}: {msg}"),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::MissingInitial(ks) => {
                write!(f, "missing initial condition for wavenumbers {}", join(ks))
            }
            CliError::UnknownInitial(ks) => {
                write!(
                    f,
                    "initial condition given for wavenumbers not in the cluster: {}",
                    join(ks)
                )
            }
            CliError::NoSuchCluster { id, count } => {
                write!(f, "cluster id {id} out of range ({count} clusters)")
            }
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io { source, .. } => Some(source),
            CliError::Core(e) => Some(e),
            _ => None,
        }
    }
}

impl From<capwave::Error> for CliError {
    fn from(e: capwave::Error) -> Self {
        CliError::Core(e)
    }
}

fn join(ks: &[i64]) -> String {
    ks.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
