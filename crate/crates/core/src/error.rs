use thiserror::Error;

/// Errors raised by the simulator. Each maps onto a CLI exit code via [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("unit mismatch: expected {expected}, got {got}")]
    UnitMismatch { expected: String, got: String },
    #[error("unknown particle `{0}`")]
    UnknownParticle(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("energy {energy_ev:e} eV outside tabulated range [{lo:e}, {hi:e}] eV")]
    Extrapolation { energy_ev: f64, lo: f64, hi: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("no bracket: {0}")]
    NoBracket(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// 2 validation, 3 numerical, 4 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::NoBracket(_) => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg()))
    }
}
