use thiserror::Error;

/// Harness failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] fractal_bv::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("no manifest in {0}")]
    MissingManifest(String),

    #[error("experiment `{id}` failed: {source}")]
    Experiment {
        id: String,
        #[source]
        source: fractal_bv::Error,
    },
}

impl HarnessError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        HarnessError::Io { context: context.into(), source }
    }

    /// 2 for configuration and parameter errors, 3 for size caps, 4 for
    /// solver failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use fractal_bv::Error as E;
        let core = match self {
            HarnessError::Config(_) => return 2,
            HarnessError::Core(e) | HarnessError::Experiment { source: e, .. } => e,
            _ => return 1,
        };
        match core {
            E::SizeCap { .. } => 3,
            E::Solver(_) => 4,
            E::UnknownFractal(_)
            | E::MissingCarpetParams
            | E::OutOfRange { .. }
            | E::Empty(_)
            | E::TooFewPoints { .. }
            | E::InvalidParameter(_)
            | E::SpecMismatch(..) => 2,
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fractal_bv::Error as E;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Config("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Core(E::SizeCap { what: "graph", requested: 2, cap: 1 }).exit_code(), 3);
        assert_eq!(HarnessError::Core(E::Solver("x".into())).exit_code(), 4);
        assert_eq!(HarnessError::Experiment { id: "wbe".into(), source: E::Empty("t grid") }.exit_code(), 2);
        assert_eq!(HarnessError::MissingManifest("d".into()).exit_code(), 1);
    }
}
