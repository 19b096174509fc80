use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Config,
    Numerical,
    Io,
}

/// Failure of a CLI run; printed as one JSON line on stderr.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{kind:?}: {message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Config, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Numerical, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Io, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Io => 1,
        }
    }

    /// `{"error":"config","code":2,"message":"..."}`
    pub fn line(&self) -> String {
        serde_json::json!({ "error": self.kind, "code": self.exit_code(), "message": self.message }).to_string()
    }
}

impl From<dimer_core::Error> for CliError {
    fn from(e: dimer_core::Error) -> Self {
        CliError::numerical(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line_json() {
        let e = CliError::config("bad\nvalue");
        let line = e.line();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["error"], "config");
        assert_eq!(v["code"], 2);
    }

    #[test]
    fn core_errors_are_numerical() {
        let e: CliError = dimer_core::Error::InfeasibleThreshold(-1.0).into();
        assert_eq!(e.exit_code(), 3);
    }
}
