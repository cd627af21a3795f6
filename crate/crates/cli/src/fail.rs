use std::fmt;

use serde_json::json;
use wkw_core::Error;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_ACCEPTANCE: i32 = 4;

/// A failed run: exit code plus a message that is also emitted as JSON on
/// stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, kind: "validation", message: message.into() }
    }

    pub fn io(e: impl fmt::Display) -> Self {
        Self { code: EXIT_VALIDATION, kind: "io", message: e.to_string() }
    }

    pub fn acceptance(message: impl Into<String>) -> Self {
        Self { code: EXIT_ACCEPTANCE, kind: "acceptance", message: message.into() }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind, "message": self.message, "exit_code": self.code }).to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let validation = matches!(
            e,
            Error::Empty
                | Error::InvalidGrid(_)
                | Error::SizeMismatch { .. }
                | Error::BelowCritical { .. }
                | Error::OutOfRange { .. }
                | Error::Degenerate { .. }
                | Error::SupportOutsideWindow { .. }
                | Error::SupportCrossesLevelBounds { .. }
                | Error::InvalidParameter(_)
        );
        if validation {
            Self { code: EXIT_VALIDATION, kind: "validation", message: e.to_string() }
        } else {
            Self { code: EXIT_SOLVER, kind: "solver", message: e.to_string() }
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(Failure::from(Error::InvalidParameter("x".into())).code, EXIT_VALIDATION);
        assert_eq!(Failure::from(Error::BelowCritical { p: 1.0, p_crit: 1.27, margin: 0.001 }).code, EXIT_VALIDATION);
        assert_eq!(Failure::from(Error::NewtonFailed { iterations: 50, residual: 1.0 }).code, EXIT_SOLVER);
        assert_eq!(Failure::from(Error::Stagnation { iterations: 9, residual: 1.0 }).code, EXIT_SOLVER);
        assert_eq!(Failure::acceptance("x").code, EXIT_ACCEPTANCE);
        let v: serde_json::Value = serde_json::from_str(&Failure::validation("bad").to_json()).unwrap();
        assert_eq!(v["exit_code"], 2);
    }
}
