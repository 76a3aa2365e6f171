use std::fmt;

use companion_core::{BisimError, CausalError, LatticeError, SolveError};
use serde_json::json;

pub const EXIT_FALSE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_REFUSED: u8 = 3;
pub const EXIT_BOUNDS: u8 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub file: String,
    /// 1-based; 0 when the error concerns the input as a whole.
    pub line: usize,
    pub col: usize,
}

impl Location {
    pub fn whole(file: impl Into<String>) -> Self {
        Location { file: file.into(), line: 0, col: 0 }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.file)
        } else {
            write!(f, "{}:{}:{}", self.file, self.line, self.col)
        }
    }
}

/// A user-facing error with a stable code and an exit status.
#[derive(Clone, Debug)]
pub struct Diag {
    pub code: &'static str,
    pub message: String,
    pub location: Option<Location>,
    /// The name the error is about, used to find a location after the fact.
    pub subject: Option<String>,
    pub exit: u8,
}

impl Diag {
    pub fn input(code: &'static str, message: impl Into<String>) -> Self {
        Diag { code, message: message.into(), location: None, subject: None, exit: EXIT_INPUT }
    }

    pub fn at(code: &'static str, location: Location, message: impl Into<String>) -> Self {
        Diag { code, message: message.into(), location: Some(location), subject: None, exit: EXIT_INPUT }
    }

    pub fn refused(message: impl Into<String>) -> Self {
        Diag { code: "refused", message: message.into(), location: None, subject: None, exit: EXIT_REFUSED }
    }

    pub fn about(mut self, name: &str) -> Self {
        self.subject.get_or_insert_with(|| name.to_string());
        self
    }

    /// Attach `loc` unless a more precise location is already known.
    pub fn or_at(mut self, loc: impl FnOnce() -> Location) -> Self {
        if self.location.is_none() {
            self.location = Some(loc());
        }
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({"error": self.code, "message": self.message, "exit": self.exit});
        if let Some(l) = &self.location {
            v["file"] = json!(l.file);
            if l.line > 0 {
                v["line"] = json!(l.line);
                v["col"] = json!(l.col);
            }
        }
        v
    }
}

impl fmt::Display for Diag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(l) => write!(f, "{l}: error[{}]: {}", self.code, self.message),
            None => write!(f, "error[{}]: {}", self.code, self.message),
        }
    }
}

impl From<SolveError> for Diag {
    fn from(e: SolveError) -> Self {
        let subject = match &e {
            SolveError::UnknownVariable(s) | SolveError::UnregisteredOp(s) | SolveError::UnboundOracle(s) => Some(s.clone()),
            SolveError::VariableArity { name: s, .. }
            | SolveError::NonCausalOp { symbol: s, .. }
            | SolveError::CrossSignatureInRecursion { symbol: s }
            | SolveError::SignatureMismatch { symbol: s, .. }
            | SolveError::OpArity { symbol: s, .. }
            | SolveError::IllFormed { var: s, .. }
            | SolveError::MissingGsosRule { symbol: s, .. } => Some(s.clone()),
            _ => None,
        };
        let d: Diag = match e {
            SolveError::UnregisteredOp(_) | SolveError::NonCausalOp { .. } | SolveError::CrossSignatureInRecursion { .. } => {
                Diag::refused(e.to_string())
            }
            SolveError::Causal(c) => c.into(),
            e => Diag::input("solve", e.to_string()),
        };
        match subject {
            Some(s) => d.about(&s),
            None => d,
        }
    }
}

impl From<CausalError> for Diag {
    fn from(e: CausalError) -> Self {
        let subject = match &e {
            CausalError::NotCausal { symbol, .. } | CausalError::Incoherent { symbol, .. } => Some(symbol.clone()),
            _ => None,
        };
        let d = match e {
            CausalError::LevelTooLarge(_) | CausalError::NotCausal { .. } | CausalError::Incoherent { .. } => {
                Diag::refused(e.to_string())
            }
            e => Diag::input("causal", e.to_string()),
        };
        match subject {
            Some(s) => d.about(&s),
            None => d,
        }
    }
}

impl From<BisimError> for Diag {
    fn from(e: BisimError) -> Self {
        match e {
            BisimError::Refused { .. } => Diag::refused(e.to_string()),
            BisimError::Solve(s) => s.into(),
            BisimError::BadProof(_) => Diag { code: "bad-proof", message: e.to_string(), location: None, subject: None, exit: EXIT_FALSE },
            e => Diag::input("bisim", e.to_string()),
        }
    }
}

impl From<LatticeError> for Diag {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::NotBelowCompanion => Diag::refused(e.to_string()),
            e => Diag::input("lattice", e.to_string()),
        }
    }
}
