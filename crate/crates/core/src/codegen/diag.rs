use std::fmt;

/// Diagnostic codes reported by the scanner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    SyntaxError,
    DuplicateMapping,
    DuplicateParam,
    DuplicateBase,
    DuplicatePartial,
    NestedPartial,
    SuffixAmbiguity,
    SignatureMismatch,
    DuplicateClass,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::SyntaxError => "syntax-error",
            Code::DuplicateMapping => "duplicate-mapping",
            Code::DuplicateParam => "duplicate-param",
            Code::DuplicateBase => "duplicate-base",
            Code::DuplicatePartial => "duplicate-partial",
            Code::NestedPartial => "nested-partial",
            Code::SuffixAmbiguity => "suffix-ambiguity",
            Code::SignatureMismatch => "signature-mismatch",
            Code::DuplicateClass => "duplicate-class",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub code: Code,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            code,
            message: message.into(),
        }
    }
}

/// `line: code: message`; callers prefix the file name.
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.line, self.code, self.message)
    }
}

/// Convention violations found in one source unit, in source order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{} convention violation(s); first: {}", .0.len(), .0[0])]
pub struct ScanError(pub Vec<Diagnostic>);
