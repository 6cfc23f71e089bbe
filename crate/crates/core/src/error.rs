use thiserror::Error;

/// Failure while turning document bytes into a table.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid UTF-8 at byte offset {offset}")]
    Encoding { offset: usize },
}

/// Problems with a schema document: syntax, naming, or token definitions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("reference to undefined token `{0}`")]
    UndefinedToken(String),
    #[error("`{0}` is a reserved word and cannot be defined")]
    ReservedName(String),
    #[error("invalid regular expression for token `{name}`: {message}")]
    InvalidRegex { name: String, message: String },
    #[error("recursive token type `{0}`")]
    RecursiveTokenType(String),
    #[error("line {line}: unsupported feature: {feature}")]
    Unsupported { line: usize, feature: String },
    #[error("invalid delimiters: {0}")]
    Delimiters(String),
}

/// The schema falls outside the fragment a streaming engine can handle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FragmentError {
    #[error("expression is not forward: {0}")]
    NotForward(String),
    #[error("schema not guarded: {0}")]
    NotGuarded(String),
}

/// Fatal conditions raised while streaming.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("column set for `{expr}` exceeded its bound of {bound} columns")]
    RepresentationOverflow { expr: String, bound: usize },
    #[error("event stream out of order: {0}")]
    OutOfOrder(String),
}
