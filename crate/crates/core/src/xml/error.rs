use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    Syntax,
    Nesting,
    DuplicateAttribute,
    BadEntity,
    Encoding,
    DepthLimit,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::Nesting => "nesting error",
            ParseErrorKind::DuplicateAttribute => "duplicate attribute",
            ParseErrorKind::BadEntity => "bad entity",
            ParseErrorKind::Encoding => "encoding error",
            ParseErrorKind::DepthLimit => "depth limit exceeded",
        };
        f.write_str(s)
    }
}

/// A well-formedness failure. `line` and `column` are 1-based; the column
/// counts characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    /// Builds an error positioned at byte `offset` of `input`.
    pub(crate) fn at(
        input: &[u8],
        offset: usize,
        kind: ParseErrorKind,
        message: impl Into<String>,
    ) -> Self {
        let offset = offset.min(input.len());
        let prefix = &input[..offset];
        let line = 1 + prefix.iter().filter(|&&b| b == b'\n').count();
        let line_start = prefix
            .iter()
            .rposition(|&b| b == b'\n')
            .map_or(0, |i| i + 1);
        // Count UTF-8 lead bytes only.
        let column = 1 + prefix[line_start..]
            .iter()
            .filter(|&&b| (b & 0xC0) != 0x80)
            .count();
        ParseError {
            kind,
            line,
            column,
            message: message.into(),
        }
    }
}
