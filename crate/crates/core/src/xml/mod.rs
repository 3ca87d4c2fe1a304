//! A small, self-contained XML processor.
//!
//! Two interfaces are offered over the same grammar:
//!
//! * a streaming interface ([`parse_events`]) that pushes [`XmlEvent`]s into an
//!   [`EventSink`] as each construct is recognised, and
//! * a tree interface ([`parse_tree`]) that materialises the whole document as
//!   an [`XmlDocument`] built from that event stream.
//!
//! The accepted language is a subset of XML 1.0: elements, attributes,
//! character data, comments, an optional XML declaration, the five predefined
//! entities and numeric character references. DTDs, processing instructions,
//! CDATA sections and namespaces are rejected. Input must be UTF-8.

mod error;
mod events;
mod path;
mod serialize;
mod tree;

pub use error::{ParseError, ParseErrorKind};
pub use events::{parse_events, EventSink, XmlEvent, MAX_DEPTH};
pub use path::{select_path, PathError};
pub use serialize::{serialize, serialize_to_string, XML_DECLARATION};
pub use tree::{parse_tree, Element, TreeBuilder, XmlDocument, XmlNode};

/// A single `name="value"` pair on a start tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub name: String,
    pub value: String,
}

impl Attribute {
    pub fn new(name: impl Into<String>, value: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            value: value.into(),
        }
    }
}

/// Returns true when `name` matches the accepted name grammar: a letter or
/// `_`, followed by letters, digits, `_`, `-` or `.` (ASCII only).
pub fn is_valid_name(name: &str) -> bool {
    let mut bytes = name.bytes();
    match bytes.next() {
        Some(b) if is_name_start(b) => bytes.all(is_name_char),
        _ => false,
    }
}

pub(crate) fn is_name_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

pub(crate) fn is_name_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.')
}

pub(crate) fn is_xml_whitespace(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r')
}

/// Characters allowed in text and attribute values.
pub(crate) fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r')
        || ('\u{20}'..='\u{D7FF}').contains(&c)
        || ('\u{E000}'..='\u{FFFD}').contains(&c)
        || ('\u{10000}'..='\u{10FFFF}').contains(&c)
}
