//! A compact, XML-syntax schema language and its validator.
//!
//! A schema names the expected root element and declares every element that
//! may appear: its attributes (with a value type and whether they are
//! required) and its content model, which is one of empty, typed text, or a
//! flat ordered sequence of child references with occurrence bounds.
//!
//! ```xml
//! <schema root="testconfig">
//!   <element name="testconfig">
//!     <attribute name="id" type="id-token" required="true"/>
//!     <attribute name="shuffle" type="enum" required="true">
//!       <enumeration value="true"/>
//!       <enumeration value="false"/>
//!     </attribute>
//!     <empty/>
//!   </element>
//! </schema>
//! ```

mod load;
pub mod shipped;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

pub use load::{load_schema, SchemaError};
pub use validate::validate;

use crate::xml::{parse_tree, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueType {
    String,
    /// Optional `-` followed by one or more ASCII digits.
    Integer,
    /// Exactly 32 lowercase hex characters.
    Hex32,
    /// One or more of `[A-Za-z0-9_-]`.
    IdToken,
    Enumeration(Vec<String>),
}

impl ValueType {
    pub fn accepts(&self, value: &str) -> bool {
        match self {
            ValueType::String => true,
            ValueType::Integer => {
                let digits = value.strip_prefix('-').unwrap_or(value);
                !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
            }
            ValueType::Hex32 => {
                value.len() == 32
                    && value
                        .bytes()
                        .all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
            }
            ValueType::IdToken => is_id_token(value),
            ValueType::Enumeration(members) => members.iter().any(|m| m == value),
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::String => f.write_str("string"),
            ValueType::Integer => f.write_str("integer"),
            ValueType::Hex32 => f.write_str("hex32"),
            ValueType::IdToken => f.write_str("id-token"),
            ValueType::Enumeration(m) => write!(f, "one of {}", m.join("|")),
        }
    }
}

/// True for one or more characters from `[A-Za-z0-9_-]`.
pub fn is_id_token(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttrDecl {
    pub name: String,
    pub required: bool,
    pub value_type: ValueType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxOccurs {
    Bounded(u32),
    Unbounded,
}

impl MaxOccurs {
    pub fn allows(self, count: u32) -> bool {
        match self {
            MaxOccurs::Bounded(max) => count <= max,
            MaxOccurs::Unbounded => true,
        }
    }
}

impl fmt::Display for MaxOccurs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxOccurs::Bounded(n) => write!(f, "{n}"),
            MaxOccurs::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildRef {
    pub name: String,
    pub min: u32,
    pub max: MaxOccurs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContentModel {
    Empty,
    Text(ValueType),
    Children(Vec<ChildRef>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementDecl {
    pub name: String,
    pub attributes: Vec<AttrDecl>,
    pub content: ContentModel,
}

impl ElementDecl {
    pub fn attribute(&self, name: &str) -> Option<&AttrDecl> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub root: String,
    pub declarations: BTreeMap<String, ElementDecl>,
}

impl Schema {
    /// Parses and loads a schema file.
    pub fn from_bytes(input: &[u8]) -> Result<Schema, SchemaError> {
        let doc = parse_tree(input).map_err(SchemaError::Parse)?;
        load_schema(&doc)
    }

    pub fn declaration(&self, name: &str) -> Option<&ElementDecl> {
        self.declarations.get(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    MissingAttr,
    BadAttrType,
    UnknownAttr,
    UnknownElement,
    Cardinality,
    BadContent,
    BadRoot,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One schema finding. `path` addresses the offending element in the form
/// accepted by [`crate::xml::select_path`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.path, self.rule, self.message)
    }
}

/// Well-formedness or validity failure of a document checked against a schema.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocumentError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{} schema violation(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
}
