//! The schemas for the four document kinds the suite reads and writes.

use std::sync::OnceLock;

use super::{validate, DocumentError, Schema};
use crate::xml::{parse_tree, XmlDocument};

pub const QUIZBANK_SCHEMA: &str = include_str!("../../schemas/quizbank.schema.xml");
pub const TESTCONFIG_SCHEMA: &str = include_str!("../../schemas/testconfig.schema.xml");
pub const USERS_SCHEMA: &str = include_str!("../../schemas/users.schema.xml");
pub const RESULT_SCHEMA: &str = include_str!("../../schemas/result.schema.xml");

fn cached(cell: &'static OnceLock<Schema>, src: &str) -> &'static Schema {
    cell.get_or_init(|| Schema::from_bytes(src.as_bytes()).expect("shipped schema must load"))
}

pub fn quizbank() -> &'static Schema {
    static CELL: OnceLock<Schema> = OnceLock::new();
    cached(&CELL, QUIZBANK_SCHEMA)
}

pub fn testconfig() -> &'static Schema {
    static CELL: OnceLock<Schema> = OnceLock::new();
    cached(&CELL, TESTCONFIG_SCHEMA)
}

pub fn users() -> &'static Schema {
    static CELL: OnceLock<Schema> = OnceLock::new();
    cached(&CELL, USERS_SCHEMA)
}

pub fn result() -> &'static Schema {
    static CELL: OnceLock<Schema> = OnceLock::new();
    cached(&CELL, RESULT_SCHEMA)
}

/// Parses `input` and validates it against `schema`.
pub fn parse_valid(input: &[u8], schema: &Schema) -> Result<XmlDocument, DocumentError> {
    let doc = parse_tree(input)?;
    let violations = validate(&doc, schema);
    if violations.is_empty() {
        Ok(doc)
    } else {
        Err(DocumentError::Invalid(violations))
    }
}
