use std::collections::BTreeMap;

use super::{AttrDecl, ChildRef, ContentModel, ElementDecl, MaxOccurs, Schema, ValueType};
use crate::xml::{is_valid_name, Element, ParseError, XmlDocument, XmlNode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("schema file is not well-formed: {0}")]
    Parse(ParseError),
    #[error("element `{0}` is declared more than once")]
    Duplicate(String),
    #[error("element `{element}` references undeclared element `{reference}`")]
    UndeclaredReference { element: String, reference: String },
    #[error("root element `{0}` is not declared")]
    UndeclaredRoot(String),
    #[error("in declaration `{element}`: {message}")]
    Malformed { element: String, message: String },
}

fn malformed(element: &str, message: impl Into<String>) -> SchemaError {
    SchemaError::Malformed {
        element: element.to_owned(),
        message: message.into(),
    }
}

/// Builds a [`Schema`] from a parsed schema file.
pub fn load_schema(doc: &XmlDocument) -> Result<Schema, SchemaError> {
    let top = &doc.root;
    if top.name != "schema" {
        return Err(malformed(
            &top.name,
            "schema files must have a `schema` root element",
        ));
    }
    only_attrs(top, &["root"])?;
    no_text(top)?;
    let root = top
        .attr("root")
        .ok_or_else(|| malformed("schema", "missing `root` attribute"))?
        .to_owned();

    let mut declarations = BTreeMap::new();
    for e in top.elements() {
        if e.name != "element" {
            return Err(malformed("schema", format!("unexpected `{}`", e.name)));
        }
        let decl = element_decl(e)?;
        if declarations.contains_key(&decl.name) {
            return Err(SchemaError::Duplicate(decl.name));
        }
        declarations.insert(decl.name.clone(), decl);
    }

    for decl in declarations.values() {
        if let ContentModel::Children(refs) = &decl.content {
            if let Some(r) = refs.iter().find(|r| !declarations.contains_key(&r.name)) {
                return Err(SchemaError::UndeclaredReference {
                    element: decl.name.clone(),
                    reference: r.name.clone(),
                });
            }
        }
    }
    if !declarations.contains_key(&root) {
        return Err(SchemaError::UndeclaredRoot(root));
    }
    Ok(Schema { root, declarations })
}

fn element_decl(e: &Element) -> Result<ElementDecl, SchemaError> {
    only_attrs(e, &["name"])?;
    let name = e
        .attr("name")
        .ok_or_else(|| malformed("element", "missing `name` attribute"))?;
    if !is_valid_name(name) {
        return Err(malformed(name, "invalid element name"));
    }
    no_text(e)?;

    let mut attributes: Vec<AttrDecl> = Vec::new();
    let mut content = None;
    for child in e.elements() {
        match child.name.as_str() {
            "attribute" => {
                let a = attr_decl(name, child)?;
                if attributes.iter().any(|x| x.name == a.name) {
                    return Err(malformed(
                        name,
                        format!("attribute `{}` declared twice", a.name),
                    ));
                }
                attributes.push(a);
            }
            "empty" | "text" | "children" => {
                if content.is_some() {
                    return Err(malformed(name, "more than one content model"));
                }
                content = Some(content_model(name, child)?);
            }
            other => return Err(malformed(name, format!("unexpected `{other}`"))),
        }
    }
    let content = content.ok_or_else(|| {
        malformed(
            name,
            "missing content model (`empty`, `text` or `children`)",
        )
    })?;
    Ok(ElementDecl {
        name: name.to_owned(),
        attributes,
        content,
    })
}

fn attr_decl(owner: &str, e: &Element) -> Result<AttrDecl, SchemaError> {
    only_attrs(e, &["name", "type", "required"])?;
    let name = e
        .attr("name")
        .ok_or_else(|| malformed(owner, "attribute declaration without `name`"))?;
    if !is_valid_name(name) {
        return Err(malformed(owner, format!("invalid attribute name `{name}`")));
    }
    let required = match e.attr("required") {
        Some("true") => true,
        Some("false") => false,
        _ => {
            return Err(malformed(
                owner,
                format!("attribute `{name}` needs required=\"true|false\""),
            ))
        }
    };
    let value_type = value_type(owner, e)?;
    Ok(AttrDecl {
        name: name.to_owned(),
        required,
        value_type,
    })
}

/// Reads `type="..."` plus, for `enum`, the `<enumeration value>` children.
fn value_type(owner: &str, e: &Element) -> Result<ValueType, SchemaError> {
    no_text(e)?;
    let ty = e
        .attr("type")
        .ok_or_else(|| malformed(owner, format!("`{}` without `type`", e.name)))?;
    let vt = match ty {
        "string" => ValueType::String,
        "integer" => ValueType::Integer,
        "hex32" => ValueType::Hex32,
        "id-token" => ValueType::IdToken,
        "enum" => {
            let mut members: Vec<String> = Vec::new();
            for m in e.elements() {
                if m.name != "enumeration" {
                    return Err(malformed(owner, format!("unexpected `{}` in enum", m.name)));
                }
                only_attrs(m, &["value"])?;
                let v = m
                    .attr("value")
                    .ok_or_else(|| malformed(owner, "`enumeration` without `value`"))?;
                if members.iter().any(|x| x == v) {
                    return Err(malformed(
                        owner,
                        format!("enumeration value `{v}` repeated"),
                    ));
                }
                members.push(v.to_owned());
            }
            if members.is_empty() {
                return Err(malformed(owner, "enum type with no enumeration values"));
            }
            return Ok(ValueType::Enumeration(members));
        }
        other => return Err(malformed(owner, format!("unknown type `{other}`"))),
    };
    if e.elements().next().is_some() {
        return Err(malformed(
            owner,
            format!(
                "only enum types take children, found one under `{}`",
                e.name
            ),
        ));
    }
    Ok(vt)
}

fn content_model(owner: &str, e: &Element) -> Result<ContentModel, SchemaError> {
    match e.name.as_str() {
        "empty" => {
            only_attrs(e, &[])?;
            if !e.children.iter().all(is_blank) {
                return Err(malformed(owner, "`empty` takes no content"));
            }
            Ok(ContentModel::Empty)
        }
        "text" => {
            only_attrs(e, &["type"])?;
            Ok(ContentModel::Text(value_type(owner, e)?))
        }
        _ => {
            only_attrs(e, &[])?;
            no_text(e)?;
            let mut refs = Vec::new();
            for r in e.elements() {
                if r.name != "element" {
                    return Err(malformed(
                        owner,
                        format!("unexpected `{}` in children", r.name),
                    ));
                }
                refs.push(child_ref(owner, r)?);
            }
            Ok(ContentModel::Children(refs))
        }
    }
}

fn child_ref(owner: &str, e: &Element) -> Result<ChildRef, SchemaError> {
    only_attrs(e, &["ref", "min", "max"])?;
    if e.elements().next().is_some() {
        return Err(malformed(owner, "child references take no content"));
    }
    let name = e
        .attr("ref")
        .ok_or_else(|| malformed(owner, "child reference without `ref`"))?;
    let min: u32 = e.attr("min").and_then(parse_count).ok_or_else(|| {
        malformed(
            owner,
            format!("reference `{name}` needs a non-negative `min`"),
        )
    })?;
    let max = match e.attr("max") {
        Some("unbounded") => MaxOccurs::Unbounded,
        Some(s) => match parse_count(s) {
            Some(n) if n >= 1 => MaxOccurs::Bounded(n),
            _ => {
                return Err(malformed(
                    owner,
                    format!("reference `{name}` has invalid `max`"),
                ))
            }
        },
        None => return Err(malformed(owner, format!("reference `{name}` needs `max`"))),
    };
    if let MaxOccurs::Bounded(m) = max {
        if min > m {
            return Err(malformed(
                owner,
                format!("reference `{name}` has min > max"),
            ));
        }
    }
    Ok(ChildRef {
        name: name.to_owned(),
        min,
        max,
    })
}

fn parse_count(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn is_blank(n: &XmlNode) -> bool {
    matches!(n, XmlNode::Text(t) if t.bytes().all(|b| b.is_ascii_whitespace()))
}

fn no_text(e: &Element) -> Result<(), SchemaError> {
    if e.children
        .iter()
        .any(|n| matches!(n, XmlNode::Text(_)) && !is_blank(n))
    {
        return Err(malformed(&e.name, "unexpected text"));
    }
    Ok(())
}

fn only_attrs(e: &Element, allowed: &[&str]) -> Result<(), SchemaError> {
    match e
        .attributes
        .iter()
        .find(|a| !allowed.contains(&a.name.as_str()))
    {
        Some(a) => Err(malformed(
            &e.name,
            format!("unexpected attribute `{}`", a.name),
        )),
        None => Ok(()),
    }
}
