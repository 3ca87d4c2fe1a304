use std::collections::HashMap;

use super::{ChildRef, ContentModel, ElementDecl, Rule, Schema, Violation};
use crate::xml::{Element, XmlDocument, XmlNode};

/// Checks `doc` against `schema`, returning every violation found in one
/// document-order walk. An empty result means the document is valid.
pub fn validate(doc: &XmlDocument, schema: &Schema) -> Vec<Violation> {
    let mut v = Validator {
        schema,
        out: Vec::new(),
    };
    let root = &doc.root;
    let path = root.name.clone();
    if root.name != schema.root {
        v.push(
            &path,
            Rule::BadRoot,
            format!(
                "root element is `{}`, expected `{}`",
                root.name, schema.root
            ),
        );
    }
    if let Some(decl) = schema.declaration(&root.name) {
        v.element(root, decl, &path);
    }
    v.out
}

struct Validator<'s> {
    schema: &'s Schema,
    out: Vec<Violation>,
}

fn is_whitespace(t: &str) -> bool {
    t.bytes().all(|b| matches!(b, b' ' | b'\t' | b'\n' | b'\r'))
}

impl<'s> Validator<'s> {
    fn push(&mut self, path: &str, rule: Rule, message: String) {
        self.out.push(Violation {
            path: path.to_owned(),
            rule,
            message,
        });
    }

    fn element(&mut self, e: &Element, decl: &ElementDecl, path: &str) {
        self.attributes(e, decl, path);
        match &decl.content {
            ContentModel::Empty => {
                let has_text = e
                    .children
                    .iter()
                    .any(|n| matches!(n, XmlNode::Text(t) if !is_whitespace(t)));
                if has_text || e.elements().next().is_some() {
                    self.push(
                        path,
                        Rule::BadContent,
                        format!("`{}` must be empty", e.name),
                    );
                }
            }
            ContentModel::Text(vt) => {
                if let Some(child) = e.elements().next() {
                    self.push(
                        path,
                        Rule::BadContent,
                        format!(
                            "`{}` holds text only, found element `{}`",
                            e.name, child.name
                        ),
                    );
                } else {
                    let text = e.text();
                    if !vt.accepts(&text) {
                        self.push(
                            path,
                            Rule::BadContent,
                            format!("text `{text}` is not a valid {vt}"),
                        );
                    }
                }
            }
            ContentModel::Children(refs) => {
                if e.children
                    .iter()
                    .any(|n| matches!(n, XmlNode::Text(t) if !is_whitespace(t)))
                {
                    self.push(
                        path,
                        Rule::BadContent,
                        format!("`{}` may not contain text", e.name),
                    );
                }
                self.sequence(e, refs, path);
            }
        }
    }

    fn attributes(&mut self, e: &Element, decl: &ElementDecl, path: &str) {
        for a in &e.attributes {
            match decl.attribute(&a.name) {
                None => self.push(
                    path,
                    Rule::UnknownAttr,
                    format!("attribute `{}` is not allowed on `{}`", a.name, e.name),
                ),
                Some(ad) if !ad.value_type.accepts(&a.value) => self.push(
                    path,
                    Rule::BadAttrType,
                    format!(
                        "attribute `{}`=`{}` is not a valid {}",
                        a.name, a.value, ad.value_type
                    ),
                ),
                Some(_) => {}
            }
        }
        for ad in decl.attributes.iter().filter(|ad| ad.required) {
            if e.attr(&ad.name).is_none() {
                self.push(
                    path,
                    Rule::MissingAttr,
                    format!(
                        "required attribute `{}` is missing on `{}`",
                        ad.name, e.name
                    ),
                );
            }
        }
    }

    /// Matches element children against the ordered reference list, moving
    /// forward only.
    fn sequence(&mut self, e: &Element, refs: &[ChildRef], path: &str) {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        let mut pos = 0usize;
        let mut count = 0u32;

        for child in e.elements() {
            let nth = seen.entry(child.name.as_str()).or_default();
            *nth += 1;
            let child_path = format!("{path}/{}[{nth}]", child.name);

            if pos < refs.len() && refs[pos].name == child.name {
                count += 1;
                if !refs[pos].max.allows(count) {
                    self.push(
                        &child_path,
                        Rule::Cardinality,
                        format!(
                            "at most {} `{}` allowed in `{}`",
                            refs[pos].max, child.name, e.name
                        ),
                    );
                }
            } else if let Some(k) = refs.iter().skip(pos + 1).position(|r| r.name == child.name) {
                let k = pos + 1 + k;
                if pos < refs.len() {
                    self.close(path, &e.name, &refs[pos], count);
                }
                for r in &refs[pos + 1..k] {
                    self.close(path, &e.name, r, 0);
                }
                pos = k;
                count = 1;
            } else if refs[..pos.min(refs.len())]
                .iter()
                .any(|r| r.name == child.name)
            {
                self.push(
                    &child_path,
                    Rule::Cardinality,
                    format!("`{}` is out of order in `{}`", child.name, e.name),
                );
            } else {
                self.push(
                    &child_path,
                    Rule::UnknownElement,
                    format!("element `{}` is not allowed in `{}`", child.name, e.name),
                );
                continue;
            }

            if let Some(decl) = self.schema.declaration(&child.name) {
                self.element(child, decl, &child_path);
            }
        }

        if pos < refs.len() {
            self.close(path, &e.name, &refs[pos], count);
            for r in &refs[pos + 1..] {
                self.close(path, &e.name, r, 0);
            }
        }
    }

    fn close(&mut self, path: &str, parent: &str, r: &ChildRef, count: u32) {
        if count < r.min {
            self.push(
                path,
                Rule::Cardinality,
                format!(
                    "`{parent}` needs at least {} `{}`, found {count}",
                    r.min, r.name
                ),
            );
        }
    }
}
