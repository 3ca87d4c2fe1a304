use super::{parse_events, Attribute, EventSink, ParseError, XmlEvent};

/// An in-memory document. The root is always an element.
///
/// Trees produced by [`parse_tree`] are canonical: no empty text nodes and no
/// two adjacent text nodes. Hand-built trees must follow the same rule to
/// survive a serialize/parse round trip unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlDocument {
    pub root: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlNode {
    Element(Element),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    pub name: String,
    pub attributes: Vec<Attribute>,
    pub children: Vec<XmlNode>,
}

impl XmlDocument {
    pub fn new(root: Element) -> Self {
        XmlDocument { root }
    }
}

impl XmlNode {
    pub fn as_element(&self) -> Option<&Element> {
        match self {
            XmlNode::Element(e) => Some(e),
            XmlNode::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            XmlNode::Text(t) => Some(t),
            XmlNode::Element(_) => None,
        }
    }
}

impl From<Element> for XmlNode {
    fn from(e: Element) -> Self {
        XmlNode::Element(e)
    }
}

impl Element {
    pub fn new(name: impl Into<String>) -> Self {
        Element {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.set_attr(name, value);
        self
    }

    pub fn with_child(mut self, child: impl Into<XmlNode>) -> Self {
        self.children.push(child.into());
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.children.push(XmlNode::Text(text.into()));
        self
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.value.as_str())
    }

    /// Sets an attribute, keeping its position if it already exists.
    pub fn set_attr(&mut self, name: impl Into<String>, value: impl Into<String>) {
        let name = name.into();
        let value = value.into();
        match self.attributes.iter_mut().find(|a| a.name == name) {
            Some(a) => a.value = value,
            None => self.attributes.push(Attribute { name, value }),
        }
    }

    pub fn remove_attr(&mut self, name: &str) -> Option<String> {
        let i = self.attributes.iter().position(|a| a.name == name)?;
        Some(self.attributes.remove(i).value)
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(XmlNode::as_element)
    }

    pub fn elements_mut(&mut self) -> impl Iterator<Item = &mut Element> {
        self.children.iter_mut().filter_map(|n| match n {
            XmlNode::Element(e) => Some(e),
            XmlNode::Text(_) => None,
        })
    }

    pub fn elements_named<'a, 'n>(
        &'a self,
        name: &'n str,
    ) -> impl Iterator<Item = &'a Element> + use<'a, 'n> {
        self.elements().filter(move |e| e.name == name)
    }

    pub fn first_element(&self, name: &str) -> Option<&Element> {
        self.elements().find(|e| e.name == name)
    }

    /// Concatenation of the direct text children.
    pub fn text(&self) -> String {
        self.children.iter().filter_map(XmlNode::as_text).collect()
    }
}

/// Builds an [`XmlDocument`] from an event stream.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    stack: Vec<Element>,
    pending_text: String,
    root: Option<Element>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn flush_text(&mut self) {
        if self.pending_text.is_empty() {
            return;
        }
        let text = std::mem::take(&mut self.pending_text);
        if let Some(top) = self.stack.last_mut() {
            top.children.push(XmlNode::Text(text));
        }
    }

    /// The finished document, or `None` if no complete root element was seen.
    pub fn finish(self) -> Option<XmlDocument> {
        self.root.map(XmlDocument::new)
    }
}

impl EventSink for TreeBuilder {
    fn event(&mut self, event: XmlEvent) {
        match event {
            XmlEvent::StartDocument | XmlEvent::EndDocument | XmlEvent::Comment(_) => {}
            XmlEvent::Characters(text) => {
                if !self.stack.is_empty() {
                    self.pending_text.push_str(&text);
                }
            }
            XmlEvent::StartElement { name, attributes } => {
                self.flush_text();
                self.stack.push(Element {
                    name,
                    attributes,
                    children: Vec::new(),
                });
            }
            XmlEvent::EndElement { .. } => {
                self.flush_text();
                if let Some(done) = self.stack.pop() {
                    match self.stack.last_mut() {
                        Some(parent) => parent.children.push(XmlNode::Element(done)),
                        None => self.root = Some(done),
                    }
                }
            }
        }
    }
}

/// Parses `input` into a tree. Comments are dropped and adjacent character
/// data is merged into a single text node.
pub fn parse_tree(input: &[u8]) -> Result<XmlDocument, ParseError> {
    let mut builder = TreeBuilder::new();
    parse_events(input, &mut builder)?;
    Ok(builder
        .finish()
        .expect("a successful parse always closes the root element"))
}
