//! Seeded generator of well-formed documents. Each document comes with the
//! event sequence and tree the parser is expected to produce, derived from
//! the generator's own model rather than from the parser.

use quizwright_core::xml::{Attribute, Element, XmlEvent, XmlNode};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Generated {
    pub source: String,
    pub events: Vec<XmlEvent>,
    /// Comment-free tree with adjacent text merged.
    pub tree: Element,
    /// Byte offset just past the root start tag's `>`.
    pub content_start: usize,
    /// Byte offset of the root end tag's `<`.
    pub close_start: usize,
}

const NAME_START: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
const NAME_REST: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_.-";
const TEXT_CHARS: &[char] = &[
    'a',
    'b',
    'z',
    '0',
    '9',
    ' ',
    '\n',
    '\t',
    '<',
    '>',
    '&',
    '"',
    '\'',
    '\u{e9}',
    '\u{263a}',
    '\u{1f600}',
];

fn name(rng: &mut StdRng) -> String {
    let mut s = String::new();
    s.push(*NAME_START.choose(rng).unwrap() as char);
    for _ in 0..rng.gen_range(0..6) {
        s.push(*NAME_REST.choose(rng).unwrap() as char);
    }
    s
}

fn raw_text(rng: &mut StdRng) -> String {
    (0..rng.gen_range(1..12))
        .map(|_| *TEXT_CHARS.choose(rng).unwrap())
        .collect()
}

/// Escapes one character of character data, picking among equivalent
/// spellings at random.
fn escape_char(rng: &mut StdRng, c: char, quote: Option<char>, out: &mut String) {
    let must = matches!(c, '<' | '&') || Some(c) == quote;
    if !must && rng.gen_bool(0.85) {
        out.push(c);
        return;
    }
    match (c, rng.gen_range(0..3)) {
        ('<', 0) => out.push_str("&lt;"),
        ('>', 0) => out.push_str("&gt;"),
        ('&', 0) => out.push_str("&amp;"),
        ('"', 0) => out.push_str("&quot;"),
        ('\'', 0) => out.push_str("&apos;"),
        (c, 1) => out.push_str(&format!("&#{};", c as u32)),
        (c, _) => out.push_str(&format!("&#x{:X};", c as u32)),
    }
}

fn comment(rng: &mut StdRng) -> String {
    let body: String = (0..rng.gen_range(0..8))
        .map(|_| *[' ', 'c', '-', '<', '&', '\u{e9}'].choose(rng).unwrap())
        .collect();
    // `--` and a trailing `-` are not allowed inside comments.
    let mut body = body.replace("--", "- ");
    if body.ends_with('-') {
        body.push(' ');
    }
    body
}

struct Gen<'r> {
    rng: &'r mut StdRng,
    src: String,
    events: Vec<XmlEvent>,
    pending_text: String,
}

impl Gen<'_> {
    fn flush_text(&mut self) {
        if !self.pending_text.is_empty() {
            self.events
                .push(XmlEvent::Characters(std::mem::take(&mut self.pending_text)));
        }
    }

    fn maybe_comment(&mut self) {
        if self.rng.gen_bool(0.15) {
            self.flush_text();
            let c = comment(self.rng);
            self.src.push_str(&format!("<!--{c}-->"));
            self.events.push(XmlEvent::Comment(c));
        }
    }

    fn element(&mut self, depth: usize) -> Element {
        self.element_at(depth).0
    }

    /// Also returns the offsets of the element's content start and end tag.
    fn element_at(&mut self, depth: usize) -> (Element, usize, usize) {
        let n = name(self.rng);
        let mut attrs: Vec<Attribute> = Vec::new();
        for _ in 0..self.rng.gen_range(0..4) {
            let a = name(self.rng);
            if attrs.iter().all(|x| x.name != a) {
                attrs.push(Attribute::new(a, raw_text(self.rng)));
            }
        }
        self.src.push('<');
        self.src.push_str(&n);
        for a in &attrs {
            let q = if self.rng.gen_bool(0.5) { '"' } else { '\'' };
            let ws = [" ", "  ", "\n", "\t"].choose(self.rng).unwrap();
            let eq = *["=", " =", "= ", " = "].choose(self.rng).unwrap();
            self.src.push_str(&format!("{ws}{}{eq}{q}", a.name));
            for c in a.value.chars() {
                escape_char(self.rng, c, Some(q), &mut self.src);
            }
            self.src.push(q);
        }
        self.events.push(XmlEvent::StartElement {
            name: n.clone(),
            attributes: attrs.clone(),
        });
        let mut el = Element {
            name: n.clone(),
            attributes: attrs,
            children: vec![],
        };
        let empty = depth > 0 && self.rng.gen_bool(0.2);
        let (content_start, close_start);
        if empty && self.rng.gen_bool(0.5) {
            self.src
                .push_str(if self.rng.gen_bool(0.5) { "/>" } else { " />" });
            (content_start, close_start) = (self.src.len(), self.src.len());
        } else {
            self.src.push('>');
            content_start = self.src.len();
            if !empty {
                for _ in 0..self.rng.gen_range(0..5) {
                    self.maybe_comment();
                    if depth < 5 && self.rng.gen_bool(0.45) {
                        self.flush_text();
                        let child = self.element(depth + 1);
                        el.children.push(XmlNode::Element(child));
                    } else {
                        let t = raw_text(self.rng);
                        for c in t.chars() {
                            escape_char(self.rng, c, None, &mut self.src);
                        }
                        self.pending_text.push_str(&t);
                        match el.children.last_mut() {
                            Some(XmlNode::Text(prev)) => prev.push_str(&t),
                            _ => el.children.push(XmlNode::Text(t)),
                        }
                    }
                }
                self.maybe_comment();
            }
            self.flush_text();
            close_start = self.src.len();
            self.src.push_str(&format!(
                "</{n}{}>",
                if self.rng.gen_bool(0.1) { " " } else { "" }
            ));
        }
        self.events.push(XmlEvent::EndElement { name: n });
        (el, content_start, close_start)
    }
}

pub fn generate(rng: &mut StdRng) -> Generated {
    let mut g = Gen {
        rng,
        src: String::new(),
        events: vec![XmlEvent::StartDocument],
        pending_text: String::new(),
    };
    if g.rng.gen_bool(0.7) {
        let q = if g.rng.gen_bool(0.5) { '"' } else { '\'' };
        let enc = if g.rng.gen_bool(0.5) {
            format!(" encoding={q}utf-8{q}")
        } else {
            String::new()
        };
        g.src.push_str(&format!("<?xml version={q}1.0{q}{enc}?>\n"));
    }
    if g.rng.gen_bool(0.3) {
        let c = comment(g.rng);
        g.src.push_str(&format!("<!--{c}-->\n"));
        g.events.push(XmlEvent::Comment(c));
    }
    let (tree, content_start, close_start) = g.element_at(0);
    if g.rng.gen_bool(0.3) {
        let c = comment(g.rng);
        g.src.push_str(&format!("\n<!--{c}-->"));
        g.events.push(XmlEvent::Comment(c));
    }
    g.src.push_str(["", "\n", " \n\t"].choose(g.rng).unwrap());
    g.events.push(XmlEvent::EndDocument);
    Generated {
        source: g.src,
        events: g.events,
        tree,
        content_start,
        close_start,
    }
}
