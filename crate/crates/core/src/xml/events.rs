use super::{
    is_name_char, is_name_start, is_xml_char, is_xml_whitespace, Attribute, ParseError,
    ParseErrorKind,
};

/// Maximum element nesting depth. Opening an element deeper than this fails
/// with [`ParseErrorKind::DepthLimit`].
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlEvent {
    StartDocument,
    EndDocument,
    StartElement {
        name: String,
        attributes: Vec<Attribute>,
    },
    EndElement {
        name: String,
    },
    Characters(String),
    Comment(String),
}

/// Receives events from [`parse_events`] one at a time.
pub trait EventSink {
    fn event(&mut self, event: XmlEvent);
}

impl<F: FnMut(XmlEvent)> EventSink for F {
    fn event(&mut self, event: XmlEvent) {
        self(event)
    }
}

impl EventSink for Vec<XmlEvent> {
    fn event(&mut self, event: XmlEvent) {
        self.push(event)
    }
}

/// Parses `input` and pushes the event stream into `sink`.
///
/// On failure no further events are delivered; events already delivered
/// describe the well-formed prefix of the document.
pub fn parse_events<S: EventSink + ?Sized>(input: &[u8], sink: &mut S) -> Result<(), ParseError> {
    Parser {
        input,
        pos: 0,
        open: Vec::new(),
    }
    .run(sink)
}

type PResult<T> = Result<T, ParseError>;

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    /// Names of currently open elements.
    open: Vec<String>,
}

impl<'a> Parser<'a> {
    fn run<S: EventSink + ?Sized>(mut self, sink: &mut S) -> PResult<()> {
        if self.input.starts_with(b"\xEF\xBB\xBF") {
            self.pos = 3;
        }
        if self.starts_with(b"<?xml")
            && self
                .input
                .get(self.pos + 5)
                .is_some_and(|&b| is_xml_whitespace(b) || b == b'?')
        {
            self.declaration()?;
        }
        sink.event(XmlEvent::StartDocument);

        // Prolog: whitespace and comments up to the root element.
        loop {
            self.skip_whitespace();
            if self.at_end() {
                return Err(self.err(ParseErrorKind::Syntax, "document has no root element"));
            }
            if self.starts_with(b"<!--") {
                let text = self.comment()?;
                sink.event(XmlEvent::Comment(text));
            } else if self.peek() == Some(b'<') {
                self.markup_guard()?;
                break;
            } else {
                return Err(self.err(
                    ParseErrorKind::Syntax,
                    "text is not allowed outside the root element",
                ));
            }
        }

        self.start_tag(sink)?;
        self.content(sink)?;

        // Epilog: whitespace and comments only.
        loop {
            self.skip_whitespace();
            if self.at_end() {
                break;
            }
            if self.starts_with(b"<!--") {
                let text = self.comment()?;
                sink.event(XmlEvent::Comment(text));
            } else if self.peek() == Some(b'<') {
                self.markup_guard()?;
                return Err(self.err(
                    ParseErrorKind::Syntax,
                    "document has more than one root element",
                ));
            } else {
                return Err(self.err(
                    ParseErrorKind::Syntax,
                    "text is not allowed outside the root element",
                ));
            }
        }
        sink.event(XmlEvent::EndDocument);
        Ok(())
    }

    /// Element content, until the root element is closed.
    fn content<S: EventSink + ?Sized>(&mut self, sink: &mut S) -> PResult<()> {
        while !self.open.is_empty() {
            match self.peek() {
                None => {
                    let name = self.open.last().cloned().unwrap_or_default();
                    return Err(self.err(
                        ParseErrorKind::Nesting,
                        format!("element `{name}` is never closed"),
                    ));
                }
                Some(b'<') => {
                    if self.starts_with(b"</") {
                        self.end_tag(sink)?;
                    } else if self.starts_with(b"<!--") {
                        let text = self.comment()?;
                        sink.event(XmlEvent::Comment(text));
                    } else {
                        self.markup_guard()?;
                        self.start_tag(sink)?;
                    }
                }
                Some(_) => {
                    let text = self.text()?;
                    sink.event(XmlEvent::Characters(text));
                }
            }
        }
        Ok(())
    }

    /// Rejects the markup constructs outside the supported subset.
    fn markup_guard(&self) -> PResult<()> {
        if self.starts_with(b"<?") {
            Err(self.err(
                ParseErrorKind::Syntax,
                "processing instructions are not supported",
            ))
        } else if self.starts_with(b"<![CDATA[") {
            Err(self.err(ParseErrorKind::Syntax, "CDATA sections are not supported"))
        } else if self.starts_with(b"<!") {
            Err(self.err(
                ParseErrorKind::Syntax,
                "document type declarations are not supported",
            ))
        } else {
            Ok(())
        }
    }

    fn declaration(&mut self) -> PResult<()> {
        let start = self.pos;
        self.pos += 5;
        let mut seen_version = false;
        loop {
            let had_space = self.skip_whitespace();
            if self.starts_with(b"?>") {
                self.pos += 2;
                break;
            }
            if self.at_end() {
                return Err(self.err(ParseErrorKind::Syntax, "unterminated XML declaration"));
            }
            if !had_space {
                return Err(self.err(
                    ParseErrorKind::Syntax,
                    "expected whitespace in XML declaration",
                ));
            }
            let name_pos = self.pos;
            let name = self.name()?;
            self.skip_whitespace();
            self.expect(b'=')?;
            self.skip_whitespace();
            let value_pos = self.pos;
            let value = self.attribute_value()?;
            match name.as_str() {
                "version" if !seen_version => {
                    if !(value.starts_with("1.")
                        && value.len() > 2
                        && value[2..].bytes().all(|b| b.is_ascii_digit()))
                    {
                        return Err(self.err_at(
                            value_pos,
                            ParseErrorKind::Syntax,
                            format!("unsupported XML version `{value}`"),
                        ));
                    }
                    seen_version = true;
                }
                "encoding" if seen_version => {
                    if !value.eq_ignore_ascii_case("UTF-8") {
                        return Err(self.err_at(
                            value_pos,
                            ParseErrorKind::Encoding,
                            format!("unsupported encoding `{value}`; only UTF-8 is accepted"),
                        ));
                    }
                }
                "standalone" if seen_version => {
                    if value != "yes" && value != "no" {
                        return Err(self.err_at(
                            value_pos,
                            ParseErrorKind::Syntax,
                            "standalone must be `yes` or `no`",
                        ));
                    }
                }
                _ => {
                    return Err(self.err_at(
                        name_pos,
                        ParseErrorKind::Syntax,
                        format!("unexpected `{name}` in XML declaration"),
                    ));
                }
            }
        }
        if !seen_version {
            return Err(self.err_at(
                start,
                ParseErrorKind::Syntax,
                "XML declaration lacks a version",
            ));
        }
        Ok(())
    }

    fn start_tag<S: EventSink + ?Sized>(&mut self, sink: &mut S) -> PResult<()> {
        let tag_pos = self.pos;
        self.pos += 1; // '<'
        let name = self.name()?;
        let mut attributes: Vec<Attribute> = Vec::new();
        loop {
            let had_space = self.skip_whitespace();
            match self.peek() {
                Some(b'>') | Some(b'/') => break,
                None => {
                    return Err(self.err(
                        ParseErrorKind::Syntax,
                        format!("unterminated start tag `{name}`"),
                    ))
                }
                Some(_) if !had_space => {
                    return Err(self.err(
                        ParseErrorKind::Syntax,
                        "expected whitespace before attribute",
                    ));
                }
                Some(_) => {}
            }
            let attr_pos = self.pos;
            let attr_name = self.name()?;
            self.skip_whitespace();
            self.expect(b'=')?;
            self.skip_whitespace();
            let value = self.attribute_value()?;
            if attributes.iter().any(|a| a.name == attr_name) {
                return Err(self.err_at(
                    attr_pos,
                    ParseErrorKind::DuplicateAttribute,
                    format!("attribute `{attr_name}` repeated on `{name}`"),
                ));
            }
            attributes.push(Attribute {
                name: attr_name,
                value,
            });
        }
        let empty = if self.starts_with(b"/>") {
            self.pos += 2;
            true
        } else if self.peek() == Some(b'>') {
            self.pos += 1;
            false
        } else {
            return Err(self.err(ParseErrorKind::Syntax, "expected `>` or `/>`"));
        };
        if self.open.len() >= MAX_DEPTH {
            return Err(self.err_at(
                tag_pos,
                ParseErrorKind::DepthLimit,
                format!("elements nested deeper than {MAX_DEPTH}"),
            ));
        }
        sink.event(XmlEvent::StartElement {
            name: name.clone(),
            attributes,
        });
        if empty {
            sink.event(XmlEvent::EndElement { name });
        } else {
            self.open.push(name);
        }
        Ok(())
    }

    fn end_tag<S: EventSink + ?Sized>(&mut self, sink: &mut S) -> PResult<()> {
        let tag_pos = self.pos;
        self.pos += 2;
        let name = self.name()?;
        self.skip_whitespace();
        self.expect(b'>')?;
        match self.open.last() {
            Some(open) if *open == name => {
                self.open.pop();
                sink.event(XmlEvent::EndElement { name });
                Ok(())
            }
            Some(open) => Err(self.err_at(
                tag_pos,
                ParseErrorKind::Nesting,
                format!("closing tag `{name}` does not match open element `{open}`"),
            )),
            None => Err(self.err_at(
                tag_pos,
                ParseErrorKind::Nesting,
                format!("closing tag `{name}` without open element"),
            )),
        }
    }

    /// `<!-- ... -->`; `--` may not occur inside.
    fn comment(&mut self) -> PResult<String> {
        let start = self.pos;
        self.pos += 4;
        let body_start = self.pos;
        let dash = match self.input[self.pos..].windows(2).position(|w| w == b"--") {
            Some(i) => self.pos + i,
            None => return Err(self.err_at(start, ParseErrorKind::Syntax, "unterminated comment")),
        };
        if self.input.get(dash + 2) != Some(&b'>') {
            return Err(self.err_at(
                dash,
                ParseErrorKind::Syntax,
                "`--` is not allowed inside a comment",
            ));
        }
        let body = self.decode_utf8(body_start, dash)?;
        self.check_chars(body_start, body)?;
        self.pos = dash + 3;
        Ok(body.to_owned())
    }

    /// A run of character data up to the next `<` or end of input.
    fn text(&mut self) -> PResult<String> {
        let mut out = String::new();
        loop {
            let chunk_start = self.pos;
            while let Some(b) = self.peek() {
                if b == b'<' || b == b'&' {
                    break;
                }
                self.pos += 1;
            }
            let chunk = self.decode_utf8(chunk_start, self.pos)?;
            self.check_chars(chunk_start, chunk)?;
            out.push_str(chunk);
            match self.peek() {
                Some(b'&') => out.push(self.reference()?),
                _ => return Ok(out),
            }
        }
    }

    fn attribute_value(&mut self) -> PResult<String> {
        let quote = match self.peek() {
            Some(q @ (b'"' | b'\'')) => q,
            _ => return Err(self.err(ParseErrorKind::Syntax, "expected quoted attribute value")),
        };
        self.pos += 1;
        let mut out = String::new();
        loop {
            let chunk_start = self.pos;
            while let Some(b) = self.peek() {
                if b == quote || b == b'&' || b == b'<' {
                    break;
                }
                self.pos += 1;
            }
            let chunk = self.decode_utf8(chunk_start, self.pos)?;
            self.check_chars(chunk_start, chunk)?;
            out.push_str(chunk);
            match self.peek() {
                Some(b'&') => out.push(self.reference()?),
                Some(b'<') => {
                    return Err(self.err(
                        ParseErrorKind::Syntax,
                        "`<` is not allowed in attribute values",
                    ))
                }
                Some(_) => {
                    self.pos += 1;
                    return Ok(out);
                }
                None => {
                    return Err(self.err(ParseErrorKind::Syntax, "unterminated attribute value"))
                }
            }
        }
    }

    /// An entity or character reference starting at `&`.
    fn reference(&mut self) -> PResult<char> {
        let start = self.pos;
        let semi = self.input[start..]
            .iter()
            .take(16)
            .position(|&b| b == b';')
            .map(|i| start + i)
            .ok_or_else(|| {
                self.err_at(
                    start,
                    ParseErrorKind::BadEntity,
                    "unterminated entity reference",
                )
            })?;
        let body = &self.input[start + 1..semi];
        let c = match body {
            b"lt" => Some('<'),
            b"gt" => Some('>'),
            b"amp" => Some('&'),
            b"quot" => Some('"'),
            b"apos" => Some('\''),
            [b'#', b'x', hex @ ..] if !hex.is_empty() && hex.iter().all(u8::is_ascii_hexdigit) => {
                let s = std::str::from_utf8(hex).unwrap_or_default();
                u32::from_str_radix(s, 16).ok().and_then(char::from_u32)
            }
            [b'#', dec @ ..] if !dec.is_empty() && dec.iter().all(u8::is_ascii_digit) => {
                let s = std::str::from_utf8(dec).unwrap_or_default();
                s.parse::<u32>().ok().and_then(char::from_u32)
            }
            _ => None,
        };
        match c {
            Some(c) if is_xml_char(c) => {
                self.pos = semi + 1;
                Ok(c)
            }
            _ => Err(self.err_at(
                start,
                ParseErrorKind::BadEntity,
                format!(
                    "unknown or invalid reference `&{};`",
                    String::from_utf8_lossy(body)
                ),
            )),
        }
    }

    fn name(&mut self) -> PResult<String> {
        let start = self.pos;
        match self.peek() {
            Some(b) if is_name_start(b) => self.pos += 1,
            _ => return Err(self.err(ParseErrorKind::Syntax, "expected a name")),
        }
        while self.peek().is_some_and(is_name_char) {
            self.pos += 1;
        }
        // Names are ASCII, so this slice is valid UTF-8.
        Ok(String::from_utf8_lossy(&self.input[start..self.pos]).into_owned())
    }

    fn expect(&mut self, b: u8) -> PResult<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Syntax, format!("expected `{}`", b as char)))
        }
    }

    fn skip_whitespace(&mut self) -> bool {
        let start = self.pos;
        while self.peek().is_some_and(is_xml_whitespace) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn decode_utf8(&self, start: usize, end: usize) -> PResult<&'a str> {
        let input: &'a [u8] = self.input;
        std::str::from_utf8(&input[start..end]).map_err(|e| {
            self.err_at(
                start + e.valid_up_to(),
                ParseErrorKind::Encoding,
                "invalid UTF-8 sequence",
            )
        })
    }

    fn check_chars(&self, start: usize, s: &str) -> PResult<()> {
        match s.char_indices().find(|&(_, c)| !is_xml_char(c)) {
            Some((i, c)) => Err(self.err_at(
                start + i,
                ParseErrorKind::Syntax,
                format!("character U+{:04X} is not allowed", c as u32),
            )),
            None => Ok(()),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn starts_with(&self, s: &[u8]) -> bool {
        self.input[self.pos..].starts_with(s)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.input.len()
    }

    fn err(&self, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        self.err_at(self.pos, kind, message)
    }

    fn err_at(
        &self,
        offset: usize,
        kind: ParseErrorKind,
        message: impl Into<String>,
    ) -> ParseError {
        ParseError::at(self.input, offset, kind, message)
    }
}
