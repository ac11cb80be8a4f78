//! Small helpers shared by the three XML dialects.

use std::borrow::Cow;
use std::io::{self, BufRead, BufReader, Read};

use flate2::read::MultiGzDecoder;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};

pub(crate) const DECL: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

/// Escapes the five predefined entities and nothing else.
pub(crate) fn esc(s: &str) -> Cow<'_, str> {
    quick_xml::escape::escape(s)
}

/// Wraps `r` in a gzip decoder when it starts with the gzip magic bytes.
pub fn decode<'a, R: Read + 'a>(r: R) -> io::Result<Box<dyn BufRead + 'a>> {
    let mut b = BufReader::with_capacity(64 * 1024, r);
    let head = b.fill_buf()?;
    if head.len() >= 2 && head[0] == 0x1f && head[1] == 0x8b {
        Ok(Box::new(BufReader::with_capacity(64 * 1024, MultiGzDecoder::new(b))))
    } else {
        Ok(Box::new(b))
    }
}

/// A pull parser that keeps track of positions for error messages.
pub(crate) struct Pull<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
}

/// An owned event: only what the dialects need.
#[derive(Debug)]
pub(crate) enum Ev {
    Start(String, Vec<(String, String)>),
    Empty(String, Vec<(String, String)>),
    End(String),
    Text(String),
    Eof,
}

impl<R: BufRead> Pull<R> {
    pub fn new(r: R) -> Self {
        let mut reader = Reader::from_reader(r);
        let c = reader.config_mut();
        c.trim_text(false);
        c.expand_empty_elements = false;
        c.check_end_names = true;
        Pull { reader, buf: Vec::with_capacity(4096) }
    }

    pub fn offset(&self) -> u64 {
        self.reader.buffer_position()
    }

    pub fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.offset(), message: message.into() })
    }

    fn syntax(&self, e: impl std::fmt::Display) -> Error {
        Error::Syntax { offset: self.reader.error_position(), message: e.to_string() }
    }

    fn attrs(&self, e: &BytesStart<'_>) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for a in e.attributes() {
            let a = a.map_err(|e| self.syntax(e))?;
            let key = std::str::from_utf8(a.key.as_ref()).map_err(|e| self.syntax(e))?.to_owned();
            let value = a.unescape_value().map_err(|e| self.syntax(e))?.into_owned();
            out.push((key, value));
        }
        Ok(out)
    }

    fn name(&self, e: &BytesStart<'_>) -> Result<String> {
        Ok(std::str::from_utf8(e.name().as_ref()).map_err(|e| self.syntax(e))?.to_owned())
    }

    /// Next event of interest; declarations, comments, processing
    /// instructions and doctypes are skipped.
    pub fn next(&mut self) -> Result<Ev> {
        loop {
            self.buf.clear();
            let ev = self.reader.read_event_into(&mut self.buf).map_err(|e| Error::Syntax {
                offset: self.reader.error_position(),
                message: e.to_string(),
            })?;
            let out = match ev {
                Event::Start(e) => {
                    let e = e.into_owned();
                    Ev::Start(self.name(&e)?, self.attrs(&e)?)
                }
                Event::Empty(e) => {
                    let e = e.into_owned();
                    Ev::Empty(self.name(&e)?, self.attrs(&e)?)
                }
                Event::End(e) => Ev::End(
                    std::str::from_utf8(e.name().as_ref())
                        .map_err(|e| Error::Syntax { offset: self.reader.error_position(), message: e.to_string() })?
                        .to_owned(),
                ),
                Event::Text(t) => {
                    let t = t.into_owned();
                    Ev::Text(t.unescape().map_err(|e| self.syntax(e))?.into_owned())
                }
                Event::CData(t) => Ev::Text(
                    std::str::from_utf8(&t)
                        .map_err(|e| Error::Syntax { offset: self.reader.error_position(), message: e.to_string() })?
                        .to_owned(),
                ),
                Event::Eof => Ev::Eof,
                Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => continue,
            };
            return Ok(out);
        }
    }

    /// Next structural event: whitespace-only text is skipped, other text is
    /// an error.
    pub fn next_tag(&mut self) -> Result<Ev> {
        loop {
            match self.next()? {
                Ev::Text(t) if t.trim().is_empty() => continue,
                Ev::Text(t) => return self.err(format!("unexpected text {:?}", truncate(&t))),
                ev => return Ok(ev),
            }
        }
    }

    /// Text content up to the end tag `name`; nested elements are errors.
    pub fn text_until(&mut self, name: &str) -> Result<String> {
        let mut out = String::new();
        loop {
            match self.next()? {
                Ev::Text(t) => out.push_str(&t),
                Ev::End(n) if n == name => return Ok(out),
                Ev::Eof => return self.err(format!("unexpected end of input inside <{name}>")),
                ev => return self.err(format!("unexpected {} inside <{name}>", describe(&ev))),
            }
        }
    }

    /// Skips trailing whitespace, requiring end of input.
    pub fn finish(&mut self) -> Result<()> {
        match self.next_tag()? {
            Ev::Eof => Ok(()),
            ev => self.err(format!("unexpected {} after the root element", describe(&ev))),
        }
    }
}

pub(crate) fn describe(ev: &Ev) -> String {
    match ev {
        Ev::Start(n, _) | Ev::Empty(n, _) => format!("element <{n}>"),
        Ev::End(n) => format!("end tag </{n}>"),
        Ev::Text(t) => format!("text {:?}", truncate(t)),
        Ev::Eof => "end of input".into(),
    }
}

fn truncate(s: &str) -> String {
    s.chars().take(40).collect()
}

/// Attribute lookup with uniform error messages.
pub(crate) struct Attrs<'a> {
    pub element: &'a str,
    pub list: &'a [(String, String)],
}

impl<'a> Attrs<'a> {
    pub fn new(element: &'a str, list: &'a [(String, String)]) -> Self {
        Attrs { element, list }
    }

    pub fn get(&self, key: &str) -> Option<&'a str> {
        self.list.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require<R: BufRead>(&self, p: &Pull<R>, key: &str) -> Result<&'a str> {
        match self.get(key) {
            Some(v) => Ok(v),
            None => p.err(format!("<{}> lacks attribute `{key}`", self.element)),
        }
    }

    pub fn parse<R: BufRead, T: std::str::FromStr>(&self, p: &Pull<R>, key: &str) -> Result<T> {
        let v = self.require(p, key)?;
        match v.parse() {
            Ok(x) => Ok(x),
            Err(_) => p.err(format!("<{}> has invalid `{key}` value {v:?}", self.element)),
        }
    }

    /// Rejects attributes outside `allowed`.
    pub fn only<R: BufRead>(&self, p: &Pull<R>, allowed: &[&str]) -> Result<()> {
        match self.list.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => p.err(format!("<{}> has unknown attribute `{k}`", self.element)),
            None => Ok(()),
        }
    }
}
