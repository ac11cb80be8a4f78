//! The canonical snapshot file format.
//!
//! ```xml
//! <snapshot date="2017-01-01" version="1">
//!   <document pkey="doc1" year="1999">
//!     <title>The Ultrasonic Navigating.</title>
//!     <venue key="v1">Journal of Data</venue>
//!     <author>B. Doe</author>
//!     <editor>C. Roe</editor>
//!     <link>https://doi.org/10.5555/1</link>
//!   </document>
//!   <profile authorid="p1">
//!     <signature pkey="doc1" pos="0" surface="B. Doe"/>
//!     <signature pkey="doc1" pos="0" surface="C. Roe" role="editor"/>
//!   </profile>
//! </snapshot>
//! ```
//!
//! Documents precede profiles. Author and editor positions are numbered
//! independently. Input may be gzip-compressed.

use std::fs::File;
use std::io::{BufRead, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use corrhist_core::{Date, DocumentRecord, History, MentionKey, Profile, ProfileId, Role, Snapshot, SnapshotBuilder, VenueKey};

use crate::error::{Error, Result};
use crate::xml::{decode, describe, esc, Attrs, Ev, Pull, DECL};

pub const FORMAT_VERSION: u32 = 1;

/// One signature as read, before interning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSignature {
    pub pkey: String,
    pub pos: u32,
    pub role: Role,
    pub surface: String,
}

/// One top-level record of a snapshot file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Document { record: DocumentRecord, venue: Option<(String, String)> },
    Profile { id: String, signatures: Vec<RawSignature> },
}

/// Streams the records of one snapshot file. Holds one record at a time.
pub struct SnapshotReader<R: BufRead> {
    pull: Pull<R>,
    date: Date,
    version: u32,
    done: bool,
}

impl<'a> SnapshotReader<Box<dyn BufRead + 'a>> {
    /// Reader over plain or gzip-compressed bytes.
    pub fn open<S: Read + 'a>(input: S) -> Result<Self> {
        SnapshotReader::new(decode(input)?)
    }
}

impl<R: BufRead> SnapshotReader<R> {
    /// Reads up to and including the root element's start tag.
    pub fn new(input: R) -> Result<Self> {
        let mut pull = Pull::new(input);
        let (attrs, empty) = match pull.next_tag()? {
            Ev::Start(n, a) if n == "snapshot" => (a, false),
            Ev::Empty(n, a) if n == "snapshot" => (a, true),
            ev => return pull.err(format!("expected <snapshot>, found {}", describe(&ev))),
        };
        let a = Attrs::new("snapshot", &attrs);
        a.only(&pull, &["date", "version"])?;
        let date: Date = a.parse(&pull, "date")?;
        let version = match a.get("version") {
            Some(_) => a.parse(&pull, "version")?,
            None => FORMAT_VERSION,
        };
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        if empty {
            pull.finish()?;
        }
        Ok(SnapshotReader { pull, date, version, done: empty })
    }

    pub fn date(&self) -> Date {
        self.date
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    /// Byte offset of the parser in the (decompressed) input.
    pub fn offset(&self) -> u64 {
        self.pull.offset()
    }

    pub fn next_record(&mut self) -> Result<Option<Record>> {
        if self.done {
            return Ok(None);
        }
        match self.pull.next_tag()? {
            Ev::End(n) if n == "snapshot" => {
                self.pull.finish()?;
                self.done = true;
                Ok(None)
            }
            Ev::Start(n, a) if n == "document" => self.document(&a, false).map(Some),
            Ev::Empty(n, a) if n == "document" => self.document(&a, true).map(Some),
            Ev::Start(n, a) if n == "profile" => self.profile(&a, false).map(Some),
            Ev::Empty(n, a) if n == "profile" => self.profile(&a, true).map(Some),
            Ev::Eof => self.pull.err("unexpected end of input: <snapshot> not closed"),
            ev => self.pull.err(format!("unexpected {} in <snapshot>", describe(&ev))),
        }
    }

    fn document(&mut self, attrs: &[(String, String)], empty: bool) -> Result<Record> {
        let p = &self.pull;
        let a = Attrs::new("document", attrs);
        a.only(p, &["pkey", "year"])?;
        let pkey = a.require(p, "pkey")?;
        let year: i32 = a.parse(p, "year")?;
        let mut d = DocumentRecord::new(pkey, String::new(), year);
        let mut venue = None;
        let mut seen_title = false;
        if !empty {
            loop {
                let (name, attrs, leaf_empty) = match self.pull.next_tag()? {
                    Ev::End(n) if n == "document" => break,
                    Ev::Start(n, a) => (n, a, false),
                    Ev::Empty(n, a) => (n, a, true),
                    ev => return self.pull.err(format!("unexpected {} in <document>", describe(&ev))),
                };
                let text = if leaf_empty { String::new() } else { self.pull.text_until(&name)? };
                let p = &self.pull;
                let a = Attrs::new(&name, &attrs);
                match name.as_str() {
                    "title" if !seen_title => {
                        a.only(p, &[])?;
                        d.title = text;
                        seen_title = true;
                    }
                    "venue" if venue.is_none() => {
                        a.only(p, &["key"])?;
                        venue = Some((a.require(p, "key")?.to_owned(), text));
                    }
                    "author" | "editor" => {
                        a.only(p, &[])?;
                        let role = if name == "author" { Role::Author } else { Role::Editor };
                        match role {
                            Role::Author => d.authors.push(Arc::from(text)),
                            Role::Editor => d.editors.push(Arc::from(text)),
                        }
                    }
                    "link" if d.link.is_none() => {
                        a.only(p, &[])?;
                        d.link = Some(text);
                    }
                    _ => return p.err(format!("unexpected or repeated <{name}> in <document>")),
                }
            }
        }
        d.venue = venue.as_ref().map(|(k, _)| VenueKey::from(k.as_str()));
        Ok(Record::Document { record: d, venue })
    }

    fn profile(&mut self, attrs: &[(String, String)], empty: bool) -> Result<Record> {
        let a = Attrs::new("profile", attrs);
        a.only(&self.pull, &["authorid"])?;
        let id = a.require(&self.pull, "authorid")?.to_owned();
        let mut signatures = Vec::new();
        if !empty {
            loop {
                let (attrs, leaf_empty) = match self.pull.next_tag()? {
                    Ev::End(n) if n == "profile" => break,
                    Ev::Empty(n, a) if n == "signature" => (a, true),
                    Ev::Start(n, a) if n == "signature" => (a, false),
                    ev => return self.pull.err(format!("unexpected {} in <profile>", describe(&ev))),
                };
                if !leaf_empty {
                    let rest = self.pull.text_until("signature")?;
                    if !rest.trim().is_empty() {
                        return self.pull.err("<signature> must be empty");
                    }
                }
                let p = &self.pull;
                let a = Attrs::new("signature", &attrs);
                a.only(p, &["pkey", "pos", "surface", "role"])?;
                let role = match a.get("role") {
                    None => Role::Author,
                    Some(r) => match Role::parse(r) {
                        Some(r) => r,
                        None => return p.err(format!("unknown role {r:?}")),
                    },
                };
                signatures.push(RawSignature {
                    pkey: a.require(p, "pkey")?.to_owned(),
                    pos: a.parse(p, "pos")?,
                    role,
                    surface: a.require(p, "surface")?.to_owned(),
                });
            }
        }
        Ok(Record::Profile { id, signatures })
    }
}

impl<R: BufRead> Iterator for SnapshotReader<R> {
    type Item = Result<Record>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.next_record() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => None,
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Parses a whole snapshot (plain or gzip).
pub fn parse_snapshot<R: Read>(input: R) -> Result<Snapshot> {
    parse_snapshot_with_base(input, None)
}

/// As [`parse_snapshot`], sharing every record that is unchanged relative
/// to `base` (typically the previous snapshot of a history).
pub fn parse_snapshot_with_base<R: Read>(input: R, base: Option<&Snapshot>) -> Result<Snapshot> {
    let mut rd = SnapshotReader::open(input)?;
    let mut b = match base {
        Some(s) => SnapshotBuilder::with_base(rd.date(), s),
        None => SnapshotBuilder::new(rd.date()),
    };
    let mut in_profiles = false;
    while let Some(rec) = rd.next_record()? {
        match rec {
            Record::Document { record, venue } => {
                if in_profiles {
                    return Err(Error::Syntax { offset: rd.offset(), message: "<document> after <profile>".into() });
                }
                if let Some((k, n)) = venue {
                    b.add_venue(VenueKey::from(k.as_str()), &n)?;
                }
                b.add_document(record)?;
            }
            Record::Profile { id, signatures } => {
                in_profiles = true;
                let mut p = Profile::new(ProfileId::from(id.as_str()));
                for s in signatures {
                    let key = MentionKey::new(b.document_key(&s.pkey), s.pos, s.role);
                    let surface = b.surface(&key, &s.surface);
                    p.add(key, surface)?;
                }
                b.add_profile(p)?;
            }
        }
    }
    Ok(b.build()?)
}

/// Writes `s` in canonical form: documents by key, then profiles by id with
/// signatures in mention-key order.
pub fn write_snapshot<W: Write>(s: &Snapshot, out: W) -> std::io::Result<()> {
    let mut w = BufWriter::with_capacity(64 * 1024, out);
    w.write_all(DECL.as_bytes())?;
    write!(w, "<snapshot date=\"{}\" version=\"{}\"", s.date(), FORMAT_VERSION)?;
    if s.document_count() == 0 && s.profile_count() == 0 {
        w.write_all(b"/>\n")?;
        return w.flush();
    }
    w.write_all(b">\n")?;
    for d in s.documents() {
        writeln!(w, "  <document pkey=\"{}\" year=\"{}\">", esc(&d.key), d.year)?;
        writeln!(w, "    <title>{}</title>", esc(&d.title))?;
        if let Some(v) = &d.venue {
            let name = s.venue_name(v).unwrap_or_default();
            writeln!(w, "    <venue key=\"{}\">{}</venue>", esc(v), esc(name))?;
        }
        for a in &d.authors {
            writeln!(w, "    <author>{}</author>", esc(a))?;
        }
        for e in &d.editors {
            writeln!(w, "    <editor>{}</editor>", esc(e))?;
        }
        if let Some(l) = &d.link {
            writeln!(w, "    <link>{}</link>", esc(l))?;
        }
        w.write_all(b"  </document>\n")?;
    }
    for p in s.profiles() {
        if p.is_empty() {
            writeln!(w, "  <profile authorid=\"{}\"/>", esc(p.id()))?;
            continue;
        }
        writeln!(w, "  <profile authorid=\"{}\">", esc(p.id()))?;
        for (k, surface) in p.iter() {
            write!(w, "    <signature pkey=\"{}\" pos=\"{}\" surface=\"{}\"", esc(&k.document), k.position, esc(surface))?;
            if k.role == Role::Editor {
                w.write_all(b" role=\"editor\"")?;
            }
            w.write_all(b"/>\n")?;
        }
        w.write_all(b"  </profile>\n")?;
    }
    w.write_all(b"</snapshot>\n")?;
    w.flush()
}

/// Canonical bytes of a snapshot.
pub fn snapshot_bytes(s: &Snapshot) -> Vec<u8> {
    let mut v = Vec::new();
    write_snapshot(s, &mut v).expect("writing to memory");
    v
}

/// A snapshot file with what its name or caller declares about it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotFile {
    pub path: PathBuf,
    /// Checked against the header date when set.
    pub date: Option<Date>,
    /// Checked against the header version when set.
    pub version: Option<u32>,
}

impl SnapshotFile {
    /// Declares the date from a `YYYY-MM-DD` file stem, if present.
    pub fn new(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let date = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.split('.').next())
            .and_then(|stem| stem.parse().ok());
        SnapshotFile { path, date, version: None }
    }

    pub fn with_date(mut self, date: Date) -> Self {
        self.date = Some(date);
        self
    }

    fn load(&self, base: Option<&Snapshot>) -> Result<Snapshot> {
        let run = || -> Result<Snapshot> {
            let f = File::open(&self.path)?;
            let s = parse_snapshot_with_base(f, base)?;
            if let Some(v) = self.version {
                if v != FORMAT_VERSION {
                    return Err(Error::UnsupportedVersion(v));
                }
            }
            if let Some(declared) = self.date {
                if declared != s.date() {
                    return Err(Error::DateMismatch { declared, header: s.date() });
                }
            }
            Ok(s)
        };
        run().map_err(|e| e.in_file(&self.path))
    }
}

/// `*.xml` and `*.xml.gz` files of a directory, in file name order.
pub fn snapshot_files(dir: &Path) -> Result<Vec<SnapshotFile>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::from(e).in_file(dir))? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if path.is_file() && (name.ends_with(".xml") || name.ends_with(".xml.gz")) {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Error::NoSnapshots(dir.to_path_buf()));
    }
    Ok(paths.into_iter().map(SnapshotFile::new).collect())
}

/// Loads files in the given order. Each snapshot shares unchanged records
/// with its predecessor, so a history costs memory mostly for its changes.
pub fn load_history(files: &[SnapshotFile]) -> Result<History> {
    load_history_with(files, |_, _| {})
}

/// As [`load_history`], calling `progress(i, snapshot)` after each file.
pub fn load_history_with(files: &[SnapshotFile], mut progress: impl FnMut(usize, &Snapshot)) -> Result<History> {
    if files.is_empty() {
        return Err(corrhist_core::Error::TooFewSnapshots(1).into());
    }
    let mut snapshots: Vec<Snapshot> = Vec::with_capacity(files.len());
    for (i, f) in files.iter().enumerate() {
        let s = f.load(snapshots.last())?;
        if let Some(prev) = snapshots.last() {
            if prev.date() >= s.date() {
                return Err(Error::NonMonotone {
                    first: (prev.date(), files[i - 1].path.clone()),
                    second: (s.date(), f.path.clone()),
                });
            }
        }
        progress(i, &s);
        snapshots.push(s);
    }
    Ok(History::new(snapshots)?)
}

/// Loads every snapshot file of a directory.
pub fn load_history_dir(dir: &Path) -> Result<History> {
    load_history(&snapshot_files(dir)?)
}

/// Writes each snapshot as `<date>.xml` (or `.xml.gz`) into `dir`.
pub fn write_history(history: &History, dir: &Path, gzip: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;
    let mut out = Vec::new();
    for s in history.snapshots() {
        let path = dir.join(format!("{}.xml{}", s.date(), if gzip { ".gz" } else { "" }));
        let write = || -> std::io::Result<()> {
            let f = File::create(&path)?;
            if gzip {
                let mut enc = flate2::write::GzEncoder::new(f, flate2::Compression::default());
                write_snapshot(s, &mut enc)?;
                enc.finish()?.sync_all()
            } else {
                write_snapshot(s, f)
            }
        };
        write().map_err(|e| Error::from(e).in_file(&path))?;
        out.push(path);
    }
    Ok(out)
}
