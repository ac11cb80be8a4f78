//! Annotation XML of the embedded collection.
//!
//! ```xml
//! <annotations t1="2017-01-01" t2="2018-01-01">
//!   <case id="split-2017-01-01-0" kind="split" coalesced="possible">
//!     <source>
//!       <profile authorid="p1">
//!         <signature pkey="doc1" pos="1" surface="B. Doe"/>
//!       </profile>
//!     </source>
//!     <target>
//!       ...
//!     </target>
//!   </case>
//! </annotations>
//! ```
//!
//! Every case carries `coalesced="possible"`: between far-apart
//! observations several corrections may appear as one.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use corrhist_core::{
    AnnotatedSignature, AnnotationSet, CorrectionKind, Date, EmbeddedAnnotation, MentionKey, ProfileId, Role, Signature,
};

use crate::error::Result;
use crate::xml::{decode, describe, esc, Attrs, Ev, Pull, DECL};

type Side = BTreeMap<ProfileId, Vec<AnnotatedSignature>>;

fn write_side<W: Write>(w: &mut W, name: &str, side: &Side, indent: &str) -> std::io::Result<()> {
    writeln!(w, "{indent}<{name}>")?;
    for (id, sigs) in side {
        writeln!(w, "{indent}  <profile authorid=\"{}\">", esc(id))?;
        for s in sigs {
            let k = &s.signature.key;
            write!(
                w,
                "{indent}    <signature pkey=\"{}\" pos=\"{}\" surface=\"{}\"",
                esc(&k.document),
                k.position,
                esc(&s.signature.surface)
            )?;
            if k.role == Role::Editor {
                w.write_all(b" role=\"editor\"")?;
            }
            if s.new {
                w.write_all(b" new=\"true\"")?;
            }
            w.write_all(b"/>\n")?;
        }
        writeln!(w, "{indent}  </profile>")?;
    }
    writeln!(w, "{indent}</{name}>")
}

/// One `<case>` element.
pub fn write_annotation<W: Write>(a: &EmbeddedAnnotation, mut w: W) -> std::io::Result<()> {
    writeln!(w, "  <case id=\"{}\" kind=\"{}\" coalesced=\"possible\">", esc(&a.case_id), a.kind)?;
    write_side(&mut w, "source", &a.source, "    ")?;
    write_side(&mut w, "target", &a.target, "    ")?;
    w.write_all(b"  </case>\n")
}

pub fn serialize_annotation(a: &EmbeddedAnnotation) -> Vec<u8> {
    let mut v = Vec::new();
    write_annotation(a, &mut v).expect("writing to memory");
    v
}

pub fn write_annotation_set<W: Write>(set: &AnnotationSet, mut w: W) -> std::io::Result<()> {
    w.write_all(DECL.as_bytes())?;
    writeln!(w, "<annotations t1=\"{}\" t2=\"{}\">", set.t1, set.t2)?;
    for a in &set.annotations {
        write_annotation(a, &mut w)?;
    }
    w.write_all(b"</annotations>\n")
}

pub fn serialize_annotation_set(set: &AnnotationSet) -> Vec<u8> {
    let mut v = Vec::new();
    write_annotation_set(set, &mut v).expect("writing to memory");
    v
}

pub fn parse_annotation_set<R: Read>(input: R) -> Result<AnnotationSet> {
    let mut p = Pull::new(decode(input)?);
    let (attrs, empty) = match p.next_tag()? {
        Ev::Start(n, a) if n == "annotations" => (a, false),
        Ev::Empty(n, a) if n == "annotations" => (a, true),
        ev => return p.err(format!("expected <annotations>, found {}", describe(&ev))),
    };
    let a = Attrs::new("annotations", &attrs);
    a.only(&p, &["t1", "t2"])?;
    let t1: Date = a.parse(&p, "t1")?;
    let t2: Date = a.parse(&p, "t2")?;
    let mut annotations = Vec::new();
    if !empty {
        loop {
            match p.next_tag()? {
                Ev::End(n) if n == "annotations" => break,
                Ev::Start(n, a) if n == "case" => annotations.push(case(&mut p, &a)?),
                Ev::Eof => return p.err("unexpected end of input: <annotations> not closed"),
                ev => return p.err(format!("unexpected {} in <annotations>", describe(&ev))),
            }
        }
    }
    p.finish()?;
    Ok(AnnotationSet { t1, t2, annotations })
}

/// Parses a single `<case>` element as written by [`write_annotation`].
pub fn parse_annotation<R: Read>(input: R) -> Result<EmbeddedAnnotation> {
    let mut p = Pull::new(decode(input)?);
    let a = match p.next_tag()? {
        Ev::Start(n, a) if n == "case" => case(&mut p, &a)?,
        ev => return p.err(format!("expected <case>, found {}", describe(&ev))),
    };
    p.finish()?;
    Ok(a)
}

fn case<R: BufRead>(p: &mut Pull<R>, attrs: &[(String, String)]) -> Result<EmbeddedAnnotation> {
    let a = Attrs::new("case", attrs);
    a.only(p, &["id", "kind", "coalesced"])?;
    let case_id = a.require(p, "id")?.to_owned();
    let k = a.require(p, "kind")?;
    let Some(kind) = CorrectionKind::parse(k) else {
        return p.err(format!("unknown correction kind {k:?}"));
    };
    let mut source = None;
    let mut target = None;
    loop {
        match p.next_tag()? {
            Ev::End(n) if n == "case" => break,
            Ev::Start(n, _) if n == "source" && source.is_none() => source = Some(side(p, "source")?),
            Ev::Start(n, _) if n == "target" && target.is_none() => target = Some(side(p, "target")?),
            Ev::Empty(n, _) if n == "source" && source.is_none() => source = Some(Side::new()),
            Ev::Empty(n, _) if n == "target" && target.is_none() => target = Some(Side::new()),
            ev => return p.err(format!("unexpected {} in <case>", describe(&ev))),
        }
    }
    let (Some(source), Some(target)) = (source, target) else {
        return p.err(format!("case `{case_id}` lacks <source> or <target>"));
    };
    Ok(EmbeddedAnnotation { case_id, kind, source, target })
}

fn side<R: BufRead>(p: &mut Pull<R>, name: &str) -> Result<Side> {
    let mut out = Side::new();
    loop {
        let (attrs, empty) = match p.next_tag()? {
            Ev::End(n) if n == name => break,
            Ev::Start(n, a) if n == "profile" => (a, false),
            Ev::Empty(n, a) if n == "profile" => (a, true),
            ev => return p.err(format!("unexpected {} in <{name}>", describe(&ev))),
        };
        let a = Attrs::new("profile", &attrs);
        a.only(p, &["authorid"])?;
        let id = ProfileId::from(a.require(p, "authorid")?);
        let mut sigs = Vec::new();
        if !empty {
            loop {
                let (attrs, leaf_empty) = match p.next_tag()? {
                    Ev::End(n) if n == "profile" => break,
                    Ev::Empty(n, a) if n == "signature" => (a, true),
                    Ev::Start(n, a) if n == "signature" => (a, false),
                    ev => return p.err(format!("unexpected {} in <profile>", describe(&ev))),
                };
                if !leaf_empty && !p.text_until("signature")?.trim().is_empty() {
                    return p.err("<signature> must be empty");
                }
                let a = Attrs::new("signature", &attrs);
                a.only(p, &["pkey", "pos", "surface", "role", "new"])?;
                let role = match a.get("role") {
                    None => Role::Author,
                    Some(r) => match Role::parse(r) {
                        Some(r) => r,
                        None => return p.err(format!("unknown role {r:?}")),
                    },
                };
                let new = match a.get("new") {
                    None | Some("false") => false,
                    Some("true") => true,
                    Some(v) => return p.err(format!("invalid new flag {v:?}")),
                };
                let key = MentionKey::new(a.require(p, "pkey")?, a.parse(p, "pos")?, role);
                sigs.push(AnnotatedSignature { signature: Signature::new(key, a.require(p, "surface")?), new });
            }
        }
        if out.insert(id.clone(), sigs).is_some() {
            return p.err(format!("profile `{id}` repeated in <{name}>"));
        }
    }
    Ok(out)
}
