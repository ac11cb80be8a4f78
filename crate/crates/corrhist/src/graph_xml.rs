//! Case-graph XML.
//!
//! ```xml
//! <graph>
//!   <node label="DOCUMENT" id="doc1">
//!     <property key="year" value="1999"/>
//!     <property key="title" value="The Ultrasonic Navigating."/>
//!   </node>
//!   <node label="PERSON" id="p1" primary="true"/>
//!   <edge type="Created" from="p1" to="doc1"/>
//! </graph>
//! ```

use std::io::{BufRead, Read, Write};

use corrhist_core::{CaseGraph, Edge, EdgeType, Node, NodeLabel};

use crate::error::{Error, Result};
use crate::xml::{decode, describe, esc, Attrs, Ev, Pull, DECL};

pub fn write_case_graph<W: Write>(g: &CaseGraph, mut w: W) -> std::io::Result<()> {
    w.write_all(DECL.as_bytes())?;
    w.write_all(b"<graph>\n")?;
    for n in g.nodes() {
        write!(w, "  <node label=\"{}\" id=\"{}\"", n.label.as_str(), esc(&n.id))?;
        if g.is_primary(&n.id) {
            w.write_all(b" primary=\"true\"")?;
        }
        if n.properties.is_empty() {
            w.write_all(b"/>\n")?;
            continue;
        }
        w.write_all(b">\n")?;
        for (k, v) in &n.properties {
            writeln!(w, "    <property key=\"{}\" value=\"{}\"/>", esc(k), esc(v))?;
        }
        w.write_all(b"  </node>\n")?;
    }
    for e in g.edges() {
        write!(w, "  <edge type=\"{}\" from=\"{}\" to=\"{}\"", e.kind.as_str(), esc(&e.from), esc(&e.to))?;
        if let Some(x) = e.weight {
            write!(w, " weight=\"{x}\"")?;
        }
        w.write_all(b"/>\n")?;
    }
    w.write_all(b"</graph>\n")
}

/// Serialized bytes; nodes by (label, id), edges by (type, from, to).
pub fn serialize_case_graph(g: &CaseGraph) -> Vec<u8> {
    let mut v = Vec::new();
    write_case_graph(g, &mut v).expect("writing to memory");
    v
}

pub fn parse_case_graph<R: Read>(input: R) -> Result<CaseGraph> {
    let mut p = Pull::new(decode(input)?);
    let empty = match p.next_tag()? {
        Ev::Start(n, a) if n == "graph" => {
            Attrs::new("graph", &a).only(&p, &[])?;
            false
        }
        Ev::Empty(n, a) if n == "graph" => {
            Attrs::new("graph", &a).only(&p, &[])?;
            true
        }
        ev => return p.err(format!("expected <graph>, found {}", describe(&ev))),
    };
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut primary = Vec::new();
    if !empty {
        loop {
            match p.next_tag()? {
                Ev::End(n) if n == "graph" => break,
                Ev::Start(n, a) if n == "node" => nodes.push(node(&mut p, &a, false, &mut primary)?),
                Ev::Empty(n, a) if n == "node" => nodes.push(node(&mut p, &a, true, &mut primary)?),
                Ev::Empty(n, a) if n == "edge" => edges.push(edge(&p, &a)?),
                Ev::Start(n, a) if n == "edge" => {
                    let e = edge(&p, &a)?;
                    if !p.text_until("edge")?.trim().is_empty() {
                        return p.err("<edge> must be empty");
                    }
                    edges.push(e);
                }
                Ev::Eof => return p.err("unexpected end of input: <graph> not closed"),
                ev => return p.err(format!("unexpected {} in <graph>", describe(&ev))),
            }
        }
    }
    p.finish()?;
    let offset = p.offset();
    CaseGraph::new(nodes, edges, primary).map_err(|e| Error::Syntax { offset, message: e.to_string() })
}

fn node<R: BufRead>(p: &mut Pull<R>, attrs: &[(String, String)], empty: bool, primary: &mut Vec<String>) -> Result<Node> {
    let a = Attrs::new("node", attrs);
    a.only(p, &["label", "id", "primary"])?;
    let label = a.require(p, "label")?;
    let Some(label) = NodeLabel::parse(label) else {
        return p.err(format!("unknown node label {label:?}"));
    };
    let mut n = Node::new(label, a.require(p, "id")?);
    match a.get("primary") {
        None | Some("false") => {}
        Some("true") => primary.push(n.id.clone()),
        Some(v) => return p.err(format!("invalid primary flag {v:?}")),
    }
    if !empty {
        loop {
            let (attrs, leaf_empty) = match p.next_tag()? {
                Ev::End(x) if x == "node" => break,
                Ev::Empty(x, a) if x == "property" => (a, true),
                Ev::Start(x, a) if x == "property" => (a, false),
                ev => return p.err(format!("unexpected {} in <node>", describe(&ev))),
            };
            if !leaf_empty && !p.text_until("property")?.trim().is_empty() {
                return p.err("<property> must be empty");
            }
            let a = Attrs::new("property", &attrs);
            a.only(p, &["key", "value"])?;
            n.properties.push((a.require(p, "key")?.to_owned(), a.require(p, "value")?.to_owned()));
        }
    }
    Ok(n)
}

fn edge<R: BufRead>(p: &Pull<R>, attrs: &[(String, String)]) -> Result<Edge> {
    let a = Attrs::new("edge", attrs);
    a.only(p, &["type", "from", "to", "weight"])?;
    let t = a.require(p, "type")?;
    let Some(kind) = EdgeType::parse(t) else {
        return p.err(format!("unknown edge type {t:?}"));
    };
    let weight = match a.get("weight") {
        None => None,
        Some(_) => {
            let w: u32 = a.parse(p, "weight")?;
            if w == 0 {
                return p.err("edge weights must be positive");
            }
            Some(w)
        }
    };
    Ok(Edge { kind, from: a.require(p, "from")?.to_owned(), to: a.require(p, "to")?.to_owned(), weight })
}
