//! Before/after context graphs of single corrections.
//!
//! A graph holds the corrected (primary) profiles, every document they hold
//! a mention on, every other profile holding a mention on one of those
//! documents, and the venues of those documents. Relations among the
//! non-primary persons are kept as long as they are witnessed by an
//! included document; nothing further than one hop is added.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::chain::CorrectionCase;
use crate::error::Error;
use crate::model::{DocKey, History, MentionKey, Profile, ProfileId, Role, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeLabel {
    Document,
    Person,
    Venue,
}

impl NodeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeLabel::Document => "DOCUMENT",
            NodeLabel::Person => "PERSON",
            NodeLabel::Venue => "VENUE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "DOCUMENT" => Some(NodeLabel::Document),
            "PERSON" => Some(NodeLabel::Person),
            "VENUE" => Some(NodeLabel::Venue),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeType {
    Created,
    Contributed,
    CoCreated,
    CoContributed,
    CreatedAt,
    ContributedAt,
}

impl EdgeType {
    pub const ALL: [EdgeType; 6] = [
        EdgeType::Created,
        EdgeType::Contributed,
        EdgeType::CoCreated,
        EdgeType::CoContributed,
        EdgeType::CreatedAt,
        EdgeType::ContributedAt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeType::Created => "Created",
            EdgeType::Contributed => "Contributed",
            EdgeType::CoCreated => "CoCreated",
            EdgeType::CoContributed => "CoContributed",
            EdgeType::CreatedAt => "CreatedAt",
            EdgeType::ContributedAt => "ContributedAt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        EdgeType::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// Labels of (from, to).
    pub fn endpoints(self) -> (NodeLabel, NodeLabel) {
        match self {
            EdgeType::Created | EdgeType::Contributed => (NodeLabel::Person, NodeLabel::Document),
            EdgeType::CoCreated | EdgeType::CoContributed => (NodeLabel::Person, NodeLabel::Person),
            EdgeType::CreatedAt | EdgeType::ContributedAt => (NodeLabel::Person, NodeLabel::Venue),
        }
    }

    pub fn is_weighted(self) -> bool {
        !matches!(self, EdgeType::Created | EdgeType::Contributed)
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, EdgeType::CoCreated | EdgeType::CoContributed)
    }

    fn for_role(role: Role, created: EdgeType, contributed: EdgeType) -> EdgeType {
        match role {
            Role::Author => created,
            Role::Editor => contributed,
        }
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub label: NodeLabel,
    pub id: String,
    pub properties: Vec<(String, String)>,
}

impl Node {
    pub fn new(label: NodeLabel, id: impl Into<String>) -> Self {
        Node { label, id: id.into(), properties: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.properties.push((key.into(), value.into()));
        self
    }

    pub fn property(&self, key: &str) -> Option<&str> {
        self.properties.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub kind: EdgeType,
    pub from: String,
    pub to: String,
    pub weight: Option<u32>,
}

/// A validated context graph. Nodes are kept in (label, id) order and edges
/// in (type, from, to) order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CaseGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    primary: BTreeSet<String>,
}

impl CaseGraph {
    pub fn new(
        mut nodes: Vec<Node>,
        mut edges: Vec<Edge>,
        primary: impl IntoIterator<Item = String>,
    ) -> Result<Self, Error> {
        let primary: BTreeSet<String> = primary.into_iter().collect();
        let bad = |msg: String| Err(Error::InvalidGraph(msg));
        let mut labels: BTreeMap<&str, NodeLabel> = BTreeMap::new();
        for n in &nodes {
            if n.id.is_empty() {
                return bad("node with empty id".into());
            }
            if labels.insert(&n.id, n.label).is_some() {
                return bad(format!("duplicate node id `{}`", n.id));
            }
            let keys: BTreeSet<&str> = n.properties.iter().map(|(k, _)| k.as_str()).collect();
            if keys.len() != n.properties.len() {
                return bad(format!("repeated property key on node `{}`", n.id));
            }
        }
        for p in &primary {
            match labels.get(p.as_str()) {
                Some(NodeLabel::Person) => {}
                Some(_) => return bad(format!("primary node `{p}` is not a PERSON")),
                None => return bad(format!("primary node `{p}` does not exist")),
            }
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            let (lf, lt) = e.kind.endpoints();
            match (labels.get(e.from.as_str()), labels.get(e.to.as_str())) {
                (Some(&a), Some(&b)) if a == lf && b == lt => {}
                (None, _) | (_, None) => return bad(format!("dangling {} edge {} -> {}", e.kind, e.from, e.to)),
                _ => return bad(format!("{} edge {} -> {} joins wrong labels", e.kind, e.from, e.to)),
            }
            if e.from == e.to {
                return bad(format!("self-loop on `{}`", e.from));
            }
            if e.kind.is_symmetric() && e.from > e.to {
                return bad(format!("{} edge {} -> {} not stored in id order", e.kind, e.from, e.to));
            }
            match (e.kind.is_weighted(), e.weight) {
                (true, Some(w)) if w >= 1 => {}
                (false, None) => {}
                _ => return bad(format!("bad weight on {} edge {} -> {}", e.kind, e.from, e.to)),
            }
            if !seen.insert((e.kind, e.from.as_str(), e.to.as_str())) {
                return bad(format!("repeated {} edge {} -> {}", e.kind, e.from, e.to));
            }
        }
        nodes.sort_by(|a, b| (a.label, &a.id).cmp(&(b.label, &b.id)));
        edges.sort();
        Ok(CaseGraph { nodes, edges, primary })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn primary_ids(&self) -> &BTreeSet<String> {
        &self.primary
    }

    pub fn is_primary(&self, id: &str) -> bool {
        self.primary.contains(id)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn nodes_labelled(&self, label: NodeLabel) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.iter().filter(move |n| n.label == label)
    }

    pub fn edges_of(&self, kind: EdgeType) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn edge(&self, kind: EdgeType, from: &str, to: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.kind == kind && e.from == from && e.to == to)
    }
}

/// Owners of the name slots of a set of documents in one snapshot.
#[derive(Debug, Clone)]
pub struct OwnerIndex<'s> {
    snapshot: &'s Snapshot,
    owners: BTreeMap<&'s MentionKey, &'s ProfileId>,
    complete: bool,
}

impl<'s> OwnerIndex<'s> {
    /// Index restricted to mentions on `documents`.
    pub fn for_documents(snapshot: &'s Snapshot, documents: &BTreeSet<&str>) -> Self {
        let mut owners = BTreeMap::new();
        for p in snapshot.profiles() {
            for k in p.keys() {
                if documents.contains(k.document.as_str()) {
                    owners.insert(k, p.id());
                }
            }
        }
        OwnerIndex { snapshot, owners, complete: false }
    }

    pub fn full(snapshot: &'s Snapshot) -> Self {
        OwnerIndex { snapshot, owners: snapshot.owner_index(), complete: true }
    }

    /// Re-targets a full index to `next`, touching only profiles that
    /// differ between the two snapshots. Profiles shared between them (as
    /// in loaded and generated histories) are skipped by address; a
    /// restricted index is rebuilt in full.
    pub fn advance(&mut self, next: &'s Snapshot) {
        if !self.complete {
            *self = OwnerIndex::full(next);
            return;
        }
        let same = |a: &Profile, b: &Profile| core::ptr::eq(a, b) || a == b;
        let mut removed: Vec<&'s Profile> = Vec::new();
        let mut added: Vec<&'s Profile> = Vec::new();
        let mut old = self.snapshot.profiles().peekable();
        let mut new = next.profiles().peekable();
        loop {
            match (old.peek().copied(), new.peek().copied()) {
                (None, None) => break,
                (Some(a), Some(b)) if a.id() == b.id() => {
                    if !same(a, b) {
                        removed.push(a);
                        added.push(b);
                    }
                    old.next();
                    new.next();
                }
                (Some(a), b) if b.is_none_or(|b| a.id() < b.id()) => {
                    removed.push(a);
                    old.next();
                }
                (_, b) => {
                    added.extend(b);
                    new.next();
                }
            }
        }
        for p in removed {
            for k in p.keys() {
                if self.owners.get(k).is_some_and(|o| *o == p.id()) {
                    self.owners.remove(k);
                }
            }
        }
        for p in added {
            for k in p.keys() {
                self.owners.insert(k, p.id());
            }
        }
        self.snapshot = next;
    }

    pub fn snapshot(&self) -> &'s Snapshot {
        self.snapshot
    }

    pub fn owner(&self, key: &MentionKey) -> Option<&'s ProfileId> {
        self.owners.get(key).copied()
    }
}

/// Document keys held by the given profiles in `snapshot`.
pub fn documents_of<'a>(
    snapshot: &'a Snapshot,
    profiles: impl IntoIterator<Item = &'a ProfileId>,
) -> BTreeSet<&'a str> {
    profiles
        .into_iter()
        .filter_map(|id| snapshot.profile(id))
        .flat_map(|p| p.keys().map(|k| k.document.as_str()))
        .collect()
}

/// Graph of `primaries` as assigned in `index`'s snapshot. Weighted
/// relations only count documents that exist in `weight_basis`; document
/// properties come from `latest` when it still has the document.
pub fn build_graph(
    index: &OwnerIndex<'_>,
    primaries: &BTreeSet<ProfileId>,
    weight_basis: &Snapshot,
    latest: &Snapshot,
) -> Result<CaseGraph, Error> {
    let state = index.snapshot();
    let mut docs: BTreeSet<&DocKey> = BTreeSet::new();
    for id in primaries {
        let p = state.profile(id).ok_or_else(|| Error::UnknownProfile(id.to_string()))?;
        docs.extend(p.keys().map(|k| &k.document));
    }

    let mut nodes: Vec<Node> = Vec::new();
    let mut persons: BTreeSet<&ProfileId> = primaries.iter().collect();
    let mut venues: BTreeSet<&str> = BTreeSet::new();
    let mut membership: BTreeSet<(EdgeType, &ProfileId, &DocKey)> = BTreeSet::new();
    let mut pair_weights: BTreeMap<(EdgeType, &ProfileId, &ProfileId), u32> = BTreeMap::new();
    let mut venue_weights: BTreeMap<(EdgeType, &ProfileId, &str), u32> = BTreeMap::new();

    for &key in &docs {
        let doc = state.document(key).ok_or_else(|| Error::UnknownDocument(key.to_string()))?;
        let shown = latest.document(key).unwrap_or(doc);
        let mut node = Node::new(NodeLabel::Document, key.as_str())
            .with("year", shown.year.to_string())
            .with("title", shown.title.clone());
        if let Some(link) = &shown.link {
            node = node.with("link", link.clone());
        }
        nodes.push(node);
        if let Some(v) = &doc.venue {
            venues.insert(v.as_str());
        }
        let counted = weight_basis.document(key).is_some();
        for role in [Role::Author, Role::Editor] {
            let owners: BTreeSet<&ProfileId> = (0..doc.names(role).len())
                .filter_map(|i| index.owner(&MentionKey::new(key.clone(), i as u32, role)))
                .collect();
            for &o in &owners {
                persons.insert(o);
                membership.insert((EdgeType::for_role(role, EdgeType::Created, EdgeType::Contributed), o, key));
                if !counted {
                    continue;
                }
                if let Some(v) = &doc.venue {
                    let kind = EdgeType::for_role(role, EdgeType::CreatedAt, EdgeType::ContributedAt);
                    *venue_weights.entry((kind, o, v.as_str())).or_default() += 1;
                }
            }
            if counted {
                let kind = EdgeType::for_role(role, EdgeType::CoCreated, EdgeType::CoContributed);
                let list: Vec<&ProfileId> = owners.into_iter().collect();
                for (i, &a) in list.iter().enumerate() {
                    for &b in &list[i + 1..] {
                        *pair_weights.entry((kind, a, b)).or_default() += 1;
                    }
                }
            }
        }
    }

    for &p in &persons {
        let profile = state.profile(p).ok_or_else(|| Error::UnknownProfile(p.to_string()))?;
        let mut node = Node::new(NodeLabel::Person, p.as_str());
        if let Some(name) = profile.modal_surface() {
            node = node.with("name", name.to_string());
        }
        nodes.push(node);
    }
    for &v in &venues {
        let mut node = Node::new(NodeLabel::Venue, v);
        if let Some(name) = state.venue_name(v) {
            node = node.with("name", name);
        }
        nodes.push(node);
    }

    let mut edges: Vec<Edge> = membership
        .into_iter()
        .map(|(kind, p, d)| Edge { kind, from: p.to_string(), to: d.to_string(), weight: None })
        .collect();
    edges.extend(
        pair_weights
            .into_iter()
            .map(|((kind, a, b), w)| Edge { kind, from: a.to_string(), to: b.to_string(), weight: Some(w) }),
    );
    edges.extend(
        venue_weights
            .into_iter()
            .map(|((kind, p, v), w)| Edge { kind, from: p.to_string(), to: v.to_string(), weight: Some(w) }),
    );
    CaseGraph::new(nodes, edges, primaries.iter().map(|p| p.to_string()))
}

/// Before- and after-graphs of a correction.
///
/// The before-graph reflects the assignment at `t_before`, the after-graph
/// the assignment at `t_after`. Weights in both only count documents that
/// already existed at `t_before`; document properties are taken from the
/// latest snapshot of the history.
pub fn build_case_graphs(case: &CorrectionCase, history: &History) -> Result<(CaseGraph, CaseGraph), Error> {
    let before = history.at(case.t_before)?;
    let after = history.at(case.t_after)?;
    let sources: BTreeSet<ProfileId> = case.source_profiles.keys().cloned().collect();
    let targets: BTreeSet<ProfileId> = case.target_profiles.keys().cloned().collect();
    let before_idx = OwnerIndex::for_documents(before, &documents_of(before, &sources));
    let after_idx = OwnerIndex::for_documents(after, &documents_of(after, &targets));
    build_case_graphs_indexed(case, &before_idx, &after_idx, history.latest())
}

/// As [`build_case_graphs`], with caller-provided owner indexes for the
/// `t_before` and `t_after` snapshots. The indexes must cover the
/// documents of the case's source and target profiles respectively.
pub fn build_case_graphs_indexed(
    case: &CorrectionCase,
    before: &OwnerIndex<'_>,
    after: &OwnerIndex<'_>,
    latest: &Snapshot,
) -> Result<(CaseGraph, CaseGraph), Error> {
    let sources: BTreeSet<ProfileId> = case.source_profiles.keys().cloned().collect();
    let targets: BTreeSet<ProfileId> = case.target_profiles.keys().cloned().collect();
    let g1 = build_graph(before, &sources, before.snapshot(), latest)?;
    let g2 = build_graph(after, &targets, before.snapshot(), latest)?;
    Ok((g1, g2))
}
