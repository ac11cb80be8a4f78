//! Random instances and independent oracles shared by the integration
//! tests and the acceptance runner.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use corrhist_core::{
    AnnotatedSignature, AnnotationSet, CaseGraph, CorrectionCase, CorrectionKind, Date, DocumentRecord, Edge,
    EdgeType, EmbeddedAnnotation, GroundTruthLog, History, MentionKey, Node, NodeLabel, Profile, ProfileId, Role,
    Signature, Snapshot, SnapshotBuilder, VenueKey,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn d(s: &str) -> Date {
    s.parse().unwrap()
}

/// Text that exercises escaping: markup characters, quotes, non-ASCII and
/// inner spaces. Never empty or blank; no control characters.
pub fn text<R: Rng>(rng: &mut R, max: usize) -> String {
    const ALPHABET: &[&str] = &[
        "a", "b", "e", "k", "o", "z", "A", "Q", "0", "7", " ", "&", "<", ">", "\"", "'", ".", "-", "é", "ß", "Ж",
        "漢", "&amp;", ";",
    ];
    let n = rng.gen_range(1..=max);
    let mut s: String = (0..n).map(|_| *ALPHABET.choose(rng).unwrap()).collect();
    if s.trim().is_empty() {
        s.push('x');
    }
    s
}

/// A valid snapshot: documents with optional venue and link, author and
/// editor slots, every profile nonempty, some slots left unassigned.
pub fn random_snapshot<R: Rng>(rng: &mut R, date: Date) -> Snapshot {
    let mut b = SnapshotBuilder::new(date);
    let venues: Vec<VenueKey> = (0..rng.gen_range(0..4)).map(|i| VenueKey::from(format!("v{i}&x").as_str())).collect();
    for v in &venues {
        b.add_venue(v.clone(), &text(rng, 12)).unwrap();
    }
    let mut slots = Vec::new();
    for i in 0..rng.gen_range(0..12) {
        let mut r = DocumentRecord::new(format!("doc/{i}<").as_str(), text(rng, 20), rng.gen_range(1950..2030));
        if !venues.is_empty() && rng.gen_bool(0.6) {
            r.venue = Some(venues.choose(rng).unwrap().clone());
        }
        if rng.gen_bool(0.4) {
            r.link = Some(format!("https://doi.org/10.1/{}?a=1&b=\"2\"", i));
        }
        r.authors = (0..rng.gen_range(0..4)).map(|_| Arc::from(text(rng, 10).as_str())).collect();
        r.editors = (0..rng.gen_range(0..3)).map(|_| Arc::from(text(rng, 10).as_str())).collect();
        for k in r.mention_keys() {
            let name = r.names(k.role)[k.position as usize].clone();
            slots.push((k, name));
        }
        b.add_document(r).unwrap();
    }
    slots.shuffle(rng);
    let mut profiles: BTreeMap<String, Vec<Signature>> = BTreeMap::new();
    let n_profiles = rng.gen_range(1..6);
    for (k, name) in slots {
        if rng.gen_bool(0.15) {
            continue;
        }
        // Mostly the document's own name, sometimes a different rendering.
        let surface = if rng.gen_bool(0.8) { name.to_string() } else { text(rng, 8) };
        let id = format!("p{}{}", rng.gen_range(0..n_profiles), if rng.gen_bool(0.1) { "'" } else { "" });
        profiles.entry(id).or_default().push(Signature::new(k, surface.as_str()));
    }
    for (id, sigs) in profiles {
        b.add_profile(Profile::from_signatures(id.as_str(), sigs).unwrap()).unwrap();
    }
    b.build().unwrap()
}

/// A valid case graph with random labels, properties, primaries and edges.
pub fn random_case_graph<R: Rng>(rng: &mut R) -> CaseGraph {
    let labels = [NodeLabel::Document, NodeLabel::Person, NodeLabel::Venue];
    let mut nodes = Vec::new();
    for i in 0..rng.gen_range(0..10) {
        let mut n = Node::new(*labels.choose(rng).unwrap(), format!("n{i}{}", text(rng, 3)));
        for k in 0..rng.gen_range(0..3) {
            n = n.with(&format!("k{k}"), text(rng, 15));
        }
        nodes.push(n);
    }
    let persons: Vec<&Node> = nodes.iter().filter(|n| n.label == NodeLabel::Person).collect();
    let primary: Vec<String> = persons.iter().filter(|_| rng.gen_bool(0.4)).map(|n| n.id.clone()).collect();
    let mut edges = BTreeMap::new();
    for _ in 0..rng.gen_range(0..25) {
        let kind = *EdgeType::ALL.choose(rng).unwrap();
        let (lf, lt) = kind.endpoints();
        let from: Vec<&Node> = nodes.iter().filter(|n| n.label == lf).collect();
        let to: Vec<&Node> = nodes.iter().filter(|n| n.label == lt).collect();
        let (Some(a), Some(b)) = (from.choose(rng), to.choose(rng)) else { continue };
        let (mut a, mut b) = (a.id.clone(), b.id.clone());
        if a == b {
            continue;
        }
        if kind.is_symmetric() && a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let weight = kind.is_weighted().then(|| rng.gen_range(1..50));
        edges.insert((kind, a.clone(), b.clone()), Edge { kind, from: a, to: b, weight });
    }
    nodes.shuffle(rng);
    CaseGraph::new(nodes, edges.into_values().collect(), primary).unwrap()
}

fn random_side<R: Rng>(rng: &mut R, target: bool) -> BTreeMap<ProfileId, Vec<AnnotatedSignature>> {
    let mut side = BTreeMap::new();
    for p in 0..rng.gen_range(1..4) {
        let mut keys = BTreeSet::new();
        for _ in 0..rng.gen_range(0..5) {
            let role = if rng.gen_bool(0.2) { Role::Editor } else { Role::Author };
            keys.insert(MentionKey::new(format!("d{}&", rng.gen_range(0..9)).as_str(), rng.gen_range(0..5), role));
        }
        let sigs = keys
            .into_iter()
            .map(|k| AnnotatedSignature { signature: Signature::new(k, text(rng, 10).as_str()), new: target && rng.gen_bool(0.3) })
            .collect();
        side.insert(ProfileId::from(format!("p{p}\"").as_str()), sigs);
    }
    side
}

pub fn random_annotation_set<R: Rng>(rng: &mut R) -> AnnotationSet {
    let kinds = [CorrectionKind::Merge, CorrectionKind::Split, CorrectionKind::Distribute];
    let annotations = (0..rng.gen_range(0..5))
        .map(|i| EmbeddedAnnotation {
            case_id: format!("c{i}<{}", text(rng, 4)),
            kind: *kinds.choose(rng).unwrap(),
            source: random_side(rng, false),
            target: random_side(rng, true),
        })
        .collect();
    AnnotationSet { t1: d("2017-01-01"), t2: d("2018-06-30"), annotations }
}

/// (interval index, kind, involved profiles, moved mentions): what the
/// generator says happened, and what extraction reports.
pub type Fingerprint = (usize, CorrectionKind, BTreeSet<ProfileId>, BTreeSet<MentionKey>);

pub fn injected(log: &GroundTruthLog) -> BTreeSet<Fingerprint> {
    log.corrections()
        .map(|r| (r.interval, r.kind().correction().unwrap(), r.profiles(), r.mentions.clone()))
        .collect()
}

/// Moved mentions recomputed from the case's two profile states.
pub fn recovered(history: &History, cases: &[CorrectionCase]) -> Vec<Fingerprint> {
    let dates: Vec<Date> = history.dates().collect();
    cases
        .iter()
        .map(|c| {
            let i = dates.iter().position(|x| *x == c.t_before).unwrap();
            let mut before = BTreeMap::new();
            for p in c.source_profiles.values() {
                for k in p.keys() {
                    before.insert(k.clone(), p.id().clone());
                }
            }
            let mut moved = BTreeSet::new();
            for p in c.target_profiles.values() {
                for k in p.keys() {
                    if before.get(k).is_some_and(|o| o != p.id()) {
                        moved.insert(k.clone());
                    }
                }
            }
            let profiles = c.source_profiles.keys().chain(c.target_profiles.keys()).cloned().collect();
            (i, c.kind, profiles, moved)
        })
        .collect()
}

/// Recounts one side of a case graph from the raw snapshot, scanning every
/// profile's mentions rather than any index: the node set (primaries, their
/// documents, every co-holder, venues) and all CoCreated weights.
pub fn recount(
    graph: &CaseGraph,
    state: &Snapshot,
    primaries: &BTreeSet<ProfileId>,
    weight_basis: &Snapshot,
) -> Result<(), String> {
    let docs: BTreeSet<String> = state
        .profiles()
        .filter(|p| primaries.contains(p.id()))
        .flat_map(|p| p.keys().map(|k| k.document.to_string()))
        .collect();
    let mut want_nodes: BTreeSet<(NodeLabel, String)> = BTreeSet::new();
    let mut authors_of: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for p in state.profiles() {
        let mut holds = false;
        for k in p.keys() {
            if docs.contains(k.document.as_str()) {
                holds = true;
                if k.role == Role::Author {
                    authors_of.entry(k.document.to_string()).or_default().insert(p.id().to_string());
                }
            }
        }
        if holds || primaries.contains(p.id()) {
            want_nodes.insert((NodeLabel::Person, p.id().to_string()));
        }
    }
    for doc in &docs {
        want_nodes.insert((NodeLabel::Document, doc.clone()));
        if let Some(v) = &state.document(doc).unwrap().venue {
            want_nodes.insert((NodeLabel::Venue, v.to_string()));
        }
    }
    let got_nodes: BTreeSet<(NodeLabel, String)> = graph.nodes().iter().map(|n| (n.label, n.id.clone())).collect();
    if got_nodes != want_nodes {
        return Err(format!("node sets differ: got {got_nodes:?}, want {want_nodes:?}"));
    }
    let persons: Vec<&String> = want_nodes.iter().filter(|(l, _)| *l == NodeLabel::Person).map(|(_, id)| id).collect();
    let mut want: BTreeMap<(String, String), u32> = BTreeMap::new();
    for (i, a) in persons.iter().enumerate() {
        for b in &persons[i + 1..] {
            let w = authors_of
                .iter()
                .filter(|(doc, holders)| {
                    weight_basis.document(doc).is_some() && holders.contains(*a) && holders.contains(*b)
                })
                .count() as u32;
            if w > 0 {
                want.insert(((*a).clone(), (*b).clone()), w);
            }
        }
    }
    let got: BTreeMap<(String, String), u32> = graph
        .edges_of(EdgeType::CoCreated)
        .map(|e| ((e.from.clone(), e.to.clone()), e.weight.unwrap()))
        .collect();
    if got != want {
        return Err(format!("CoCreated weights differ: got {got:?}, want {want:?}"));
    }
    let primary: BTreeSet<String> = primaries.iter().map(|p| p.to_string()).collect();
    if graph.primary_ids() != &primary {
        return Err("primary set differs".into());
    }
    Ok(())
}

/// Checks both graphs of a case by recounting.
pub fn recount_case(case: &CorrectionCase, history: &History, before: &CaseGraph, after: &CaseGraph) -> Result<(), String> {
    let s1 = history.at(case.t_before).unwrap();
    let s2 = history.at(case.t_after).unwrap();
    let sources = case.source_profiles.keys().cloned().collect();
    let targets = case.target_profiles.keys().cloned().collect();
    recount(before, s1, &sources, s1).map_err(|e| format!("before-graph: {e}"))?;
    recount(after, s2, &targets, s1).map_err(|e| format!("after-graph: {e}"))
}

/// Random assignment of mentions m0..m{n} to profiles for two observations,
/// with the second derived from the first by a few random reassignments.
pub fn random_pair<R: Rng>(rng: &mut R) -> History {
    let n = rng.gen_range(1..16);
    let n_profiles = rng.gen_range(1..8);
    let mut owner: Vec<Option<usize>> = (0..n).map(|_| rng.gen_bool(0.9).then(|| rng.gen_range(0..n_profiles))).collect();
    let first = assignment(d("2017-01-01"), &owner, n);
    for _ in 0..rng.gen_range(0..6) {
        let i = rng.gen_range(0..n);
        owner[i] = Some(rng.gen_range(0..n_profiles + 3));
    }
    if rng.gen_bool(0.3) {
        // relabel one profile wholesale
        let from = rng.gen_range(0..n_profiles);
        let to = rng.gen_range(0..n_profiles + 3);
        for o in owner.iter_mut().flatten() {
            if *o == from {
                *o = to;
            }
        }
    }
    let second = assignment(d("2017-01-02"), &owner, n);
    History::new(vec![first, second]).unwrap()
}

fn assignment(date: Date, owner: &[Option<usize>], n: usize) -> Snapshot {
    let mut b = SnapshotBuilder::new(date);
    for i in 0..n {
        let mut r = DocumentRecord::new(format!("m{i}").as_str(), "T", 2000);
        r.authors.push(Arc::from("N"));
        b.add_document(r).unwrap();
    }
    let mut profiles: BTreeMap<usize, Vec<Signature>> = BTreeMap::new();
    for (i, o) in owner.iter().enumerate() {
        if let Some(o) = o {
            profiles.entry(*o).or_default().push(Signature::new(MentionKey::author(&format!("m{i}"), 0), "N"));
        }
    }
    for (p, sigs) in profiles {
        b.add_profile(Profile::from_signatures(format!("p{p}").as_str(), sigs).unwrap()).unwrap();
    }
    b.build().unwrap()
}
