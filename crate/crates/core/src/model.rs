//! Snapshots, profiles, mentions and histories.
//!
//! Every value here is immutable once built. Snapshots hold their profiles
//! and documents behind `Arc`, so consecutive snapshots of a history share
//! everything that did not change between them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::borrow::Borrow;
use core::fmt;

use crate::date::Date;
use crate::error::Error;

macro_rules! text_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: impl Into<Arc<str>>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl core::ops::Deref for $name {
            type Target = str;

            fn deref(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.into())
            }
        }
    };
}

text_id!(
    /// Opaque profile identifier. Never interpreted as a name, even when a
    /// collection happens to key its profiles by name.
    ProfileId
);
text_id!(
    /// Opaque publication key.
    DocKey
);
text_id!(
    /// Opaque venue key (journal or conference series).
    VenueKey
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Author,
    Editor,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Author => "author",
            Role::Editor => "editor",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s {
            "author" => Some(Role::Author),
            "editor" => Some(Role::Editor),
            _ => None,
        }
    }
}

/// Identity of a mention: which name slot of which document.
///
/// The surface string is deliberately not part of the identity; corrections
/// routinely rewrite it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MentionKey {
    pub document: DocKey,
    pub position: u32,
    pub role: Role,
}

impl MentionKey {
    pub fn new(document: impl Into<DocKey>, position: u32, role: Role) -> Self {
        MentionKey { document: document.into(), position, role }
    }

    pub fn author(document: &str, position: u32) -> Self {
        MentionKey::new(DocKey::from(document), position, Role::Author)
    }

    pub fn editor(document: &str, position: u32) -> Self {
        MentionKey::new(DocKey::from(document), position, Role::Editor)
    }
}

/// `doc#3` for author slots, `doc#e3` for editor slots.
impl fmt::Display for MentionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Role::Author => write!(f, "{}#{}", self.document, self.position),
            Role::Editor => write!(f, "{}#e{}", self.document, self.position),
        }
    }
}

/// One mention together with its printed name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub key: MentionKey,
    pub surface: Arc<str>,
}

impl Signature {
    pub fn new(key: MentionKey, surface: impl Into<Arc<str>>) -> Self {
        Signature { key, surface: surface.into() }
    }
}

/// A library's interpretation of one person: the mentions it attributes to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    id: ProfileId,
    mentions: BTreeMap<MentionKey, Arc<str>>,
}

impl Profile {
    pub fn new(id: impl Into<ProfileId>) -> Self {
        Profile { id: id.into(), mentions: BTreeMap::new() }
    }

    /// Builds a profile, rejecting empty surfaces and repeated mention keys.
    pub fn from_signatures(
        id: impl Into<ProfileId>,
        signatures: impl IntoIterator<Item = Signature>,
    ) -> Result<Self, Error> {
        let mut p = Profile::new(id);
        for s in signatures {
            p.add(s.key, s.surface)?;
        }
        Ok(p)
    }

    pub fn add(&mut self, key: MentionKey, surface: Arc<str>) -> Result<(), Error> {
        if surface.trim().is_empty() {
            return Err(Error::EmptySurface(key.to_string()));
        }
        if self.mentions.contains_key(&key) {
            return Err(Error::DuplicateMention {
                mention: key.to_string(),
                first: self.id.to_string(),
                second: self.id.to_string(),
            });
        }
        self.mentions.insert(key, surface);
        Ok(())
    }

    pub(crate) fn insert(&mut self, key: MentionKey, surface: Arc<str>) {
        self.mentions.insert(key, surface);
    }

    pub(crate) fn remove(&mut self, key: &MentionKey) -> Option<Arc<str>> {
        self.mentions.remove(key)
    }

    pub(crate) fn with_id(&self, id: ProfileId) -> Profile {
        Profile { id, mentions: self.mentions.clone() }
    }

    pub fn id(&self) -> &ProfileId {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.mentions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mentions.is_empty()
    }

    pub fn contains(&self, key: &MentionKey) -> bool {
        self.mentions.contains_key(key)
    }

    pub fn surface(&self, key: &MentionKey) -> Option<&Arc<str>> {
        self.mentions.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &MentionKey> + '_ {
        self.mentions.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MentionKey, &Arc<str>)> + '_ {
        self.mentions.iter()
    }

    /// Signatures in (document, position, role) order.
    pub fn signatures(&self) -> impl Iterator<Item = Signature> + '_ {
        self.mentions.iter().map(|(k, s)| Signature { key: k.clone(), surface: s.clone() })
    }

    /// True when both profiles hold exactly the same mention keys, surfaces ignored.
    pub fn same_mentions(&self, other: &Profile) -> bool {
        self.mentions.len() == other.mentions.len() && self.mentions.keys().eq(other.mentions.keys())
    }

    /// Most frequent surface, ties broken by the lexicographically smallest.
    pub fn modal_surface(&self) -> Option<&Arc<str>> {
        let mut counts: BTreeMap<&Arc<str>, usize> = BTreeMap::new();
        for s in self.mentions.values() {
            *counts.entry(s).or_default() += 1;
        }
        let mut best: Option<(&Arc<str>, usize)> = None;
        for (s, n) in counts {
            if best.is_none_or(|(_, b)| n > b) {
                best = Some((s, n));
            }
        }
        best.map(|(s, _)| s)
    }
}

/// Bibliographic record of one publication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentRecord {
    pub key: DocKey,
    pub title: String,
    pub year: i32,
    pub venue: Option<VenueKey>,
    pub authors: Vec<Arc<str>>,
    pub editors: Vec<Arc<str>>,
    pub link: Option<String>,
}

impl DocumentRecord {
    pub fn new(key: impl Into<DocKey>, title: impl Into<String>, year: i32) -> Self {
        DocumentRecord {
            key: key.into(),
            title: title.into(),
            year,
            venue: None,
            authors: Vec::new(),
            editors: Vec::new(),
            link: None,
        }
    }

    pub fn names(&self, role: Role) -> &[Arc<str>] {
        match role {
            Role::Author => &self.authors,
            Role::Editor => &self.editors,
        }
    }

    pub(crate) fn names_mut(&mut self, role: Role) -> &mut Vec<Arc<str>> {
        match role {
            Role::Author => &mut self.authors,
            Role::Editor => &mut self.editors,
        }
    }

    /// Every name slot of this document as a mention key.
    pub fn mention_keys(&self) -> impl Iterator<Item = MentionKey> + '_ {
        let a = (0..self.authors.len()).map(|i| MentionKey::new(self.key.clone(), i as u32, Role::Author));
        let e = (0..self.editors.len()).map(|i| MentionKey::new(self.key.clone(), i as u32, Role::Editor));
        a.chain(e)
    }
}

/// The collection as observed at one date.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    date: Date,
    profiles: BTreeMap<ProfileId, Arc<Profile>>,
    documents: BTreeMap<DocKey, Arc<DocumentRecord>>,
    venues: BTreeMap<VenueKey, Arc<str>>,
}

impl Snapshot {
    /// A snapshot with no profiles and no documents.
    pub fn empty(date: Date) -> Self {
        Snapshot { date, profiles: BTreeMap::new(), documents: BTreeMap::new(), venues: BTreeMap::new() }
    }

    pub fn date(&self) -> Date {
        self.date
    }

    /// Same content observed at another date.
    pub fn with_date(&self, date: Date) -> Snapshot {
        Snapshot { date, ..self.clone() }
    }

    pub fn profile(&self, id: &str) -> Option<&Profile> {
        self.profiles.get(id).map(|p| &**p)
    }

    pub(crate) fn profile_arc(&self, id: &str) -> Option<&Arc<Profile>> {
        self.profiles.get(id)
    }

    /// Profiles in id order.
    pub fn profiles(&self) -> impl Iterator<Item = &Profile> + '_ {
        self.profiles.values().map(|p| &**p)
    }

    pub fn profile_count(&self) -> usize {
        self.profiles.len()
    }

    /// True if the profile is absent or holds no mentions.
    pub fn is_empty_profile(&self, id: &str) -> bool {
        self.profile(id).is_none_or(Profile::is_empty)
    }

    pub fn document(&self, key: &str) -> Option<&DocumentRecord> {
        self.documents.get(key).map(|d| &**d)
    }

    pub fn documents(&self) -> impl Iterator<Item = &DocumentRecord> + '_ {
        self.documents.values().map(|d| &**d)
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    pub fn venue_name(&self, key: &str) -> Option<&str> {
        self.venues.get(key).map(|n| &**n)
    }

    pub fn venues(&self) -> impl Iterator<Item = (&VenueKey, &str)> + '_ {
        self.venues.iter().map(|(k, n)| (k, &**n))
    }

    pub fn mention_count(&self) -> usize {
        self.profiles.values().map(|p| p.len()).sum()
    }

    /// p⟨t⟩ for this snapshot's t; empty when the profile is absent.
    pub fn mentions_of(&self, id: &str) -> BTreeSet<Signature> {
        self.profile(id).map(|p| p.signatures().collect()).unwrap_or_default()
    }

    /// Map from every assigned mention to the profile holding it.
    pub fn owner_index(&self) -> BTreeMap<&MentionKey, &ProfileId> {
        let mut idx = BTreeMap::new();
        for p in self.profiles.values() {
            for k in p.keys() {
                idx.insert(k, p.id());
            }
        }
        idx
    }

    pub(crate) fn parts_mut(
        &mut self,
    ) -> (
        &mut BTreeMap<ProfileId, Arc<Profile>>,
        &mut BTreeMap<DocKey, Arc<DocumentRecord>>,
        &mut BTreeMap<VenueKey, Arc<str>>,
    ) {
        (&mut self.profiles, &mut self.documents, &mut self.venues)
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<(), Error> {
        check_invariants(&self.profiles, &self.documents, &self.venues)
    }
}

fn check_invariants(
    profiles: &BTreeMap<ProfileId, Arc<Profile>>,
    documents: &BTreeMap<DocKey, Arc<DocumentRecord>>,
    venues: &BTreeMap<VenueKey, Arc<str>>,
) -> Result<(), Error> {
    for d in documents.values() {
        if let Some(v) = &d.venue {
            if !venues.contains_key(v) {
                return Err(Error::DanglingVenue { document: d.key.to_string(), venue: v.to_string() });
            }
        }
    }
    let mut claims: Vec<(&MentionKey, &ProfileId)> = Vec::with_capacity(profiles.values().map(|p| p.len()).sum());
    for p in profiles.values() {
        for (k, s) in p.iter() {
            if s.trim().is_empty() {
                return Err(Error::EmptySurface(k.to_string()));
            }
            let doc = documents.get(&k.document).ok_or_else(|| Error::DanglingDocument {
                profile: p.id().to_string(),
                document: k.document.to_string(),
            })?;
            if k.position as usize >= doc.names(k.role).len() {
                return Err(Error::PositionOutOfRange(k.to_string()));
            }
            claims.push((k, p.id()));
        }
    }
    claims.sort_unstable();
    for w in claims.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateMention {
                mention: w[0].0.to_string(),
                first: w[0].1.to_string(),
                second: w[1].1.to_string(),
            });
        }
    }
    Ok(())
}

/// Assembles a [`Snapshot`] record by record.
///
/// With a base snapshot, records equal to the base's are replaced by the
/// base's shared copies, so a freshly parsed snapshot costs memory only for
/// what changed.
pub struct SnapshotBuilder<'a> {
    date: Date,
    base: Option<&'a Snapshot>,
    profiles: BTreeMap<ProfileId, Arc<Profile>>,
    documents: BTreeMap<DocKey, Arc<DocumentRecord>>,
    venues: BTreeMap<VenueKey, Arc<str>>,
}

impl<'a> SnapshotBuilder<'a> {
    pub fn new(date: Date) -> Self {
        SnapshotBuilder {
            date,
            base: None,
            profiles: BTreeMap::new(),
            documents: BTreeMap::new(),
            venues: BTreeMap::new(),
        }
    }

    pub fn with_base(date: Date, base: &'a Snapshot) -> Self {
        SnapshotBuilder { base: Some(base), ..SnapshotBuilder::new(date) }
    }

    pub fn date(&self) -> Date {
        self.date
    }

    pub fn add_venue(&mut self, key: VenueKey, name: &str) -> Result<(), Error> {
        if let Some(existing) = self.venues.get(&key) {
            if &**existing != name {
                return Err(Error::ConflictingVenue(key.to_string()));
            }
            return Ok(());
        }
        let shared = self
            .base
            .and_then(|b| b.venues.get_key_value(&key))
            .filter(|(_, n)| &***n == name)
            .map(|(k, n)| (k.clone(), n.clone()));
        let (k, n) = shared.unwrap_or_else(|| (key, Arc::from(name)));
        self.venues.insert(k, n);
        Ok(())
    }

    pub fn add_document(&mut self, doc: DocumentRecord) -> Result<(), Error> {
        if self.documents.contains_key(&doc.key) {
            return Err(Error::DuplicateDocument(doc.key.to_string()));
        }
        let shared = self
            .base
            .and_then(|b| b.documents.get_key_value(&doc.key))
            .filter(|(_, d)| ***d == doc)
            .map(|(k, d)| (k.clone(), d.clone()));
        let (k, d) = shared.unwrap_or_else(|| (doc.key.clone(), Arc::new(doc)));
        self.documents.insert(k, d);
        Ok(())
    }

    pub fn add_profile(&mut self, profile: Profile) -> Result<(), Error> {
        if self.profiles.contains_key(profile.id()) {
            return Err(Error::DuplicateProfile(profile.id().to_string()));
        }
        let shared = self
            .base
            .and_then(|b| b.profiles.get_key_value(profile.id()))
            .filter(|(_, p)| ***p == profile)
            .map(|(k, p)| (k.clone(), p.clone()));
        let (k, p) = shared.unwrap_or_else(|| (profile.id().clone(), Arc::new(profile)));
        self.profiles.insert(k, p);
        Ok(())
    }

    /// The shared key for `key` if the document is already known, so that
    /// mention keys do not each carry their own copy of the string.
    pub fn document_key(&self, key: &str) -> DocKey {
        match self.documents.get_key_value(key) {
            Some((k, _)) => k.clone(),
            None => DocKey::from(key),
        }
    }

    /// Shares the document's own name string when it matches `surface`.
    pub fn surface(&self, key: &MentionKey, surface: &str) -> Arc<str> {
        self.documents
            .get(&key.document)
            .and_then(|d| d.names(key.role).get(key.position as usize))
            .filter(|n| &***n == surface)
            .cloned()
            .unwrap_or_else(|| Arc::from(surface))
    }

    pub fn has_document(&self, key: &str) -> bool {
        self.documents.contains_key(key)
    }

    /// Validates and finishes. Venues no document refers to are dropped.
    pub fn build(mut self) -> Result<Snapshot, Error> {
        let used: BTreeSet<&VenueKey> = self.documents.values().filter_map(|d| d.venue.as_ref()).collect();
        let unused: Vec<VenueKey> = self.venues.keys().filter(|k| !used.contains(k)).cloned().collect();
        for k in unused {
            self.venues.remove(&k);
        }
        check_invariants(&self.profiles, &self.documents, &self.venues)?;
        Ok(Snapshot { date: self.date, profiles: self.profiles, documents: self.documents, venues: self.venues })
    }
}

/// Snapshots ordered by strictly increasing observation date.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    snapshots: Vec<Snapshot>,
}

impl History {
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self, Error> {
        if snapshots.is_empty() {
            return Err(Error::TooFewSnapshots(1));
        }
        for w in snapshots.windows(2) {
            if w[0].date >= w[1].date {
                return Err(Error::NonMonotoneDates(w[0].date, w[1].date));
            }
        }
        Ok(History { snapshots })
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn into_snapshots(self) -> Vec<Snapshot> {
        self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dates(&self) -> impl Iterator<Item = Date> + '_ {
        self.snapshots.iter().map(|s| s.date)
    }

    pub fn first(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn latest(&self) -> &Snapshot {
        &self.snapshots[self.snapshots.len() - 1]
    }

    pub fn index_of(&self, t: Date) -> Result<usize, Error> {
        self.snapshots.binary_search_by(|s| s.date.cmp(&t)).map_err(|_| Error::UnobservedTime(t))
    }

    pub fn at(&self, t: Date) -> Result<&Snapshot, Error> {
        self.index_of(t).map(|i| &self.snapshots[i])
    }

    /// p⟨t⟩. Errors when `t` was never observed.
    pub fn mentions_of(&self, profile: &str, t: Date) -> Result<BTreeSet<Signature>, Error> {
        Ok(self.at(t)?.mentions_of(profile))
    }

    /// Contents in reverse order, each relabelled with the mirrored date, so
    /// the result is again a valid history.
    pub fn time_reversed(&self) -> History {
        let n = self.snapshots.len();
        let snapshots = (0..n).map(|i| self.snapshots[n - 1 - i].with_date(self.snapshots[i].date)).collect();
        History { snapshots }
    }

    /// The history restricted to the given observation dates.
    pub fn restricted_to(&self, dates: &[Date]) -> Result<History, Error> {
        let snaps = dates.iter().map(|&d| self.at(d).cloned()).collect::<Result<Vec<_>, _>>()?;
        History::new(snaps)
    }
}
