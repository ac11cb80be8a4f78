//! Edits to a snapshot and the log of edits a generator applied.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::extract::CorrectionKind;
use crate::model::{DocumentRecord, MentionKey, Profile, ProfileId, Snapshot, VenueKey};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPart {
    /// Fresh profile receiving the mentions.
    pub profile: ProfileId,
    pub mentions: BTreeSet<MentionKey>,
    /// Rewrites the surfaces of the moved mentions when set.
    pub surface: Option<Arc<str>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub mention: MentionKey,
    pub from: ProfileId,
    pub to: ProfileId,
    pub surface: Option<Arc<str>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Edit {
    /// Every mention of `absorbed` moves to `survivor`; absorbed profiles disappear.
    Merge { survivor: ProfileId, absorbed: Vec<ProfileId>, surface: Option<Arc<str>> },
    /// Designated mentions of `source` move to fresh profiles.
    Split { source: ProfileId, parts: Vec<SplitPart> },
    /// Mentions move between profiles that all stay nonempty.
    Distribute { moves: Vec<Move> },
    /// All mentions move to a fresh identifier.
    Rename { from: ProfileId, to: ProfileId, surface: Option<Arc<str>> },
    /// A new document whose name slots are assigned to (possibly fresh) profiles.
    Publish {
        document: DocumentRecord,
        venue: Option<(VenueKey, Arc<str>)>,
        owners: Vec<(MentionKey, ProfileId)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EditKind {
    Merge,
    Split,
    Distribute,
    Rename,
    NewPublication,
}

impl EditKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EditKind::Merge => "merge",
            EditKind::Split => "split",
            EditKind::Distribute => "distribute",
            EditKind::Rename => "rename",
            EditKind::NewPublication => "new-publication",
        }
    }

    /// The correction an observer should see for this edit, if any.
    pub fn correction(self) -> Option<CorrectionKind> {
        match self {
            EditKind::Merge => Some(CorrectionKind::Merge),
            EditKind::Split => Some(CorrectionKind::Split),
            EditKind::Distribute => Some(CorrectionKind::Distribute),
            EditKind::Rename | EditKind::NewPublication => None,
        }
    }
}

impl fmt::Display for EditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Edit {
    pub fn kind(&self) -> EditKind {
        match self {
            Edit::Merge { .. } => EditKind::Merge,
            Edit::Split { .. } => EditKind::Split,
            Edit::Distribute { .. } => EditKind::Distribute,
            Edit::Rename { .. } => EditKind::Rename,
            Edit::Publish { .. } => EditKind::NewPublication,
        }
    }

    pub fn profiles(&self) -> BTreeSet<ProfileId> {
        match self {
            Edit::Merge { survivor, absorbed, .. } => absorbed.iter().chain([survivor]).cloned().collect(),
            Edit::Split { source, parts } => parts.iter().map(|p| &p.profile).chain([source]).cloned().collect(),
            Edit::Distribute { moves } => moves.iter().flat_map(|m| [&m.from, &m.to]).cloned().collect(),
            Edit::Rename { from, to, .. } => [from.clone(), to.clone()].into(),
            Edit::Publish { owners, .. } => owners.iter().map(|(_, p)| p.clone()).collect(),
        }
    }
}

/// One logged edit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditRecord {
    /// Index `i` of the interval between observations `i` and `i + 1`.
    pub interval: usize,
    pub edit: Edit,
    /// Mentions that changed profile (for a publication: the added mentions).
    pub mentions: BTreeSet<MentionKey>,
}

impl EditRecord {
    pub fn kind(&self) -> EditKind {
        self.edit.kind()
    }

    pub fn profiles(&self) -> BTreeSet<ProfileId> {
        self.edit.profiles()
    }
}

/// The ordered edits a generated history realises.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruthLog {
    pub records: Vec<EditRecord>,
}

impl GroundTruthLog {
    /// Merge, split and distribute edits only.
    pub fn corrections(&self) -> impl Iterator<Item = &EditRecord> + '_ {
        self.records.iter().filter(|r| r.kind().correction().is_some())
    }

    /// Corrections applied in intervals `from..to` (observation indices).
    pub fn corrections_between(&self, from: usize, to: usize) -> impl Iterator<Item = &EditRecord> + '_ {
        self.corrections().filter(move |r| r.interval >= from && r.interval < to)
    }
}

/// Applies an edit to a copy of `snapshot`.
pub fn apply_edit(snapshot: &Snapshot, edit: &Edit) -> Result<Snapshot, Error> {
    let mut s = snapshot.clone();
    apply_in_place(&mut s, edit)?;
    Ok(s)
}

/// Applies an edit, returning the mentions it moved or added. Leaves the
/// snapshot untouched on error.
pub fn apply_in_place(s: &mut Snapshot, edit: &Edit) -> Result<BTreeSet<MentionKey>, Error> {
    check(s, edit)?;
    let (profiles, documents, venues) = s.parts_mut();
    let mut touched = BTreeSet::new();
    let relabel = |documents: &mut alloc::collections::BTreeMap<_, Arc<DocumentRecord>>,
                       key: &MentionKey,
                       surface: &Arc<str>| {
        if let Some(d) = documents.get_mut(&key.document) {
            if d.names(key.role).get(key.position as usize) != Some(surface) {
                Arc::make_mut(d).names_mut(key.role)[key.position as usize] = surface.clone();
            }
        }
    };
    match edit {
        Edit::Merge { survivor, absorbed, surface } => {
            let mut target = profiles.get(survivor).map(|p| (**p).clone()).unwrap_or_else(|| Profile::new(survivor.clone()));
            for a in absorbed {
                let src = profiles.remove(a).expect("checked");
                for (k, sur) in src.iter() {
                    let sur = surface.clone().unwrap_or_else(|| sur.clone());
                    relabel(documents, k, &sur);
                    target.insert(k.clone(), sur);
                    touched.insert(k.clone());
                }
            }
            profiles.insert(survivor.clone(), Arc::new(target));
        }
        Edit::Split { source, parts } => {
            let mut src = (**profiles.get(source).expect("checked")).clone();
            for part in parts {
                let mut fresh = Profile::new(part.profile.clone());
                for k in &part.mentions {
                    let old = src.remove(k).expect("checked");
                    let sur = part.surface.clone().unwrap_or(old);
                    relabel(documents, k, &sur);
                    fresh.insert(k.clone(), sur);
                    touched.insert(k.clone());
                }
                profiles.insert(part.profile.clone(), Arc::new(fresh));
            }
            if src.is_empty() {
                profiles.remove(source);
            } else {
                profiles.insert(source.clone(), Arc::new(src));
            }
        }
        Edit::Distribute { moves } => {
            for m in moves {
                let old = Arc::make_mut(profiles.get_mut(&m.from).expect("checked")).remove(&m.mention).expect("checked");
                let sur = m.surface.clone().unwrap_or(old);
                relabel(documents, &m.mention, &sur);
                Arc::make_mut(profiles.get_mut(&m.to).expect("checked")).insert(m.mention.clone(), sur);
                touched.insert(m.mention.clone());
            }
        }
        Edit::Rename { from, to, surface } => {
            let src = profiles.remove(from).expect("checked");
            let mut renamed = src.with_id(to.clone());
            if let Some(sur) = surface {
                let keys: Vec<MentionKey> = renamed.keys().cloned().collect();
                for k in keys {
                    relabel(documents, &k, sur);
                    renamed.insert(k, sur.clone());
                }
            }
            touched.extend(renamed.keys().cloned());
            profiles.insert(to.clone(), Arc::new(renamed));
        }
        Edit::Publish { document, venue, owners } => {
            if let Some((k, name)) = venue {
                venues.entry(k.clone()).or_insert_with(|| name.clone());
            }
            for (k, p) in owners {
                let sur = document.names(k.role)[k.position as usize].clone();
                let entry = profiles.entry(p.clone()).or_insert_with(|| Arc::new(Profile::new(p.clone())));
                Arc::make_mut(entry).insert(k.clone(), sur);
                touched.insert(k.clone());
            }
            documents.insert(document.key.clone(), Arc::new(document.clone()));
        }
    }
    Ok(touched)
}

fn infeasible(msg: alloc::string::String) -> Error {
    Error::InfeasibleEdit(msg)
}

fn check(s: &Snapshot, edit: &Edit) -> Result<(), Error> {
    let nonempty = |id: &ProfileId| s.profile(id).is_some_and(|p| !p.is_empty());
    match edit {
        Edit::Merge { survivor, absorbed, surface } => {
            if absorbed.is_empty() {
                return Err(infeasible(format!("merge into `{survivor}` absorbs nothing")));
            }
            let distinct: BTreeSet<&ProfileId> = absorbed.iter().collect();
            if distinct.len() != absorbed.len() || distinct.contains(survivor) {
                return Err(infeasible(format!("merge into `{survivor}` repeats a profile")));
            }
            if let Some(a) = absorbed.iter().find(|a| !nonempty(a)) {
                return Err(infeasible(format!("merge absorbs missing or empty profile `{a}`")));
            }
            check_surface(surface.as_ref())?;
        }
        Edit::Split { source, parts } => {
            let src = s.profile(source).ok_or_else(|| infeasible(format!("split of unknown profile `{source}`")))?;
            if parts.is_empty() {
                return Err(infeasible(format!("split of `{source}` has no parts")));
            }
            let mut seen = BTreeSet::new();
            let mut fresh = BTreeSet::new();
            for part in parts {
                if s.profile(&part.profile).is_some() || !fresh.insert(&part.profile) || part.profile == *source {
                    return Err(infeasible(format!("split target `{}` is not fresh", part.profile)));
                }
                if part.mentions.is_empty() {
                    return Err(infeasible(format!("split part `{}` is empty", part.profile)));
                }
                for k in &part.mentions {
                    if !src.contains(k) || !seen.insert(k) {
                        return Err(infeasible(format!("split of `{source}` cannot move {k}")));
                    }
                }
                check_surface(part.surface.as_ref())?;
            }
        }
        Edit::Distribute { moves } => {
            if moves.is_empty() {
                return Err(infeasible("distribute without moves".to_string()));
            }
            let mut seen = BTreeSet::new();
            let mut leaving: alloc::collections::BTreeMap<&ProfileId, usize> = Default::default();
            for m in moves {
                if m.from == m.to || !seen.insert(&m.mention) {
                    return Err(infeasible(format!("bad move of {}", m.mention)));
                }
                if !s.profile(&m.from).is_some_and(|p| p.contains(&m.mention)) {
                    return Err(infeasible(format!("`{}` does not hold {}", m.from, m.mention)));
                }
                if !nonempty(&m.to) {
                    return Err(infeasible(format!("distribute target `{}` missing or empty", m.to)));
                }
                *leaving.entry(&m.from).or_default() += 1;
                check_surface(m.surface.as_ref())?;
            }
            for (p, n) in leaving {
                let arriving = moves.iter().filter(|m| &m.to == p).count();
                if s.profile(p).map_or(0, Profile::len) + arriving <= n {
                    return Err(infeasible(format!("distribute would empty `{p}`")));
                }
            }
        }
        Edit::Rename { from, to, surface } => {
            if !nonempty(from) {
                return Err(infeasible(format!("rename of missing or empty profile `{from}`")));
            }
            if s.profile(to).is_some() {
                return Err(infeasible(format!("rename target `{to}` exists")));
            }
            check_surface(surface.as_ref())?;
        }
        Edit::Publish { document, venue, owners } => {
            if s.document(&document.key).is_some() {
                return Err(infeasible(format!("document `{}` already exists", document.key)));
            }
            match (&document.venue, venue) {
                (Some(v), _) if s.venue_name(v).is_some() => {}
                (Some(v), Some((k, _))) if k == v => {}
                (None, _) => {}
                (Some(v), _) => return Err(infeasible(format!("unknown venue `{v}`"))),
            }
            let mut seen = BTreeSet::new();
            for (k, _) in owners {
                let ok = k.document == document.key
                    && (k.position as usize) < document.names(k.role).len()
                    && seen.insert(k);
                if !ok {
                    return Err(infeasible(format!("publication cannot assign {k}")));
                }
            }
            if document.authors.iter().chain(&document.editors).any(|n| n.trim().is_empty()) {
                return Err(Error::EmptySurface(document.key.to_string()));
            }
        }
    }
    Ok(())
}

fn check_surface(s: Option<&Arc<str>>) -> Result<(), Error> {
    match s {
        Some(s) if s.trim().is_empty() => Err(Error::EmptySurface("<rewrite>".to_string())),
        _ => Ok(()),
    }
}
