//! Chaining raw groups into correction cases.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::date::Date;
use crate::error::Error;
use crate::extract::{classify_interval, CorrectionKind, RawGroup};
use crate::model::{History, MentionKey, Profile, ProfileId, Snapshot};
use crate::unionfind::UnionFind;

/// A correction as it appears between its bounding observations.
///
/// Source profiles are the involved profiles that are nonempty at
/// `t_before`, with their state at that time; target profiles are those
/// nonempty at `t_after`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionCase {
    pub kind: CorrectionKind,
    pub t_before: Date,
    pub t_after: Date,
    pub source_profiles: BTreeMap<ProfileId, Arc<Profile>>,
    pub target_profiles: BTreeMap<ProfileId, Arc<Profile>>,
    /// Target mentions held by none of the source profiles (typically new
    /// publications that arrived during the interval).
    pub new_mentions: BTreeSet<MentionKey>,
    /// Labels of the raw groups this case was chained from.
    pub chained_from: Vec<String>,
}

impl CorrectionCase {
    /// All involved profile ids, source or target side.
    pub fn profile_ids(&self) -> BTreeSet<&ProfileId> {
        self.source_profiles.keys().chain(self.target_profiles.keys()).collect()
    }

    /// Number of distinct mentions on either side.
    pub fn mention_count(&self) -> usize {
        let all: BTreeSet<&MentionKey> =
            self.source_profiles.values().chain(self.target_profiles.values()).flat_map(|p| p.keys()).collect();
        all.len()
    }

    /// Mentions that changed hands: held by a source profile and, at
    /// `t_after`, by a different target profile.
    pub fn moved_mentions(&self) -> BTreeSet<MentionKey> {
        let mut owner: BTreeMap<&MentionKey, &ProfileId> = BTreeMap::new();
        for p in self.source_profiles.values() {
            owner.extend(p.keys().map(|k| (k, p.id())));
        }
        let mut out = BTreeSet::new();
        for p in self.target_profiles.values() {
            for k in p.keys() {
                if let Some(&o) = owner.get(k) {
                    if o != p.id() {
                        out.insert(k.clone());
                    }
                }
            }
        }
        out
    }

    /// Smallest involved profile id; used for ordering.
    pub fn first_profile(&self) -> Option<&ProfileId> {
        self.profile_ids().into_iter().next()
    }
}

/// Partitions raw groups into chains: two groups are joined when the
/// second starts exactly where the first ends and they share a profile.
/// Returns indices into `groups`, each chain in input order.
pub fn chain_groups(groups: &[RawGroup]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(groups.len());
    let mut starting: BTreeMap<(Date, &ProfileId), Vec<usize>> = BTreeMap::new();
    let profiles: Vec<BTreeSet<ProfileId>> = groups.iter().map(RawGroup::profiles).collect();
    for (i, g) in groups.iter().enumerate() {
        for p in &profiles[i] {
            starting.entry((g.t1, p)).or_default().push(i);
        }
    }
    for (i, g) in groups.iter().enumerate() {
        for p in &profiles[i] {
            if let Some(next) = starting.get(&(g.t2, p)) {
                for &j in next {
                    uf.union(i, j);
                }
            }
        }
    }
    uf.groups()
}

/// Chains raw groups and reads each chain's bounding states from `history`.
///
/// Output is ordered by `t_before`, then by smallest profile id.
pub fn chain_corrections(history: &History, groups: &[RawGroup]) -> Result<Vec<CorrectionCase>, Error> {
    let lookup = |t: Date| history.at(t);
    build_cases(groups, lookup)
}

fn build_cases<'h>(
    groups: &[RawGroup],
    lookup: impl Fn(Date) -> Result<&'h Snapshot, Error>,
) -> Result<Vec<CorrectionCase>, Error> {
    let mut cases = Vec::new();
    for chain in chain_groups(groups) {
        let members: Vec<&RawGroup> = chain.iter().map(|&i| &groups[i]).collect();
        let t_before = members.iter().map(|g| g.t1).min().expect("non-empty chain");
        let t_after = members.iter().map(|g| g.t2).max().expect("non-empty chain");
        let first_kind = members[0].kind;
        let kind = if members.iter().all(|g| g.kind == first_kind) { first_kind } else { CorrectionKind::Distribute };
        let ids: BTreeSet<ProfileId> = members.iter().flat_map(|g| g.profiles()).collect();
        let before = lookup(t_before)?;
        let after = lookup(t_after)?;
        let pick = |s: &Snapshot| -> BTreeMap<ProfileId, Arc<Profile>> {
            ids.iter()
                .filter_map(|id| s.profile_arc(id))
                .filter(|p| !p.is_empty())
                .map(|p| (p.id().clone(), p.clone()))
                .collect()
        };
        let source_profiles = pick(before);
        let target_profiles = pick(after);
        let new_mentions = target_profiles
            .values()
            .flat_map(|p| p.keys())
            .filter(|k| !source_profiles.values().any(|s| s.contains(k)))
            .cloned()
            .collect();
        let mut chained_from: Vec<String> = members.iter().map(|g| g.label()).collect();
        chained_from.sort();
        cases.push(CorrectionCase {
            kind,
            t_before,
            t_after,
            source_profiles,
            target_profiles,
            new_mentions,
            chained_from,
        });
    }
    cases.sort_by(|a, b| (a.t_before, a.first_profile(), a.t_after).cmp(&(b.t_before, b.first_profile(), b.t_after)));
    Ok(cases)
}

/// Raw groups of every consecutive observation pair, in time order.
pub fn raw_groups(history: &History) -> Vec<RawGroup> {
    history.snapshots().windows(2).flat_map(|w| classify_interval(&w[0], &w[1])).collect()
}

/// All corrections in a history of at least two snapshots.
pub fn extract_corrections(history: &History) -> Result<Vec<CorrectionCase>, Error> {
    if history.len() < 2 {
        return Err(Error::TooFewSnapshots(2));
    }
    chain_corrections(history, &raw_groups(history))
}

/// Corrections visible when only `t1` and `t2` are observed.
pub fn extract_between(history: &History, t1: Date, t2: Date) -> Result<Vec<CorrectionCase>, Error> {
    let a = history.at(t1)?;
    let b = history.at(t2)?;
    if t1 >= t2 {
        return Err(Error::InvalidInterval(t1, t2));
    }
    let groups = classify_interval(a, b);
    build_cases(&groups, |t| if t == t1 { Ok(a) } else { Ok(b) })
}
