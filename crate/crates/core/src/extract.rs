//! Detection of merge, split and distribute groups between two observations.
//!
//! The relation functions (`reference_predecessors` and friends) evaluate
//! their definitions directly and are meant for analysis of single
//! profiles. The detectors work on the difference of two snapshots: only
//! profiles whose mention set changed can take part in a reassignment, so
//! the cost of one interval is proportional to what changed in it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::date::Date;
use crate::error::Error;
use crate::model::{History, MentionKey, Profile, ProfileId, Snapshot};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CorrectionKind {
    Merge,
    Split,
    Distribute,
}

impl CorrectionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CorrectionKind::Merge => "merge",
            CorrectionKind::Split => "split",
            CorrectionKind::Distribute => "distribute",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "merge" => Some(CorrectionKind::Merge),
            "split" => Some(CorrectionKind::Split),
            "distribute" => Some(CorrectionKind::Distribute),
            _ => None,
        }
    }
}

impl fmt::Display for CorrectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One reassignment observed between two consecutive observations.
///
/// Merge: `sources` are the reference predecessors of the single target.
/// Split: the single source and its reference successors as `targets`.
/// Distribute: the profiles of the component nonempty before / after.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RawGroup {
    pub t1: Date,
    pub t2: Date,
    pub kind: CorrectionKind,
    pub sources: BTreeSet<ProfileId>,
    pub targets: BTreeSet<ProfileId>,
}

impl RawGroup {
    pub fn profiles(&self) -> BTreeSet<ProfileId> {
        self.sources.union(&self.targets).cloned().collect()
    }

    /// The same group read backwards in time.
    pub fn reversed(&self) -> RawGroup {
        let kind = match self.kind {
            CorrectionKind::Merge => CorrectionKind::Split,
            CorrectionKind::Split => CorrectionKind::Merge,
            CorrectionKind::Distribute => CorrectionKind::Distribute,
        };
        RawGroup { t1: self.t1, t2: self.t2, kind, sources: self.targets.clone(), targets: self.sources.clone() }
    }

    /// Stable label: `<t1>..<t2>/<kind>/<smallest profile id>`.
    pub fn label(&self) -> alloc::string::String {
        let first = self.profiles().into_iter().next().map(|p| p.to_string()).unwrap_or_default();
        alloc::format!("{}..{}/{}/{}", self.t1, self.t2, self.kind, first)
    }
}


fn observed_pair(history: &History, t1: Date, t2: Date) -> Result<(&Snapshot, &Snapshot), Error> {
    let a = history.at(t1)?;
    let b = history.at(t2)?;
    if t1 >= t2 {
        return Err(Error::InvalidInterval(t1, t2));
    }
    Ok((a, b))
}

fn intersects(a: Option<&Profile>, b: Option<&Profile>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => {
            let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
            small.keys().any(|k| large.contains(k))
        }
        _ => false,
    }
}

/// Every q with q⟨t1⟩ ∩ p⟨t2⟩ ≠ ∅.
pub fn reference_predecessors(history: &History, p: &str, t1: Date, t2: Date) -> Result<BTreeSet<ProfileId>, Error> {
    let (s1, s2) = observed_pair(history, t1, t2)?;
    let target = s2.profile(p);
    Ok(s1.profiles().filter(|q| intersects(Some(q), target)).map(|q| q.id().clone()).collect())
}

/// Every q with p⟨t1⟩ ∩ q⟨t2⟩ ≠ ∅.
pub fn reference_successors(history: &History, p: &str, t1: Date, t2: Date) -> Result<BTreeSet<ProfileId>, Error> {
    let (s1, s2) = observed_pair(history, t1, t2)?;
    let source = s1.profile(p);
    Ok(s2.profiles().filter(|q| intersects(source, Some(q))).map(|q| q.id().clone()).collect())
}

/// p1⟨t1⟩ ⊆ p2⟨t2⟩. Not used by extraction; exposed for analysis.
pub fn is_consistent_predecessor(history: &History, p1: &str, t1: Date, p2: &str, t2: Date) -> Result<bool, Error> {
    let (s1, s2) = observed_pair(history, t1, t2)?;
    Ok(match (s1.profile(p1), s2.profile(p2)) {
        (None, _) => true,
        (Some(a), _) if a.is_empty() => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => a.keys().all(|k| b.contains(k)),
    })
}

/// Literal merge groups, split groups and moved-mention components of one
/// interval, before classification.
struct IntervalDiff<'s> {
    before: &'s Snapshot,
    after: &'s Snapshot,
    /// changed profile ids, sorted
    changed: Vec<&'s ProfileId>,
    owner_before: BTreeMap<&'s MentionKey, usize>,
    owner_after: BTreeMap<&'s MentionKey, usize>,
}

impl<'s> IntervalDiff<'s> {
    fn new(before: &'s Snapshot, after: &'s Snapshot) -> Self {
        let changed = changed_profiles(before, after);
        let mut owner_before = BTreeMap::new();
        let mut owner_after = BTreeMap::new();
        for (i, id) in changed.iter().enumerate() {
            if let Some(p) = before.profile(id) {
                owner_before.extend(p.keys().map(|k| (k, i)));
            }
            if let Some(p) = after.profile(id) {
                owner_after.extend(p.keys().map(|k| (k, i)));
            }
        }
        IntervalDiff { before, after, changed, owner_before, owner_after }
    }

    fn id(&self, i: usize) -> &'s ProfileId {
        self.changed[i]
    }

    fn empty_before(&self, i: usize) -> bool {
        self.before.is_empty_profile(self.id(i))
    }

    fn empty_after(&self, i: usize) -> bool {
        self.after.is_empty_profile(self.id(i))
    }

    /// Reference predecessors of changed profile `i`, as changed-profile indices.
    fn predecessors(&self, i: usize) -> BTreeSet<usize> {
        self.after
            .profile(self.id(i))
            .into_iter()
            .flat_map(|p| p.keys())
            .filter_map(|k| self.owner_before.get(k).copied())
            .collect()
    }

    fn successors(&self, i: usize) -> BTreeSet<usize> {
        self.before
            .profile(self.id(i))
            .into_iter()
            .flat_map(|p| p.keys())
            .filter_map(|k| self.owner_after.get(k).copied())
            .collect()
    }

    fn ids(&self, set: &BTreeSet<usize>) -> BTreeSet<ProfileId> {
        set.iter().map(|&i| self.id(i).clone()).collect()
    }

    /// (sources, target) pairs satisfying the merge-group definition.
    fn merge_groups(&self) -> Vec<(BTreeSet<usize>, usize)> {
        (0..self.changed.len())
            .filter(|&p| !self.empty_after(p))
            .filter_map(|p| {
                let preds = self.predecessors(p);
                let ok = preds.len() > 1 && preds.iter().all(|&s| s == p || self.empty_after(s));
                ok.then_some((preds, p))
            })
            .collect()
    }

    fn split_groups(&self) -> Vec<(usize, BTreeSet<usize>)> {
        (0..self.changed.len())
            .filter(|&p| !self.empty_before(p))
            .filter_map(|p| {
                let succs = self.successors(p);
                let ok = succs.len() > 1 && succs.iter().all(|&s| s == p || self.empty_before(s));
                ok.then_some((p, succs))
            })
            .collect()
    }

    /// Connected components (size ≥ 2) of the moved-mention relation.
    fn components(&self) -> Vec<BTreeSet<usize>> {
        let mut uf = UnionFind::new(self.changed.len());
        for (k, &q) in &self.owner_after {
            if let Some(&p) = self.owner_before.get(k) {
                if p != q {
                    uf.union(p, q);
                }
            }
        }
        let mut comps: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for i in 0..self.changed.len() {
            comps.entry(uf.find(i)).or_default().insert(i);
        }
        let mut out: Vec<_> = comps.into_values().filter(|c| c.len() > 1).collect();
        out.sort();
        out
    }
}

/// Profiles whose mention key set differs between the two snapshots
/// (including profiles present on one side only).
fn changed_profiles<'s>(before: &'s Snapshot, after: &'s Snapshot) -> Vec<&'s ProfileId> {
    let mut out = Vec::new();
    let mut a = before.profiles().peekable();
    let mut b = after.profiles().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some(p), None) => {
                if !p.is_empty() {
                    out.push(p.id());
                }
                a.next();
            }
            (None, Some(q)) => {
                if !q.is_empty() {
                    out.push(q.id());
                }
                b.next();
            }
            (Some(p), Some(q)) => match p.id().cmp(q.id()) {
                core::cmp::Ordering::Less => {
                    if !p.is_empty() {
                        out.push(p.id());
                    }
                    a.next();
                }
                core::cmp::Ordering::Greater => {
                    if !q.is_empty() {
                        out.push(q.id());
                    }
                    b.next();
                }
                core::cmp::Ordering::Equal => {
                    let same = Arc::ptr_eq(
                        before.profile_arc(p.id()).expect("present"),
                        after.profile_arc(q.id()).expect("present"),
                    ) || p.same_mentions(q);
                    if !same {
                        out.push(p.id());
                    }
                    a.next();
                    b.next();
                }
            },
        }
    }
    out
}

fn merge_group(diff: &IntervalDiff<'_>, sources: &BTreeSet<usize>, target: usize) -> RawGroup {
    RawGroup {
        t1: diff.before.date(),
        t2: diff.after.date(),
        kind: CorrectionKind::Merge,
        sources: diff.ids(sources),
        targets: [diff.id(target).clone()].into_iter().collect(),
    }
}

fn split_group(diff: &IntervalDiff<'_>, source: usize, targets: &BTreeSet<usize>) -> RawGroup {
    RawGroup {
        t1: diff.before.date(),
        t2: diff.after.date(),
        kind: CorrectionKind::Split,
        sources: [diff.id(source).clone()].into_iter().collect(),
        targets: diff.ids(targets),
    }
}

/// Merge groups between two snapshots, sorted by surviving profile id.
pub fn merge_groups_between(before: &Snapshot, after: &Snapshot) -> Vec<RawGroup> {
    let diff = IntervalDiff::new(before, after);
    diff.merge_groups().iter().map(|(s, t)| merge_group(&diff, s, *t)).collect()
}

/// Split groups between two snapshots, sorted by source profile id.
pub fn split_groups_between(before: &Snapshot, after: &Snapshot) -> Vec<RawGroup> {
    let diff = IntervalDiff::new(before, after);
    diff.split_groups().iter().map(|(s, t)| split_group(&diff, *s, t)).collect()
}

/// The complete, disjoint classification of one interval.
///
/// Each moved-mention component yields at most one group: a merge or split
/// group when the component is exactly that group's profile set, otherwise
/// a distribute when at least two of its profiles are nonempty on each side.
/// Components with neither (a profile renamed into a fresh identifier)
/// carry no correction.
pub fn classify_interval(before: &Snapshot, after: &Snapshot) -> Vec<RawGroup> {
    let diff = IntervalDiff::new(before, after);
    let merges = diff.merge_groups();
    let splits = diff.split_groups();
    let mut out = Vec::new();
    for comp in diff.components() {
        let merge = merges.iter().find(|(s, t)| {
            let mut all = s.clone();
            all.insert(*t);
            all == comp
        });
        if let Some((s, t)) = merge {
            out.push(merge_group(&diff, s, *t));
            continue;
        }
        let split = splits.iter().find(|(s, t)| {
            let mut all = t.clone();
            all.insert(*s);
            all == comp
        });
        if let Some((s, t)) = split {
            out.push(split_group(&diff, *s, t));
            continue;
        }
        if let Some(g) = distribute_group(&diff, &comp) {
            out.push(g);
        }
    }
    out
}

fn distribute_group(diff: &IntervalDiff<'_>, comp: &BTreeSet<usize>) -> Option<RawGroup> {
    let sources: BTreeSet<usize> = comp.iter().copied().filter(|&i| !diff.empty_before(i)).collect();
    let targets: BTreeSet<usize> = comp.iter().copied().filter(|&i| !diff.empty_after(i)).collect();
    (sources.len() >= 2 && targets.len() >= 2).then(|| RawGroup {
        t1: diff.before.date(),
        t2: diff.after.date(),
        kind: CorrectionKind::Distribute,
        sources: diff.ids(&sources),
        targets: diff.ids(&targets),
    })
}

/// Merge groups between `t1` and `t2` (sources → surviving target).
pub fn detect_merge_groups(history: &History, t1: Date, t2: Date) -> Result<Vec<RawGroup>, Error> {
    let (a, b) = observed_pair(history, t1, t2)?;
    Ok(merge_groups_between(a, b))
}

/// Split groups between `t1` and `t2` (source → targets).
pub fn detect_split_groups(history: &History, t1: Date, t2: Date) -> Result<Vec<RawGroup>, Error> {
    let (a, b) = observed_pair(history, t1, t2)?;
    Ok(split_groups_between(a, b))
}

/// Distribute groups between `t1` and `t2`: the components not already
/// accounted for by a merge or split group.
pub fn detect_distributes(history: &History, t1: Date, t2: Date) -> Result<Vec<RawGroup>, Error> {
    let (a, b) = observed_pair(history, t1, t2)?;
    Ok(classify_interval(a, b).into_iter().filter(|g| g.kind == CorrectionKind::Distribute).collect())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::model::{DocumentRecord, Signature, SnapshotBuilder};
    use alloc::format;

    pub fn d(s: &str) -> Date {
        s.parse().unwrap()
    }

    /// Documents m1..m9, one author slot each; mention `mN` is slot 0 of document `mN`.
    pub fn snap(date: &str, profiles: &[(&str, &[&str])]) -> Snapshot {
        let mut b = SnapshotBuilder::new(d(date));
        for i in 1..10 {
            let mut r = DocumentRecord::new(format!("m{i}").as_str(), "T", 2000);
            r.authors.push(Arc::from("N"));
            b.add_document(r).unwrap();
        }
        for (id, ms) in profiles {
            let sigs = ms.iter().map(|m| Signature::new(MentionKey::author(m, 0), "N"));
            b.add_profile(Profile::from_signatures(*id, sigs).unwrap()).unwrap();
        }
        b.build().unwrap()
    }

    pub fn history(snaps: Vec<Snapshot>) -> History {
        History::new(snaps).unwrap()
    }

    pub fn ids(xs: &[&str]) -> BTreeSet<ProfileId> {
        xs.iter().map(|x| ProfileId::from(*x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use alloc::vec;

    const T1: &str = "2017-01-01";
    const T2: &str = "2017-01-02";

    fn pair(a: Snapshot, b: Snapshot) -> History {
        history(vec![a, b])
    }

    #[test]
    fn unchanged_profile_is_its_own_predecessor_and_successor() {
        let h = pair(snap(T1, &[("A", &["m1"])]), snap(T2, &[("A", &["m1"])]));
        assert_eq!(reference_predecessors(&h, "A", d(T1), d(T2)).unwrap(), ids(&["A"]));
        assert_eq!(reference_successors(&h, "A", d(T1), d(T2)).unwrap(), ids(&["A"]));
    }

    #[test]
    fn predecessors_of_merged_profile() {
        let h = pair(snap(T1, &[("A", &["m1"]), ("B", &["m2"])]), snap(T2, &[("A", &["m1", "m2"])]));
        assert_eq!(reference_predecessors(&h, "A", d(T1), d(T2)).unwrap(), ids(&["A", "B"]));
    }

    #[test]
    fn successors_of_split_profile() {
        let h = pair(snap(T1, &[("A", &["m1", "m2"])]), snap(T2, &[("A", &["m1"]), ("C", &["m2"])]));
        assert_eq!(reference_successors(&h, "A", d(T1), d(T2)).unwrap(), ids(&["A", "C"]));
    }

    #[test]
    fn empty_profiles_have_no_relatives() {
        let h = pair(snap(T1, &[("A", &[]), ("B", &["m1"])]), snap(T2, &[("A", &[]), ("B", &["m1"])]));
        assert!(reference_predecessors(&h, "A", d(T1), d(T2)).unwrap().is_empty());
        assert!(reference_successors(&h, "A", d(T1), d(T2)).unwrap().is_empty());
        assert!(reference_predecessors(&h, "Z", d(T1), d(T2)).unwrap().is_empty());
    }

    #[test]
    fn consistent_predecessor_cases() {
        let h = pair(snap(T1, &[("A", &["m1", "m2"]), ("E", &[])]), snap(T2, &[("A", &["m1"]), ("B", &["m2"])]));
        assert!(is_consistent_predecessor(&h, "E", d(T1), "B", d(T2)).unwrap());
        assert!(is_consistent_predecessor(&h, "Q", d(T1), "B", d(T2)).unwrap());
        assert!(!is_consistent_predecessor(&h, "A", d(T1), "A", d(T2)).unwrap());
        let same = pair(snap(T1, &[("A", &["m1"])]), snap(T2, &[("A", &["m1"])]));
        assert!(is_consistent_predecessor(&same, "A", d(T1), "A", d(T2)).unwrap());
    }

    #[test]
    fn unobserved_or_reversed_times_are_errors() {
        let h = pair(snap(T1, &[]), snap(T2, &[]));
        assert!(matches!(reference_predecessors(&h, "A", d(T1), d("2017-02-01")), Err(Error::UnobservedTime(_))));
        assert!(matches!(reference_successors(&h, "A", d(T2), d(T1)), Err(Error::InvalidInterval(..))));
        assert!(matches!(detect_merge_groups(&h, d(T1), d(T1)), Err(Error::InvalidInterval(..))));
        assert!(is_consistent_predecessor(&h, "A", d("2016-01-01"), "A", d(T2)).is_err());
    }

    #[test]
    fn merge_group_detected() {
        let h = pair(snap(T1, &[("A", &["m1"]), ("B", &["m2"])]), snap(T2, &[("A", &["m1", "m2"]), ("B", &[])]));
        let g = detect_merge_groups(&h, d(T1), d(T2)).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].sources, ids(&["A", "B"]));
        assert_eq!(g[0].targets, ids(&["A"]));
        assert!(detect_distributes(&h, d(T1), d(T2)).unwrap().is_empty());
    }

    #[test]
    fn no_merge_when_other_predecessor_survives() {
        let h = pair(
            snap(T1, &[("A", &["m1"]), ("B", &["m2"])]),
            snap(T2, &[("A", &["m1", "m2"]), ("B", &["m3"])]),
        );
        assert!(detect_merge_groups(&h, d(T1), d(T2)).unwrap().is_empty());
    }

    #[test]
    fn split_group_detected() {
        let h = pair(snap(T1, &[("A", &["m1", "m2"])]), snap(T2, &[("A", &["m1"]), ("C", &["m2"])]));
        let g = detect_split_groups(&h, d(T1), d(T2)).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].sources, ids(&["A"]));
        assert_eq!(g[0].targets, ids(&["A", "C"]));
    }

    #[test]
    fn distribute_detected() {
        let h = pair(
            snap(T1, &[("A", &["m1", "m2"]), ("B", &["m3"])]),
            snap(T2, &[("A", &["m1"]), ("B", &["m2", "m3"])]),
        );
        let g = detect_distributes(&h, d(T1), d(T2)).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].sources, ids(&["A", "B"]));
        assert_eq!(g[0].targets, ids(&["A", "B"]));
        assert!(detect_merge_groups(&h, d(T1), d(T2)).unwrap().is_empty());
        assert!(detect_split_groups(&h, d(T1), d(T2)).unwrap().is_empty());
    }

    #[test]
    fn identical_snapshots_yield_nothing() {
        let s = snap(T1, &[("A", &["m1", "m2"]), ("B", &["m3"])]);
        let h = pair(s.clone(), s.with_date(d(T2)));
        assert!(detect_merge_groups(&h, d(T1), d(T2)).unwrap().is_empty());
        assert!(detect_split_groups(&h, d(T1), d(T2)).unwrap().is_empty());
        assert!(detect_distributes(&h, d(T1), d(T2)).unwrap().is_empty());
    }

    #[test]
    fn surface_change_alone_is_not_a_correction() {
        let a = snap(T1, &[("A", &["m1"])]);
        let mut b = crate::model::SnapshotBuilder::new(d(T2));
        for doc in a.documents() {
            b.add_document(doc.clone()).unwrap();
        }
        b.add_profile(
            Profile::from_signatures("A", [crate::model::Signature::new(MentionKey::author("m1", 0), "Other")])
                .unwrap(),
        )
        .unwrap();
        let h = pair(a.clone(), b.build().unwrap());
        assert!(classify_interval(&h.snapshots()[0], &h.snapshots()[1]).is_empty());
    }

    #[test]
    fn rename_is_not_a_correction() {
        let a = snap(T1, &[("A", &["m1", "m2"])]);
        let b = snap(T2, &[("A2", &["m1", "m2"])]);
        assert!(classify_interval(&a, &b).is_empty());
    }

    #[test]
    fn merge_into_fresh_profile() {
        let a = snap(T1, &[("A", &["m1"]), ("B", &["m2"])]);
        let b = snap(T2, &[("N", &["m1", "m2"])]);
        let g = classify_interval(&a, &b);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].kind, CorrectionKind::Merge);
        assert_eq!(g[0].sources, ids(&["A", "B"]));
        assert_eq!(g[0].targets, ids(&["N"]));
    }

    #[test]
    fn coalesced_merge_and_distribute_is_one_distribute() {
        // p3 merged into p1 while m2 moves from p1 to p2
        let a = snap(T1, &[("p1", &["m1", "m2"]), ("p2", &["m4"]), ("p3", &["m3"])]);
        let b = snap(T2, &[("p1", &["m1", "m3"]), ("p2", &["m2", "m4"])]);
        let g = classify_interval(&a, &b);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].kind, CorrectionKind::Distribute);
        assert_eq!(g[0].sources, ids(&["p1", "p2", "p3"]));
        assert_eq!(g[0].targets, ids(&["p1", "p2"]));
    }

    #[test]
    fn new_mentions_do_not_create_groups() {
        let a = snap(T1, &[("A", &["m1"])]);
        let b = snap(T2, &[("A", &["m1", "m2"]), ("B", &["m3"])]);
        assert!(classify_interval(&a, &b).is_empty());
    }

    #[test]
    fn merge_reversed_is_split() {
        let a = snap(T1, &[("A", &["m1"]), ("B", &["m2"])]);
        let b = snap(T2, &[("A", &["m1", "m2"])]);
        let h = pair(a, b);
        let r = h.time_reversed();
        let merges = detect_merge_groups(&h, d(T1), d(T2)).unwrap();
        let splits = detect_split_groups(&r, d(T1), d(T2)).unwrap();
        assert_eq!(splits, merges.iter().map(RawGroup::reversed).collect::<Vec<_>>());
    }
}
