//! Defect annotations for the embedded collection.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::chain::CorrectionCase;
use crate::date::Date;
use crate::extract::CorrectionKind;
use crate::model::{MentionKey, ProfileId, Signature, Snapshot};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AnnotatedSignature {
    pub signature: Signature,
    /// Only meaningful on the target side: the mention is held by none of
    /// the source profiles.
    pub new: bool,
}

/// Source (state at t1) and target (state at t2) of one detected defect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedAnnotation {
    pub case_id: String,
    pub kind: CorrectionKind,
    pub source: BTreeMap<ProfileId, Vec<AnnotatedSignature>>,
    pub target: BTreeMap<ProfileId, Vec<AnnotatedSignature>>,
}

impl EmbeddedAnnotation {
    pub fn from_case(case: &CorrectionCase, case_id: impl Into<String>) -> Self {
        let source = case
            .source_profiles
            .iter()
            .map(|(id, p)| (id.clone(), p.signatures().map(|signature| AnnotatedSignature { signature, new: false }).collect()))
            .collect();
        let target = case
            .target_profiles
            .iter()
            .map(|(id, p)| {
                let sigs = p
                    .signatures()
                    .map(|signature| {
                        let new = case.new_mentions.contains(&signature.key);
                        AnnotatedSignature { signature, new }
                    })
                    .collect();
                (id.clone(), sigs)
            })
            .collect();
        EmbeddedAnnotation { case_id: case_id.into(), kind: case.kind, source, target }
    }

    /// Both sides present, every signature list sorted by mention key.
    pub fn is_well_formed(&self) -> bool {
        let sorted = |m: &BTreeMap<ProfileId, Vec<AnnotatedSignature>>| {
            m.values().all(|v| v.windows(2).all(|w| w[0].signature.key < w[1].signature.key))
        };
        !self.source.is_empty() && !self.target.is_empty() && sorted(&self.source) && sorted(&self.target)
    }

    /// A single profile carried over unchanged: annotates nothing.
    pub fn is_degenerate(&self) -> bool {
        if self.source.len() != 1 || self.source.keys().ne(self.target.keys()) {
            return false;
        }
        let keys = |m: &BTreeMap<ProfileId, Vec<AnnotatedSignature>>| -> Vec<MentionKey> {
            m.values().flatten().map(|s| s.signature.key.clone()).collect()
        };
        keys(&self.source) == keys(&self.target)
    }
}

/// Every annotation of one embedded collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSet {
    pub t1: Date,
    pub t2: Date,
    pub annotations: Vec<EmbeddedAnnotation>,
}

impl AnnotationSet {
    pub fn from_cases(t1: Date, t2: Date, cases: &[CorrectionCase]) -> Self {
        let ids = case_ids(cases);
        let annotations = cases.iter().zip(ids).map(|(c, id)| EmbeddedAnnotation::from_case(c, id)).collect();
        AnnotationSet { t1, t2, annotations }
    }

    pub fn counts(&self) -> KindCounts {
        KindCounts::tally(self.annotations.iter().map(|a| a.kind))
    }

    /// Checks that every source-side mention resolves in the t1 snapshot
    /// and flags no-op annotations.
    pub fn validate(&self, snapshot: &Snapshot) -> ValidationReport {
        let mut report = ValidationReport::default();
        for a in &self.annotations {
            if !a.is_well_formed() {
                report.malformed.push(a.case_id.clone());
            }
            if a.is_degenerate() {
                report.degenerate.push(a.case_id.clone());
            }
            for sig in a.source.values().flatten() {
                let k = &sig.signature.key;
                let ok = snapshot
                    .document(k.document.as_str())
                    .is_some_and(|d| (k.position as usize) < d.names(k.role).len());
                if !ok {
                    report.dangling.push((a.case_id.clone(), k.clone()));
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub dangling: Vec<(String, MentionKey)>,
    pub degenerate: Vec<String>,
    pub malformed: Vec<String>,
}

impl ValidationReport {
    /// Degenerate annotations are reported but do not invalidate the set.
    pub fn is_valid(&self) -> bool {
        self.dangling.is_empty() && self.malformed.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KindCounts {
    pub merge: usize,
    pub split: usize,
    pub distribute: usize,
}

impl KindCounts {
    pub fn tally(kinds: impl IntoIterator<Item = CorrectionKind>) -> Self {
        let mut c = KindCounts::default();
        for k in kinds {
            match k {
                CorrectionKind::Merge => c.merge += 1,
                CorrectionKind::Split => c.split += 1,
                CorrectionKind::Distribute => c.distribute += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.merge + self.split + self.distribute
    }
}

/// `<kind>-<t_before>-<n>`, numbering cases of the same kind and start date
/// in output order.
pub fn case_ids(cases: &[CorrectionCase]) -> Vec<String> {
    let mut next: BTreeMap<(CorrectionKind, Date), usize> = BTreeMap::new();
    cases
        .iter()
        .map(|c| {
            let n = next.entry((c.kind, c.t_before)).or_default();
            let id = format!("{}-{}-{}", c.kind, c.t_before, n);
            *n += 1;
            id
        })
        .collect()
}

/// Involved profile ids of an annotation.
pub fn annotated_profiles(a: &EmbeddedAnnotation) -> BTreeSet<&ProfileId> {
    a.source.keys().chain(a.target.keys()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::extract_corrections;
    use crate::extract::fixtures::*;
    use alloc::vec;

    #[test]
    fn annotation_from_split_case() {
        let h = history(vec![
            snap("2017-01-01", &[("p1", &["m1", "m2"])]),
            snap("2018-01-01", &[("p1", &["m1"]), ("p2", &["m2", "m3"])]),
        ]);
        let cases = extract_corrections(&h).unwrap();
        let set = AnnotationSet::from_cases(d("2017-01-01"), d("2018-01-01"), &cases);
        let a = &set.annotations[0];
        assert_eq!(a.case_id, "split-2017-01-01-0");
        assert_eq!(a.source.len(), 1);
        assert_eq!(a.target.len(), 2);
        let p2 = &a.target[&ProfileId::from("p2")];
        assert_eq!(p2.iter().map(|s| s.new).collect::<Vec<_>>(), [false, true]);
        assert!(a.is_well_formed());
        assert!(!a.is_degenerate());
        assert!(set.validate(h.first()).is_valid());
        assert_eq!(set.counts(), KindCounts { merge: 0, split: 1, distribute: 0 });
    }

    #[test]
    fn identical_single_profile_is_degenerate() {
        let s = vec![AnnotatedSignature { signature: Signature::new(MentionKey::author("m1", 0), "X"), new: false }];
        let a = EmbeddedAnnotation {
            case_id: "x".into(),
            kind: CorrectionKind::Merge,
            source: [(ProfileId::from("A"), s.clone())].into(),
            target: [(ProfileId::from("A"), s)].into(),
        };
        assert!(a.is_degenerate());
        let set = AnnotationSet { t1: d("2017-01-01"), t2: d("2017-01-02"), annotations: vec![a] };
        let snap = snap("2017-01-01", &[]);
        let r = set.validate(&snap);
        assert!(r.is_valid());
        assert_eq!(r.degenerate, ["x"]);
    }

    #[test]
    fn dangling_source_mentions_reported() {
        let s = vec![AnnotatedSignature { signature: Signature::new(MentionKey::author("nope", 0), "X"), new: false }];
        let a = EmbeddedAnnotation {
            case_id: "x".into(),
            kind: CorrectionKind::Merge,
            source: [(ProfileId::from("A"), s.clone())].into(),
            target: [(ProfileId::from("B"), s)].into(),
        };
        let set = AnnotationSet { t1: d("2017-01-01"), t2: d("2017-01-02"), annotations: vec![a] };
        assert!(!set.validate(&snap("2017-01-01", &[])).is_valid());
    }
}
