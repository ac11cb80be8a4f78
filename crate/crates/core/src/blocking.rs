//! Name-based blocking keys and their hit rates on corrected name pairs.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::chain::CorrectionCase;
use crate::error::Error;
use crate::extract::CorrectionKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeyScheme {
    /// Final whitespace-separated token.
    LastOnly,
    /// First character of the first token, ". ", final token.
    InitialLast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseMode {
    ConsiderCase,
    IgnoreCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockingVariant {
    pub scheme: KeyScheme,
    pub case_mode: CaseMode,
}

impl BlockingVariant {
    pub const fn new(scheme: KeyScheme, case_mode: CaseMode) -> Self {
        BlockingVariant { scheme, case_mode }
    }

    /// Report column order: consider case (initial+last, last), then ignore
    /// case (initial+last, last).
    pub const ALL: [BlockingVariant; 4] = [
        BlockingVariant::new(KeyScheme::InitialLast, CaseMode::ConsiderCase),
        BlockingVariant::new(KeyScheme::LastOnly, CaseMode::ConsiderCase),
        BlockingVariant::new(KeyScheme::InitialLast, CaseMode::IgnoreCase),
        BlockingVariant::new(KeyScheme::LastOnly, CaseMode::IgnoreCase),
    ];

    pub fn column_name(self) -> &'static str {
        match (self.case_mode, self.scheme) {
            (CaseMode::ConsiderCase, KeyScheme::InitialLast) => "consider_case_initial_last",
            (CaseMode::ConsiderCase, KeyScheme::LastOnly) => "consider_case_last",
            (CaseMode::IgnoreCase, KeyScheme::InitialLast) => "ignore_case_initial_last",
            (CaseMode::IgnoreCase, KeyScheme::LastOnly) => "ignore_case_last",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyOptions {
    /// Drop a trailing 4-digit homonym number ("Wei Wang 0050").
    pub strip_suffix: bool,
}

impl Default for KeyOptions {
    fn default() -> Self {
        KeyOptions { strip_suffix: true }
    }
}

fn is_homonym_number(token: &str) -> bool {
    token.len() == 4 && token.bytes().all(|b| b.is_ascii_digit())
}

pub fn blocking_key(surface: &str, variant: BlockingVariant) -> Result<String, Error> {
    blocking_key_with(surface, variant, KeyOptions::default())
}

pub fn blocking_key_with(surface: &str, variant: BlockingVariant, opts: KeyOptions) -> Result<String, Error> {
    let mut tokens: Vec<&str> = surface.split_whitespace().collect();
    if opts.strip_suffix && tokens.last().is_some_and(|t| is_homonym_number(t)) {
        tokens.pop();
    }
    let (first, last) = match (tokens.first(), tokens.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(Error::EmptyBlockingKey(surface.to_string())),
    };
    let mut key = match variant.scheme {
        KeyScheme::LastOnly => last.to_string(),
        KeyScheme::InitialLast => {
            let initial = first.chars().next().expect("tokens are non-empty");
            let mut k = String::with_capacity(last.len() + 4);
            k.push(initial);
            k.push_str(". ");
            k.push_str(last);
            k
        }
    };
    if variant.case_mode == CaseMode::IgnoreCase {
        key = key.to_lowercase();
    }
    Ok(key)
}

/// Unordered name pairs of the merge and distribute cases.
///
/// Each involved profile is represented by its most frequent surface at
/// `t_before`; every pair of distinct profiles contributes one pair, so a
/// three-profile merge yields three pairs. Splits contribute nothing.
pub fn name_pairs(cases: &[CorrectionCase]) -> Vec<(Arc<str>, Arc<str>)> {
    let mut out = Vec::new();
    for c in cases.iter().filter(|c| c.kind != CorrectionKind::Split) {
        let names: Vec<&Arc<str>> = c.source_profiles.values().filter_map(|p| p.modal_surface()).collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                out.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    out
}

/// Fraction of pairs whose keys coincide.
pub fn hit_rate<S: AsRef<str>>(pairs: &[(S, S)], variant: BlockingVariant) -> Result<f64, Error> {
    hit_rate_with(pairs, variant, KeyOptions::default())
}

pub fn hit_rate_with<S: AsRef<str>>(pairs: &[(S, S)], variant: BlockingVariant, opts: KeyOptions) -> Result<f64, Error> {
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let mut hits = 0usize;
    for (a, b) in pairs {
        if blocking_key_with(a.as_ref(), variant, opts)? == blocking_key_with(b.as_ref(), variant, opts)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / pairs.len() as f64)
}

/// One row of the blocking report.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockingRow {
    pub subset: String,
    pub pairs: usize,
    /// Hit rates in [`BlockingVariant::ALL`] order; `None` when there are no pairs.
    pub rates: [Option<f64>; 4],
}

/// Rows for merge+distribute, merge only and distribute only.
pub fn blocking_report(cases: &[CorrectionCase], opts: KeyOptions) -> Result<Vec<BlockingRow>, Error> {
    let subsets: [(&str, &[CorrectionKind]); 3] = [
        ("merge+distribute", &[CorrectionKind::Merge, CorrectionKind::Distribute]),
        ("merge", &[CorrectionKind::Merge]),
        ("distribute", &[CorrectionKind::Distribute]),
    ];
    let mut rows = Vec::new();
    for (name, kinds) in subsets {
        let selected: Vec<CorrectionCase> = cases.iter().filter(|c| kinds.contains(&c.kind)).cloned().collect();
        let pairs = name_pairs(&selected);
        let mut rates = [None; 4];
        if !pairs.is_empty() {
            for (slot, v) in rates.iter_mut().zip(BlockingVariant::ALL) {
                *slot = Some(hit_rate_with(&pairs, v, opts)?);
            }
        }
        rows.push(BlockingRow { subset: name.into(), pairs: pairs.len(), rates });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::extract_corrections;
    use crate::model::{DocumentRecord, History, MentionKey, Profile, Signature, SnapshotBuilder};
    use alloc::vec;

    const LAST: BlockingVariant = BlockingVariant::new(KeyScheme::LastOnly, CaseMode::ConsiderCase);
    const INIT: BlockingVariant = BlockingVariant::new(KeyScheme::InitialLast, CaseMode::ConsiderCase);
    const INIT_LC: BlockingVariant = BlockingVariant::new(KeyScheme::InitialLast, CaseMode::IgnoreCase);

    #[test]
    fn worked_keys() {
        assert_eq!(blocking_key("John Doe", LAST).unwrap(), "Doe");
        assert_eq!(blocking_key("John A. Doe", INIT).unwrap(), "J. Doe");
        assert_eq!(blocking_key("Wei Wang 0050", INIT_LC).unwrap(), "w. wang");
    }

    #[test]
    fn suffix_strip_is_a_switch() {
        let keep = KeyOptions { strip_suffix: false };
        assert_eq!(blocking_key_with("Wei Wang 0050", LAST, keep).unwrap(), "0050");
        assert_eq!(blocking_key("Wei Wang 0050", LAST).unwrap(), "Wang");
        // only exactly four digits count as a homonym number
        assert_eq!(blocking_key("Louis 14", LAST).unwrap(), "14");
    }

    #[test]
    fn empty_after_stripping_is_an_error() {
        assert!(matches!(blocking_key("0050", LAST), Err(Error::EmptyBlockingKey(_))));
        assert!(matches!(blocking_key("   ", INIT), Err(Error::EmptyBlockingKey(_))));
    }

    #[test]
    fn single_token_names() {
        assert_eq!(blocking_key("Madonna", INIT).unwrap(), "M. Madonna");
        assert_eq!(blocking_key("Madonna", LAST).unwrap(), "Madonna");
    }

    #[test]
    fn hit_rate_examples() {
        let pairs = [("J. Doe", "John Doe"), ("Bob Smith", "Robert Smith")];
        assert_eq!(hit_rate(&pairs, INIT).unwrap(), 0.5);
        let same = [("A B", "A B"), ("x", "x")];
        assert_eq!(hit_rate(&same, INIT).unwrap(), 1.0);
        let none: [(&str, &str); 0] = [];
        assert_eq!(hit_rate(&none, INIT), Err(Error::NoPairs));
    }

    fn history_with_merge(names: &[&str]) -> History {
        let mut snaps = Vec::new();
        for (i, date) in ["2017-01-01", "2017-01-02"].iter().enumerate() {
            let mut b = SnapshotBuilder::new(date.parse().unwrap());
            for (j, n) in names.iter().enumerate() {
                let mut r = DocumentRecord::new(alloc::format!("d{j}").as_str(), "T", 2000);
                r.authors.push(Arc::from(*n));
                b.add_document(r).unwrap();
            }
            if i == 0 {
                for (j, n) in names.iter().enumerate() {
                    let id = alloc::format!("p{j}");
                    let key = MentionKey::author(&alloc::format!("d{j}"), 0);
                    b.add_profile(Profile::from_signatures(id.as_str(), [Signature::new(key, *n)]).unwrap()).unwrap();
                }
            } else {
                let sigs = names
                    .iter()
                    .enumerate()
                    .map(|(j, n)| Signature::new(MentionKey::author(&alloc::format!("d{j}"), 0), *n));
                b.add_profile(Profile::from_signatures("p0", sigs).unwrap()).unwrap();
            }
            snaps.push(b.build().unwrap());
        }
        History::new(snaps).unwrap()
    }

    #[test]
    fn pairs_from_merge_cases() {
        let h = history_with_merge(&["J. Doe", "John Doe"]);
        let cases = extract_corrections(&h).unwrap();
        let pairs = name_pairs(&cases);
        assert_eq!(pairs, vec![(Arc::from("J. Doe"), Arc::from("John Doe"))]);

        let h = history_with_merge(&["J. Doe", "John Doe", "Johnny Doe"]);
        assert_eq!(name_pairs(&extract_corrections(&h).unwrap()).len(), 3);
    }

    #[test]
    fn report_has_three_rows() {
        let h = history_with_merge(&["J. Doe", "John Doe"]);
        let rows = blocking_report(&extract_corrections(&h).unwrap(), KeyOptions::default()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].rates, [Some(1.0); 4]);
        assert_eq!(rows[2].pairs, 0);
        assert_eq!(rows[2].rates, [None; 4]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn name() -> impl Strategy<Value = String> {
            proptest::collection::vec("[A-Za-zÄäÉé.\\-]{1,6}", 1..4).prop_map(|t| t.join(" "))
        }

        proptest! {
            #[test]
            fn coarser_keys_never_lose_hits(pairs in proptest::collection::vec((name(), name()), 1..20)) {
                for mode in [CaseMode::ConsiderCase, CaseMode::IgnoreCase] {
                    let fine = hit_rate(&pairs, BlockingVariant::new(KeyScheme::InitialLast, mode)).unwrap();
                    let coarse = hit_rate(&pairs, BlockingVariant::new(KeyScheme::LastOnly, mode)).unwrap();
                    prop_assert!(coarse >= fine);
                }
                for scheme in [KeyScheme::LastOnly, KeyScheme::InitialLast] {
                    let fine = hit_rate(&pairs, BlockingVariant::new(scheme, CaseMode::ConsiderCase)).unwrap();
                    let coarse = hit_rate(&pairs, BlockingVariant::new(scheme, CaseMode::IgnoreCase)).unwrap();
                    prop_assert!(coarse >= fine);
                    prop_assert!((0.0..=1.0).contains(&fine));
                }
            }

            #[test]
            fn last_only_key_is_idempotent(n in name()) {
                for mode in [CaseMode::ConsiderCase, CaseMode::IgnoreCase] {
                    let v = BlockingVariant::new(KeyScheme::LastOnly, mode);
                    let k = blocking_key(&n, v).unwrap();
                    prop_assert_eq!(blocking_key(&k, v).unwrap(), k);
                }
            }
        }
    }
}
