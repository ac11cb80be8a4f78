mod common;

use std::sync::Arc;

use common::*;
use corrhist::annotation_xml::{parse_annotation_set, serialize_annotation_set};
use corrhist::graph_xml::{parse_case_graph, serialize_case_graph};
use corrhist::ingest::{
    load_history, load_history_dir, parse_snapshot, snapshot_bytes, snapshot_files, write_history, SnapshotFile,
};
use corrhist::Error;
use corrhist_core::{generate, GeneratorConfig, IntervalPlan, Profile, Signature, SnapshotBuilder};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snapshot_round_trip(seed in any::<u64>()) {
        let s = random_snapshot(&mut ChaCha8Rng::seed_from_u64(seed), d("2019-03-04"));
        let bytes = snapshot_bytes(&s);
        let back = parse_snapshot(&bytes[..]).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(snapshot_bytes(&back), bytes);
    }

    #[test]
    fn case_graph_round_trip(seed in any::<u64>()) {
        let g = random_case_graph(&mut ChaCha8Rng::seed_from_u64(seed));
        let bytes = serialize_case_graph(&g);
        prop_assert_eq!(parse_case_graph(&bytes[..]).unwrap(), g);
    }

    #[test]
    fn annotation_round_trip(seed in any::<u64>()) {
        let set = random_annotation_set(&mut ChaCha8Rng::seed_from_u64(seed));
        let bytes = serialize_annotation_set(&set);
        prop_assert_eq!(parse_annotation_set(&bytes[..]).unwrap(), set);
    }

    /// Insertion order of records never shows in the output.
    #[test]
    fn bytes_independent_of_record_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_snapshot(&mut rng, d("2019-03-04"));
        let mut docs: Vec<_> = s.documents().cloned().collect();
        let mut profiles: Vec<Profile> = s.profiles().cloned().collect();
        let mut venues: Vec<_> = s.venues().map(|(k, n)| (k.clone(), n.to_owned())).collect();
        docs.shuffle(&mut rng);
        profiles.shuffle(&mut rng);
        venues.shuffle(&mut rng);
        let mut b = SnapshotBuilder::new(s.date());
        for (k, n) in venues {
            b.add_venue(k, &n).unwrap();
        }
        for r in docs {
            b.add_document(r).unwrap();
        }
        for p in profiles {
            let mut sigs: Vec<Signature> = p.signatures().collect();
            sigs.shuffle(&mut rng);
            b.add_profile(Profile::from_signatures(p.id().clone(), sigs).unwrap()).unwrap();
        }
        prop_assert_eq!(snapshot_bytes(&b.build().unwrap()), snapshot_bytes(&s));
    }
}

fn small_history(seed: u64) -> corrhist_core::History {
    let plan = IntervalPlan { merges: 1, splits: 1, distributes: 1, renames: 1, new_publications: 3 };
    let cfg = GeneratorConfig { plan: vec![plan; 3], ..GeneratorConfig::quiet(seed, 60, 200, 4) };
    generate(&cfg).unwrap().0
}

#[test]
fn generated_history_survives_files() {
    for gzip in [false, true] {
        let h = small_history(5);
        let dir = tempfile::tempdir().unwrap();
        write_history(&h, dir.path(), gzip).unwrap();
        let back = load_history_dir(dir.path()).unwrap();
        assert_eq!(back, h);
        // unchanged records are shared between consecutive snapshots
        let (a, b) = (&back.snapshots()[0], &back.snapshots()[1]);
        let shared = a
            .documents()
            .filter(|r| b.document(&r.key).is_some_and(|x| std::ptr::eq(x, *r)))
            .count();
        assert!(shared > a.document_count() / 2, "{shared} of {}", a.document_count());
    }
}

#[test]
fn out_of_order_files_are_rejected() {
    let h = small_history(6);
    let dir = tempfile::tempdir().unwrap();
    let paths = write_history(&h, dir.path(), false).unwrap();
    let mut files: Vec<SnapshotFile> = paths.iter().map(SnapshotFile::new).collect();
    files.swap(1, 2);
    match load_history(&files) {
        Err(Error::NonMonotone { first, second }) => {
            assert_eq!(first.1, paths[2]);
            assert_eq!(second.1, paths[1]);
        }
        other => panic!("expected a monotonicity error, got {other:?}"),
    }
    // a file whose name disagrees with its header
    let renamed = dir.path().join("2030-01-01.xml");
    std::fs::copy(&paths[0], &renamed).unwrap();
    let err = load_history(&[SnapshotFile::new(&renamed)]).unwrap_err();
    assert!(matches!(err.root(), Error::DateMismatch { .. }), "{err}");
    assert!(err.to_string().contains("2030-01-01.xml"), "{err}");
}

#[test]
fn directory_listing() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(snapshot_files(dir.path()), Err(Error::NoSnapshots(_))));
    std::fs::write(dir.path().join("notes.txt"), "x").unwrap();
    std::fs::write(dir.path().join("2017-01-02.xml"), "<snapshot date=\"2017-01-02\"/>").unwrap();
    std::fs::write(dir.path().join("2017-01-01.xml"), "<snapshot date=\"2017-01-01\"/>").unwrap();
    let files = snapshot_files(dir.path()).unwrap();
    let names: Vec<_> = files.iter().map(|f| f.path.file_name().unwrap().to_str().unwrap().to_owned()).collect();
    assert_eq!(names, ["2017-01-01.xml", "2017-01-02.xml"]);
    assert_eq!(load_history(&files).unwrap().len(), 2);
}

#[test]
fn shared_surfaces_after_parse() {
    let h = small_history(7);
    let s = &h.snapshots()[0];
    let back = parse_snapshot(&snapshot_bytes(s)[..]).unwrap();
    // surfaces equal to the document's name reuse the document's string
    let p = back.profiles().next().unwrap();
    let (k, surface) = p.iter().next().unwrap();
    let name = &back.document(&k.document).unwrap().names(k.role)[k.position as usize];
    if name == surface {
        assert!(Arc::ptr_eq(name, surface));
    }
}
