//! Heap use of streaming and of history loading, measured with a counting
//! allocator. Lives in its own test binary because the allocator is global;
//! the tests take a lock so measurements do not overlap.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use corrhist::ingest::{parse_snapshot, parse_snapshot_with_base, snapshot_bytes, SnapshotReader};
use corrhist_core::{generate, GeneratorConfig, IntervalPlan};

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);
static LOCK: Mutex<()> = Mutex::new(());

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

/// Extra bytes held at the high-water mark while `f` runs.
fn peak_during<T>(f: impl FnOnce() -> T) -> (T, usize) {
    let base = CURRENT.load(Ordering::Relaxed);
    PEAK.store(base, Ordering::Relaxed);
    let out = f();
    (out, PEAK.load(Ordering::Relaxed) - base)
}

fn snapshot_file(scale: usize) -> Vec<u8> {
    let cfg = GeneratorConfig::quiet(3, 1_000 * scale, 5_000 * scale, 2);
    let (h, _) = generate(&cfg).unwrap();
    snapshot_bytes(h.first())
}

#[test]
fn streaming_peak_does_not_grow_with_input() {
    let _g = LOCK.lock().unwrap();
    let small = snapshot_file(1);
    let large = snapshot_file(10);
    let count = |bytes: &[u8]| {
        let mut n = 0;
        for record in SnapshotReader::open(bytes).unwrap() {
            record.unwrap();
            n += 1;
        }
        n
    };
    let (n1, p1) = peak_during(|| count(&small));
    let (n10, p10) = peak_during(|| count(&large));
    eprintln!("streaming peak: {p1} bytes ({n1} records), {p10} bytes ({n10} records)");
    assert!(n10 > 9 * n1, "{n1} vs {n10} records");
    // records are dropped as they are read: the peak is the parser's
    // buffers plus one record, whatever the file size
    assert!(p10 < 2 * p1 + 4096, "peak {p1} bytes on 1x, {p10} bytes on 10x");
    assert!(p10 < large.len() / 20, "peak {p10} bytes on a {} byte file", large.len());
}

#[test]
fn consecutive_snapshots_share_unchanged_records() {
    let _g = LOCK.lock().unwrap();
    let plan = IntervalPlan { merges: 3, splits: 2, distributes: 2, renames: 2, new_publications: 20 };
    let cfg = GeneratorConfig { plan: vec![plan], ..GeneratorConfig::quiet(4, 2_000, 10_000, 2) };
    let (h, _) = generate(&cfg).unwrap();
    let first = parse_snapshot(&snapshot_bytes(&h.snapshots()[0])[..]).unwrap();
    let second = snapshot_bytes(&h.snapshots()[1]);

    let base = CURRENT.load(Ordering::Relaxed);
    let alone = parse_snapshot(&second[..]).unwrap();
    let alone_bytes = CURRENT.load(Ordering::Relaxed) - base;
    drop(alone);

    let base = CURRENT.load(Ordering::Relaxed);
    let shared = parse_snapshot_with_base(&second[..], Some(&first)).unwrap();
    let shared_bytes = CURRENT.load(Ordering::Relaxed).saturating_sub(base);
    eprintln!("second snapshot: {shared_bytes} bytes with base, {alone_bytes} bytes alone");
    assert_eq!(shared, h.snapshots()[1]);
    // the maps themselves are per snapshot; the records are shared
    assert!(shared_bytes * 4 < alone_bytes, "{shared_bytes} bytes shared vs {alone_bytes} alone");
}
