//! The two test collections: one graph pair per case, or a full snapshot
//! with annotations.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use corrhist_core::annotation::case_ids;
use corrhist_core::casegraph::{build_graph, OwnerIndex};
use corrhist_core::{extract_between, AnnotationSet, CorrectionCase, CorrectionKind, Date, History, KindCounts, ProfileId};

use crate::annotation_xml::write_annotation_set;
use crate::error::{Error, Result};
use crate::graph_xml::serialize_case_graph;
use crate::ingest::write_snapshot;
use crate::workers::Workers;

/// Environment variable naming a directory for staging output.
pub const TMPDIR_VAR: &str = "CORRHIST_TMPDIR";

pub const MANIFEST: &str = "manifest.tsv";
pub const MANIFEST_HEADER: &str = "case_id\tkind\tt_before\tt_after\tbefore\tafter";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub case_id: String,
    pub kind: CorrectionKind,
    pub t_before: Date,
    pub t_after: Date,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn counts(&self) -> KindCounts {
        KindCounts::tally(self.entries.iter().map(|e| e.kind))
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{MANIFEST_HEADER}")?;
        for e in &self.entries {
            writeln!(w, "{}\t{}\t{}\t{}\t{}\t{}", e.case_id, e.kind, e.t_before, e.t_after, e.before, e.after)?;
        }
        Ok(())
    }

    pub fn read(text: &str) -> Result<Manifest> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let bad = |message: &str| Error::Tsv { line: i + 1, message: message.into() };
            if i == 0 {
                if line != MANIFEST_HEADER {
                    return Err(bad("unexpected header"));
                }
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            entries.push(ManifestEntry {
                case_id: f[0].into(),
                kind: CorrectionKind::parse(f[1]).ok_or_else(|| bad("unknown kind"))?,
                t_before: f[2].parse().map_err(|_| bad("bad date"))?,
                t_after: f[3].parse().map_err(|_| bad("bad date"))?,
                before: f[4].into(),
                after: f[5].into(),
            });
        }
        Ok(Manifest { entries })
    }
}

/// A scratch directory whose files are moved into place at the end.
struct Staging {
    dir: tempfile::TempDir,
    out: PathBuf,
    files: Vec<String>,
}

impl Staging {
    fn new(out: &Path) -> Result<Self> {
        fs::create_dir_all(out).map_err(|e| Error::from(e).in_file(out))?;
        let base = std::env::var_os(TMPDIR_VAR).map(PathBuf::from).unwrap_or_else(|| out.to_path_buf());
        let dir = tempfile::Builder::new()
            .prefix(".corrhist-staging-")
            .tempdir_in(&base)
            .map_err(|e| Error::from(e).in_file(&base))?;
        Ok(Staging { dir, out: out.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.path().join(name);
        fs::write(&path, bytes).map_err(|e| Error::from(e).in_file(&path))?;
        self.files.push(name.to_owned());
        Ok(())
    }

    fn commit(self) -> Result<()> {
        for name in &self.files {
            let from = self.dir.path().join(name);
            let to = self.out.join(name);
            if fs::rename(&from, &to).is_err() {
                // different file system
                fs::copy(&from, &to).map_err(|e| Error::from(e).in_file(&to))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Before,
    After,
}

/// Writes `<case-id>-before.xml` and `<case-id>-after.xml` for every case
/// and a manifest. Cases must come from one history, in extraction order.
///
/// Walks the observation dates once with a single owner index that is
/// advanced from date to date, building every graph that needs that date's
/// assignment: before-graphs at `t_before`, after-graphs at `t_after`.
pub fn build_case_collection(
    cases: &[CorrectionCase],
    history: &History,
    out_dir: &Path,
    workers: &Workers,
) -> Result<Manifest> {
    let ids = case_ids(cases);
    let mut staging = Staging::new(out_dir)?;
    let file = |i: usize, side: Side| match side {
        Side::Before => format!("{}-before.xml", ids[i]),
        Side::After => format!("{}-after.xml", ids[i]),
    };

    let mut jobs: BTreeMap<Date, Vec<(usize, Side)>> = BTreeMap::new();
    for (i, c) in cases.iter().enumerate() {
        jobs.entry(c.t_before).or_default().push((i, Side::Before));
        jobs.entry(c.t_after).or_default().push((i, Side::After));
    }
    for &d in jobs.keys() {
        history.at(d)?;
    }
    let latest = history.latest();
    let mut index: Option<OwnerIndex<'_>> = None;
    for snapshot in history.snapshots() {
        let date = snapshot.date();
        if jobs.range(date..).next().is_none() {
            break;
        }
        match index.as_mut() {
            Some(ix) => ix.advance(snapshot),
            None if jobs.contains_key(&date) => index = Some(OwnerIndex::full(snapshot)),
            None => continue,
        }
        let (Some(todo), Some(ix)) = (jobs.get(&date), index.as_ref()) else { continue };
        let graphs = workers.map(todo, |&(i, side)| {
            let c = &cases[i];
            let profiles = match side {
                Side::Before => &c.source_profiles,
                Side::After => &c.target_profiles,
            };
            let primaries: BTreeSet<ProfileId> = profiles.keys().cloned().collect();
            let basis = history.at(c.t_before)?;
            build_graph(ix, &primaries, basis, latest).map(|g| serialize_case_graph(&g))
        });
        for (&(i, side), g) in todo.iter().zip(graphs) {
            staging.write(&file(i, side), &g?)?;
        }
    }
    drop(index);
    staging.commit()?;
    let entries = cases
        .iter()
        .enumerate()
        .map(|(i, c)| ManifestEntry {
            case_id: ids[i].clone(),
            kind: c.kind,
            t_before: c.t_before,
            t_after: c.t_after,
            before: file(i, Side::Before),
            after: file(i, Side::After),
        })
        .collect();
    let manifest = Manifest { entries };
    let path = out_dir.join(MANIFEST);
    let write = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(&path)?);
        manifest.write(&mut w)?;
        w.flush()
    };
    write().map_err(|e| Error::from(e).in_file(&path))?;
    Ok(manifest)
}

/// What an embedded collection contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedSummary {
    pub t1: Date,
    pub t2: Date,
    pub counts: KindCounts,
    pub snapshot_file: String,
    pub annotation_file: String,
}

pub const COALESCING_CAVEAT: &str =
    "corrections between t1 and t2 are observed only at their ends; one annotation may combine several corrections";

/// Writes the full `t1` snapshot, the annotations of every correction
/// visible between `t1` and `t2` alone, and a key/value manifest.
pub fn build_embedded_collection(
    history: &History,
    t1: Date,
    t2: Date,
    out_dir: &Path,
    workers: &Workers,
) -> Result<EmbeddedSummary> {
    if t1 >= t2 {
        return Err(corrhist_core::Error::InvalidInterval(t1, t2).into());
    }
    let snapshot = history.at(t1)?;
    history.at(t2)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::from(e).in_file(out_dir))?;
    let snapshot_file = format!("snapshot-{t1}.xml");
    let annotation_file = format!("annotations-{t1}-{t2}.xml");
    let snap_path = out_dir.join(&snapshot_file);
    let ann_path = out_dir.join(&annotation_file);
    let (written, annotated) = workers.join(
        || -> Result<()> {
            let f = File::create(&snap_path).map_err(|e| Error::from(e).in_file(&snap_path))?;
            write_snapshot(snapshot, f).map_err(|e| Error::from(e).in_file(&snap_path))
        },
        || -> Result<AnnotationSet> {
            let cases = extract_between(history, t1, t2)?;
            let set = AnnotationSet::from_cases(t1, t2, &cases);
            let mut w = BufWriter::new(File::create(&ann_path).map_err(|e| Error::from(e).in_file(&ann_path))?);
            write_annotation_set(&set, &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Error::from(e).in_file(&ann_path))?;
            Ok(set)
        },
    );
    written?;
    let set = annotated?;
    let counts = set.counts();
    let summary = EmbeddedSummary { t1, t2, counts, snapshot_file, annotation_file };
    let path = out_dir.join(MANIFEST);
    fs::write(&path, embedded_manifest(&summary)).map_err(|e| Error::from(e).in_file(&path))?;
    Ok(summary)
}

fn embedded_manifest(s: &EmbeddedSummary) -> String {
    let rows = [
        ("t1", s.t1.to_string()),
        ("t2", s.t2.to_string()),
        ("snapshot", s.snapshot_file.clone()),
        ("annotations", s.annotation_file.clone()),
        ("merge", s.counts.merge.to_string()),
        ("split", s.counts.split.to_string()),
        ("distribute", s.counts.distribute.to_string()),
        ("all", s.counts.total().to_string()),
        ("coalesced", COALESCING_CAVEAT.to_string()),
    ];
    let mut out = String::from("key\tvalue\n");
    for (k, v) in rows {
        out.push_str(&format!("{k}\t{v}\n"));
    }
    out
}
