//! Tab-separated outputs: extracted cases, ground-truth logs, reports.

use std::io::{BufRead, Write};

use corrhist_core::annotation::case_ids;
use corrhist_core::blocking::BlockingRow;
use corrhist_core::generator::{Edit, GroundTruthLog};
use corrhist_core::{BlockingVariant, CorrectionCase, KindCounts};

use crate::error::{Error, Result};

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub const CASES_HEADER: &str = "case_id\tkind\tt_before\tt_after\tsources\ttargets\tmoved\tnew\tchained_from";

/// One line per case; profile lists are comma-separated.
pub fn write_cases<W: Write>(cases: &[CorrectionCase], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CASES_HEADER}")?;
    for (c, id) in cases.iter().zip(case_ids(cases)) {
        writeln!(
            w,
            "{id}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.kind,
            c.t_before,
            c.t_after,
            join(c.source_profiles.keys()),
            join(c.target_profiles.keys()),
            c.moved_mentions().len(),
            c.new_mentions.len(),
            c.chained_from.join(",")
        )?;
    }
    Ok(())
}

pub fn counts_line(counts: &KindCounts) -> String {
    format!(
        "{} (merge {}, split {}, distribute {})",
        counts.total(),
        counts.merge,
        counts.split,
        counts.distribute
    )
}

pub const LOG_HEADER: &str = "interval\tkind\tprofiles\tmentions";

/// The generator log: interval index, edit kind, affected profiles and
/// moved (or, for publications, added) mentions as `pkey#pos` /
/// `pkey#e<pos>`.
pub fn write_log<W: Write>(log: &GroundTruthLog, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{LOG_HEADER}")?;
    for r in &log.records {
        let profiles = match &r.edit {
            // survivor first, as in the edit itself
            Edit::Merge { survivor, absorbed, .. } => join(std::iter::once(survivor).chain(absorbed)),
            _ => join(r.profiles()),
        };
        writeln!(w, "{}\t{}\t{}\t{}", r.interval, r.kind(), profiles, join(&r.mentions))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRow {
    pub interval: usize,
    pub kind: String,
    pub profiles: Vec<String>,
    pub mentions: Vec<String>,
}

pub fn read_log<R: BufRead>(r: R) -> Result<Vec<LogRow>> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let bad = |message: &str| Error::Tsv { line: i + 1, message: message.into() };
        if i == 0 {
            if line != LOG_HEADER {
                return Err(bad("unexpected header"));
            }
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let list = |s: &str| if s.is_empty() { Vec::new() } else { s.split(',').map(str::to_owned).collect() };
        rows.push(LogRow {
            interval: f[0].parse().map_err(|_| bad("bad interval"))?,
            kind: f[1].to_owned(),
            profiles: list(f[2]),
            mentions: list(f[3]),
        });
    }
    Ok(rows)
}

/// The hit-rate table; empty subsets print `-`.
pub fn write_blocking<W: Write>(rows: &[BlockingRow], mut w: W) -> std::io::Result<()> {
    write!(w, "subset\tpairs")?;
    for v in BlockingVariant::ALL {
        write!(w, "\t{}", v.column_name())?;
    }
    writeln!(w)?;
    for r in rows {
        write!(w, "{}\t{}", r.subset, r.pairs)?;
        for rate in r.rates {
            match rate {
                Some(x) => write!(w, "\t{:.2}%", x * 100.0)?,
                None => write!(w, "\t-")?,
            }
        }
        writeln!(w)?;
    }
    Ok(())
}
