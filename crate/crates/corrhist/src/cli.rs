//! The `corrhist` command line. Each subcommand only wires library calls
//! together.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use corrhist_core::blocking::blocking_report;
use corrhist_core::generator::{generate, GeneratorConfig, IntervalPlan};
use corrhist_core::{Date, History, KeyOptions, KindCounts};

use crate::collection::{build_case_collection, build_embedded_collection};
use crate::ingest::{load_history_with, snapshot_files, write_history};
use crate::tsv::{counts_line, write_blocking, write_cases, write_log};
use crate::workers::{extract_parallel, raw_groups_parallel, Workers};

#[derive(Parser, Debug)]
#[command(name = "corrhist", version, about = "Mine author-profile corrections from snapshot histories")]
pub struct Cli {
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    /// Worker threads for extraction and graph building (0 = all CPUs).
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    parallel: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic history and its ground-truth log.
    Generate(GenerateArgs),
    /// Extract correction cases into a TSV file.
    Extract {
        #[command(flatten)]
        input: Input,
        /// Output TSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one before/after graph pair per case plus a manifest.
    CaseCollection {
        #[command(flatten)]
        input: Input,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the t1 snapshot and annotations of corrections up to t2.
    Embedded {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        t1: Date,
        #[arg(long)]
        t2: Date,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Hit rates of the four blocking-key variants on merge/distribute pairs.
    Blocking {
        #[command(flatten)]
        input: Input,
        /// Keep trailing 4-digit homonym numbers in names.
        #[arg(long)]
        no_strip_suffix: bool,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-snapshot sizes and per-interval correction counts.
    Stats {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Directory of `*.xml` / `*.xml.gz` snapshot files, read in name order.
    #[arg(long, value_name = "DIR")]
    snapshots: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Desk,
    Stress,
    Quiet,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Output directory for snapshots and `ground-truth.tsv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "desk")]
    preset: Preset,
    #[arg(long)]
    persons: Option<usize>,
    #[arg(long)]
    documents: Option<usize>,
    /// Number of observations (snapshots), one day apart.
    #[arg(long)]
    observations: Option<usize>,
    /// Per-interval event counts; any of these replaces the preset plan.
    #[arg(long)]
    merges: Option<usize>,
    #[arg(long)]
    splits: Option<usize>,
    #[arg(long)]
    distributes: Option<usize>,
    #[arg(long)]
    renames: Option<usize>,
    #[arg(long)]
    publications: Option<usize>,
    /// Gzip the snapshot files.
    #[arg(long)]
    gzip: bool,
}

pub const GROUND_TRUTH: &str = "ground-truth.tsv";

impl GenerateArgs {
    fn config(&self) -> GeneratorConfig {
        let mut c = match self.preset {
            Preset::Desk => GeneratorConfig::desk(self.seed),
            Preset::Stress => GeneratorConfig::stress(self.seed),
            Preset::Quiet => GeneratorConfig::quiet(self.seed, 1_000, 5_000, 2),
        };
        c.persons = self.persons.unwrap_or(c.persons);
        c.documents = self.documents.unwrap_or(c.documents);
        if let Some(n) = self.observations {
            c.dates = c.dates[0].daily(n);
        }
        let base = c.plan.first().copied().unwrap_or_default();
        let per = IntervalPlan {
            merges: self.merges.unwrap_or(base.merges),
            splits: self.splits.unwrap_or(base.splits),
            distributes: self.distributes.unwrap_or(base.distributes),
            renames: self.renames.unwrap_or(base.renames),
            new_publications: self.publications.unwrap_or(base.new_publications),
        };
        c.plan = vec![per; c.intervals()];
        c
    }
}

struct Ctx {
    quiet: bool,
    workers: Workers,
    started: Instant,
}

impl Ctx {
    fn progress(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("[{:>6.1}s] {}", self.started.elapsed().as_secs_f64(), msg.as_ref());
        }
    }

    fn load(&self, input: &Input) -> anyhow::Result<History> {
        let files = snapshot_files(&input.snapshots)?;
        let n = files.len();
        let h = load_history_with(&files, |i, s| {
            self.progress(format!("loaded {}/{n}: {} ({} profiles, {} documents)", i + 1, s.date(), s.profile_count(), s.document_count()))
        })?;
        Ok(h)
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// exit status: 0 success, 1 validation or integrity error, 2 usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let ctx = Ctx { quiet: cli.quiet, workers: Workers::new(cli.parallel), started: Instant::now() };
    match execute(&ctx, cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(ctx: &Ctx, command: Command) -> anyhow::Result<()> {
    let stdout = std::io::stdout();
    match command {
        Command::Generate(args) => {
            let config = args.config();
            ctx.progress(format!(
                "generating {} persons, {} documents, {} observations",
                config.persons,
                config.documents,
                config.dates.len()
            ));
            let (history, log) = generate(&config)?;
            let paths = write_history(&history, &args.out, args.gzip)?;
            let mut w = create(&args.out.join(GROUND_TRUTH))?;
            write_log(&log, &mut w)?;
            w.flush()?;
            let counts = KindCounts::tally(log.corrections().filter_map(|r| r.kind().correction()));
            writeln!(stdout.lock(), "snapshots: {}; corrections: {}", paths.len(), counts_line(&counts))?;
        }
        Command::Extract { input, out } => {
            let history = ctx.load(&input)?;
            let cases = extract_parallel(&history, &ctx.workers)?;
            let mut w = create(&out)?;
            write_cases(&cases, &mut w)?;
            w.flush()?;
            let counts = KindCounts::tally(cases.iter().map(|c| c.kind));
            writeln!(stdout.lock(), "cases: {}", counts_line(&counts))?;
        }
        Command::CaseCollection { input, out } => {
            let history = ctx.load(&input)?;
            let cases = extract_parallel(&history, &ctx.workers)?;
            ctx.progress(format!("{} cases extracted", cases.len()));
            let manifest = build_case_collection(&cases, &history, &out, &ctx.workers)?;
            writeln!(stdout.lock(), "cases: {}", counts_line(&manifest.counts()))?;
        }
        Command::Embedded { input, t1, t2, out } => {
            let history = ctx.load(&input)?;
            let s = build_embedded_collection(&history, t1, t2, &out, &ctx.workers)?;
            writeln!(stdout.lock(), "annotations: {}", counts_line(&s.counts))?;
        }
        Command::Blocking { input, no_strip_suffix, out } => {
            let history = ctx.load(&input)?;
            let cases = extract_parallel(&history, &ctx.workers)?;
            let rows = blocking_report(&cases, KeyOptions { strip_suffix: !no_strip_suffix })?;
            match out {
                Some(p) => {
                    let mut w = create(&p)?;
                    write_blocking(&rows, &mut w)?;
                    w.flush()?;
                }
                None => write_blocking(&rows, stdout.lock())?,
            }
        }
        Command::Stats { input } => {
            let history = ctx.load(&input)?;
            let groups = raw_groups_parallel(&history, &ctx.workers);
            let mut w = stdout.lock();
            writeln!(w, "date\tprofiles\tdocuments\tmentions\tvenues\tmerge\tsplit\tdistribute")?;
            for s in history.snapshots() {
                // groups ending at this observation
                let counts = KindCounts::tally(groups.iter().filter(|g| g.t2 == s.date()).map(|g| g.kind));
                writeln!(
                    w,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    s.date(),
                    s.profile_count(),
                    s.document_count(),
                    s.mention_count(),
                    s.venues().count(),
                    counts.merge,
                    counts.split,
                    counts.distribute
                )?;
            }
        }
    }
    Ok(())
}
