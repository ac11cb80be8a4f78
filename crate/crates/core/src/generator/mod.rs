//! Seeded synthetic histories with injected defects and their corrections.
//!
//! The algorithm, fixed so that a seed always reproduces the same output:
//!
//! 1. `ChaCha8Rng::seed_from_u64(seed)` drives every random choice, consumed
//!    in the order below.
//! 2. Persons get random names and are grouped into teams of eight
//!    consecutive indices. Venues number `documents / 100` (at least one).
//! 3. Each document picks a team and 1–4 of its members as authors, plus an
//!    outsider with probability 0.1; about 3% are edited volumes with 1–2
//!    editors and no authors. Half of all documents carry a DOI link.
//! 4. Every correction in the plan gets a defect in the first snapshot, on
//!    persons used by no other defect:
//!    synonym (a person's mentions spread over extra profiles under variant
//!    spellings) for a merge; homonym (a second person pooled into the
//!    host's profile under the host's name) for a split; misassignment (some
//!    of a person's mentions filed with another person) for a distribute.
//! 5. Per interval, corrections resolve defects in plan order, then renames
//!    move untouched persons to fresh identifiers, then new publications are
//!    filed with each author's current profile. Authors whose profile was
//!    touched in the same interval are replaced.
//!
//! Under dense observation every logged merge, split and distribute is
//! therefore visible as exactly one case.

mod edit;
mod names;

pub use edit::{apply_edit, apply_in_place, Edit, EditKind, EditRecord, GroundTruthLog, Move, SplitPart};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::date::Date;
use crate::error::Error;
use crate::model::{DocKey, DocumentRecord, History, MentionKey, Profile, ProfileId, Role, SnapshotBuilder, VenueKey};
use names::PersonName;

const TEAM: usize = 8;

/// Event counts for one interval between consecutive observations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntervalPlan {
    pub merges: usize,
    pub splits: usize,
    pub distributes: usize,
    pub renames: usize,
    pub new_publications: usize,
}

impl IntervalPlan {
    pub fn corrections(&self) -> usize {
        self.merges + self.splits + self.distributes
    }

    pub fn total(&self) -> usize {
        self.corrections() + self.renames + self.new_publications
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NameConfig {
    pub abbreviation_prob: f64,
    pub middle_name_prob: f64,
}

impl Default for NameConfig {
    fn default() -> Self {
        NameConfig { abbreviation_prob: 0.5, middle_name_prob: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub persons: usize,
    pub documents: usize,
    /// Observation dates, strictly increasing.
    pub dates: Vec<Date>,
    /// One entry per interval; missing trailing entries mean no events.
    pub plan: Vec<IntervalPlan>,
    pub names: NameConfig,
}

fn start() -> Date {
    Date::new(2017, 1, 1).expect("valid date")
}

impl GeneratorConfig {
    /// No events at all.
    pub fn quiet(seed: u64, persons: usize, documents: usize, observations: usize) -> Self {
        GeneratorConfig {
            seed,
            persons,
            documents,
            dates: start().daily(observations),
            plan: Vec::new(),
            names: NameConfig::default(),
        }
    }

    /// 1,000 persons, 5,000 documents, 20 daily intervals of 10 events each.
    pub fn desk(seed: u64) -> Self {
        let per = IntervalPlan { merges: 2, splits: 1, distributes: 1, renames: 1, new_publications: 5 };
        GeneratorConfig { plan: vec![per; 20], ..Self::quiet(seed, 1_000, 5_000, 21) }
    }

    /// 100,000 persons, 500,000 documents, 20 snapshots.
    pub fn stress(seed: u64) -> Self {
        let per = IntervalPlan { merges: 150, splits: 40, distributes: 60, renames: 20, new_publications: 2_000 };
        GeneratorConfig { plan: vec![per; 19], ..Self::quiet(seed, 100_000, 500_000, 20) }
    }

    pub fn intervals(&self) -> usize {
        self.dates.len().saturating_sub(1)
    }

    pub fn interval_plan(&self, i: usize) -> IntervalPlan {
        self.plan.get(i).copied().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.dates.len() < 2 {
            return Err(Error::TooFewSnapshots(2));
        }
        for w in self.dates.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::NonMonotoneDates(w[0], w[1]));
            }
        }
        if self.plan.len() > self.intervals() {
            return Err(Error::InfeasiblePlan(format!(
                "{} interval plans for {} intervals",
                self.plan.len(),
                self.intervals()
            )));
        }
        let p = |x: f64| (0.0..=1.0).contains(&x);
        if !p(self.names.abbreviation_prob) || !p(self.names.middle_name_prob) {
            return Err(Error::InfeasiblePlan("name probabilities must lie in [0, 1]".into()));
        }
        if self.persons == 0 && (self.documents > 0 || self.plan.iter().any(|p| p.total() > 0)) {
            return Err(Error::InfeasiblePlan("documents or events without persons".into()));
        }
        Ok(())
    }
}

struct Person {
    name: PersonName,
    display: Arc<str>,
}

enum Defect {
    Synonym { person: usize, extra: Vec<ProfileId> },
    Homonym { host: usize, guest: usize, surface: Arc<str> },
    Misfiled { owner: usize, holder: usize, mentions: Vec<MentionKey> },
}

struct World {
    rng: ChaCha8Rng,
    persons: Vec<Person>,
    /// Profile currently receiving each person's new mentions.
    holder: Vec<ProfileId>,
    /// Surface printed for each person's new mentions.
    surface: Vec<Arc<str>>,
    /// Every mention of each person, in creation order.
    mentions: Vec<Vec<MentionKey>>,
    venues: Vec<VenueKey>,
    next_profile: usize,
    next_document: usize,
    next_suffix: usize,
    clean: Vec<bool>,
}

fn person_id(i: usize) -> ProfileId {
    ProfileId::from(format!("p{i:06}").as_str())
}

fn doc_key(i: usize) -> DocKey {
    DocKey::from(format!("doc/{i:07}").as_str())
}

impl World {
    fn fresh_profile(&mut self) -> ProfileId {
        let id = person_id(self.next_profile);
        self.next_profile += 1;
        id
    }

    /// Authors of a new document: team members, sometimes one outsider.
    fn pick_people(&mut self) -> Vec<usize> {
        let n = self.persons.len();
        let team = self.rng.gen_range(0..n.div_ceil(TEAM));
        let members: Vec<usize> = (team * TEAM..((team + 1) * TEAM).min(n)).collect();
        let k = self.rng.gen_range(1..=4usize).min(members.len());
        let mut out: Vec<usize> = members.choose_multiple(&mut self.rng, k).copied().collect();
        if self.rng.gen_bool(0.1) {
            let o = self.rng.gen_range(0..n);
            if !out.contains(&o) {
                out.push(o);
            }
        }
        out
    }

    /// A document with name slots filled by `people` (as authors, or as
    /// editors for an edited volume). Surfaces come from `surface`.
    fn document(&mut self, year: i32, people: Vec<usize>, edited: bool) -> (DocumentRecord, Vec<(MentionKey, usize)>) {
        let key = doc_key(self.next_document);
        self.next_document += 1;
        let title = names::title(&mut self.rng);
        let mut d = DocumentRecord::new(key.clone(), title, year);
        if self.rng.gen_bool(0.95) && !self.venues.is_empty() {
            d.venue = self.venues.choose(&mut self.rng).cloned();
        }
        if self.rng.gen_bool(0.5) {
            d.link = Some(format!("https://doi.org/10.5555/{}", key.as_str().trim_start_matches("doc/")));
        }
        let role = if edited { Role::Editor } else { Role::Author };
        let mut slots = Vec::with_capacity(people.len());
        for (pos, p) in people.into_iter().enumerate() {
            d.names_mut(role).push(self.surface[p].clone());
            let k = MentionKey::new(key.clone(), pos as u32, role);
            self.mentions[p].push(k.clone());
            slots.push((k, p));
        }
        (d, slots)
    }

    /// Shuffled clean persons with at least `min` mentions.
    fn candidates(&mut self, min: usize) -> Vec<usize> {
        let mut c: Vec<usize> =
            (0..self.persons.len()).filter(|&i| self.clean[i] && self.mentions[i].len() >= min).collect();
        c.shuffle(&mut self.rng);
        c
    }

    fn take(&mut self, pool: &mut Vec<usize>, what: &str) -> Result<usize, Error> {
        while let Some(p) = pool.pop() {
            if self.clean[p] {
                self.clean[p] = false;
                return Ok(p);
            }
        }
        Err(Error::InfeasiblePlan(format!("not enough eligible persons for {what} defects")))
    }
}

/// Runs the generator.
pub fn generate(config: &GeneratorConfig) -> Result<(History, GroundTruthLog), Error> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let persons: Vec<Person> = (0..config.persons)
        .map(|_| {
            let name = PersonName::random(&mut rng, config.names.middle_name_prob);
            let display = Arc::from(name.display().as_str());
            Person { name, display }
        })
        .collect();
    let n_venues = if config.documents == 0 { 0 } else { (config.documents / 100).max(1) };
    let mut venue_names = Vec::with_capacity(n_venues);
    let venues: Vec<VenueKey> = (0..n_venues)
        .map(|i| {
            let k = VenueKey::from(format!("v{i:05}").as_str());
            venue_names.push((k.clone(), names::venue_name(&mut rng)));
            k
        })
        .collect();
    let mut w = World {
        rng,
        holder: (0..persons.len()).map(person_id).collect(),
        surface: persons.iter().map(|p| p.display.clone()).collect(),
        mentions: vec![Vec::new(); persons.len()],
        clean: vec![true; persons.len()],
        next_profile: persons.len(),
        next_document: 0,
        next_suffix: 1,
        persons,
        venues,
    };

    // documents of the first snapshot
    let first_year = config.dates[0].year() as i32;
    let mut documents = Vec::with_capacity(config.documents);
    for _ in 0..config.documents {
        let edited = w.rng.gen_bool(0.03);
        let mut people = w.pick_people();
        if edited {
            people.truncate(2);
        }
        let year = w.rng.gen_range(first_year - 20..first_year);
        let (d, _) = w.document(year, people, edited);
        documents.push(d);
    }

    // owner and surface of every mention, defects applied on top
    let mut owner: BTreeMap<MentionKey, (ProfileId, Arc<str>)> = BTreeMap::new();
    for (p, ms) in w.mentions.iter().enumerate() {
        for k in ms {
            owner.insert(k.clone(), (w.holder[p].clone(), w.surface[p].clone()));
        }
    }
    let (merges, splits, distributes) = config
        .plan
        .iter()
        .fold((0, 0, 0), |(m, s, d), p| (m + p.merges, s + p.splits, d + p.distributes));
    let mut merge_defects = Vec::with_capacity(merges);
    let mut split_defects = Vec::with_capacity(splits);
    let mut distribute_defects = Vec::with_capacity(distributes);
    let mut pool = w.candidates(2);
    for _ in 0..merges {
        let person = w.take(&mut pool, "merge")?;
        let n = w.mentions[person].len();
        let extras = if n >= 3 && w.rng.gen_bool(0.2) { 2 } else { 1 };
        let mut ms = w.mentions[person].clone();
        ms.shuffle(&mut w.rng);
        let moved = w.rng.gen_range(extras..n);
        let mut extra = Vec::with_capacity(extras);
        for e in 0..extras {
            let id = w.fresh_profile();
            let variant: Arc<str> =
                Arc::from(w.persons[person].name.variant(&mut w.rng, config.names.abbreviation_prob).as_str());
            // the first `extras` slots seed each extra profile; the rest go round-robin
            for k in ms[..moved].iter().skip(e).step_by(extras) {
                owner.insert(k.clone(), (id.clone(), variant.clone()));
            }
            extra.push(id);
        }
        merge_defects.push(Defect::Synonym { person, extra });
    }
    let mut pool = w.candidates(1);
    for _ in 0..splits {
        let host = w.take(&mut pool, "split")?;
        let guest = w.take(&mut pool, "split")?;
        let same_name = w.rng.gen_bool(0.5);
        let surface: Arc<str> = if same_name {
            let s = format!("{} {:04}", w.persons[host].display, w.next_suffix);
            w.next_suffix += 1;
            Arc::from(s.as_str())
        } else {
            w.persons[guest].display.clone()
        };
        let host_id = w.holder[host].clone();
        let host_surface = w.surface[host].clone();
        for k in &w.mentions[guest] {
            owner.insert(k.clone(), (host_id.clone(), host_surface.clone()));
        }
        w.holder[guest] = host_id;
        w.surface[guest] = host_surface;
        split_defects.push(Defect::Homonym { host, guest, surface });
    }
    let mut pool = w.candidates(2);
    for _ in 0..distributes {
        let owner_p = w.take(&mut pool, "distribute")?;
        let holder_p = w.take(&mut pool, "distribute")?;
        let n = w.mentions[owner_p].len();
        let mut ms = w.mentions[owner_p].clone();
        ms.shuffle(&mut w.rng);
        ms.truncate(w.rng.gen_range(1..n));
        ms.sort();
        let into = w.holder[holder_p].clone();
        for k in &ms {
            owner.get_mut(k).expect("known mention").0 = into.clone();
        }
        distribute_defects.push(Defect::Misfiled { owner: owner_p, holder: holder_p, mentions: ms });
    }

    // first snapshot
    let mut b = SnapshotBuilder::new(config.dates[0]);
    for (k, name) in &venue_names {
        b.add_venue(k.clone(), name)?;
    }
    for mut d in documents {
        let key = d.key.clone();
        for role in [Role::Author, Role::Editor] {
            for (pos, slot) in d.names_mut(role).iter_mut().enumerate() {
                let k = MentionKey::new(key.clone(), pos as u32, role);
                *slot = owner[&k].1.clone();
            }
        }
        b.add_document(d)?;
    }
    let mut profiles: BTreeMap<ProfileId, Profile> = BTreeMap::new();
    for (k, (id, surface)) in owner {
        profiles.entry(id.clone()).or_insert_with(|| Profile::new(id)).insert(k, surface);
    }
    for p in profiles.into_values() {
        b.add_profile(p)?;
    }
    let mut snapshots = vec![b.build()?];

    // the timeline
    let venue_lookup: BTreeMap<VenueKey, Arc<str>> =
        venue_names.into_iter().map(|(k, n)| (k, Arc::from(n.as_str()))).collect();
    let mut merge_defects = merge_defects.into_iter();
    let mut split_defects = split_defects.into_iter();
    let mut distribute_defects = distribute_defects.into_iter();
    let mut log = GroundTruthLog::default();
    for i in 0..config.intervals() {
        let plan = config.interval_plan(i);
        let mut s = snapshots[i].with_date(config.dates[i + 1]);
        let mut touched: BTreeSet<ProfileId> = BTreeSet::new();
        let mut edits = Vec::with_capacity(plan.total());
        for _ in 0..plan.merges {
            let Some(Defect::Synonym { person, extra }) = merge_defects.next() else { unreachable!() };
            edits.push(Edit::Merge { survivor: w.holder[person].clone(), absorbed: extra, surface: None });
        }
        for _ in 0..plan.splits {
            let Some(Defect::Homonym { host, guest, surface }) = split_defects.next() else { unreachable!() };
            let fresh = w.fresh_profile();
            let mentions: BTreeSet<MentionKey> = w.mentions[guest].iter().cloned().collect();
            edits.push(Edit::Split {
                source: w.holder[host].clone(),
                parts: vec![SplitPart { profile: fresh.clone(), mentions, surface: Some(surface.clone()) }],
            });
            w.holder[guest] = fresh;
            w.surface[guest] = surface;
        }
        for _ in 0..plan.distributes {
            let Some(Defect::Misfiled { owner, holder, mentions }) = distribute_defects.next() else {
                unreachable!()
            };
            let moves = mentions
                .into_iter()
                .map(|m| Move { mention: m, from: w.holder[holder].clone(), to: w.holder[owner].clone(), surface: None })
                .collect();
            edits.push(Edit::Distribute { moves });
        }
        for e in &edits {
            touched.extend(e.profiles());
        }
        if plan.renames > 0 {
            let mut pool: Vec<usize> = (0..w.persons.len())
                .filter(|&p| w.clean[p] && s.profile(&w.holder[p]).is_some_and(|x| !x.is_empty()))
                .collect();
            if pool.len() < plan.renames {
                return Err(Error::InfeasiblePlan(format!("not enough persons to rename in interval {i}")));
            }
            let chosen: Vec<usize> = pool.partial_shuffle(&mut w.rng, plan.renames).0.to_vec();
            for p in chosen {
                let to = w.fresh_profile();
                edits.push(Edit::Rename { from: w.holder[p].clone(), to: to.clone(), surface: None });
                touched.insert(w.holder[p].clone());
                touched.insert(to.clone());
                w.holder[p] = to;
            }
        }
        for e in edits {
            let mentions = apply_in_place(&mut s, &e)?;
            log.records.push(EditRecord { interval: i, edit: e, mentions });
        }
        let year = config.dates[i + 1].year() as i32;
        for _ in 0..plan.new_publications {
            let mut people = w.pick_people();
            people.retain(|&p| !touched.contains(&w.holder[p]));
            if people.is_empty() {
                let free = (0..w.persons.len()).filter(|&p| !touched.contains(&w.holder[p])).count();
                if free == 0 {
                    return Err(Error::InfeasiblePlan(format!("no untouched author for interval {i}")));
                }
                loop {
                    let p = w.rng.gen_range(0..w.persons.len());
                    if !touched.contains(&w.holder[p]) {
                        people.push(p);
                        break;
                    }
                }
            }
            let (d, slots) = w.document(year, people, false);
            let owners = slots.into_iter().map(|(k, p)| (k, w.holder[p].clone())).collect();
            let venue = d.venue.as_ref().map(|k| (k.clone(), venue_lookup[k].clone()));
            let e = Edit::Publish { document: d, venue, owners };
            let mentions = apply_in_place(&mut s, &e)?;
            log.records.push(EditRecord { interval: i, edit: e, mentions });
        }
        snapshots.push(s);
    }
    Ok((History::new(snapshots)?, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::extract_corrections;
    use crate::extract::CorrectionKind;

    fn small(seed: u64, plan: Vec<IntervalPlan>) -> GeneratorConfig {
        let n = plan.len() + 1;
        GeneratorConfig { plan, ..GeneratorConfig::quiet(seed, 200, 800, n) }
    }

    #[test]
    fn zero_plan_keeps_snapshots_equal() {
        let (h, log) = generate(&GeneratorConfig::quiet(3, 100, 300, 4)).unwrap();
        assert!(log.records.is_empty());
        let first = h.first();
        for s in h.snapshots() {
            assert_eq!(s.with_date(first.date()), *first);
        }
        assert!(extract_corrections(&h).unwrap().is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let c = GeneratorConfig::desk(11);
        let a = generate(&c).unwrap();
        let b = generate(&c).unwrap();
        assert_eq!(a, b);
        let other = generate(&GeneratorConfig::desk(12)).unwrap();
        assert_ne!(a.0, other.0);
    }

    #[test]
    fn every_snapshot_is_valid_and_mentions_are_conserved() {
        let (h, log) = generate(&GeneratorConfig::desk(5)).unwrap();
        for s in h.snapshots() {
            s.validate().unwrap();
        }
        for (i, w) in h.snapshots().windows(2).enumerate() {
            let published: usize = log
                .records
                .iter()
                .filter(|r| r.interval == i && r.kind() == EditKind::NewPublication)
                .map(|r| r.mentions.len())
                .sum();
            assert_eq!(w[1].mention_count(), w[0].mention_count() + published);
        }
    }

    #[test]
    fn ten_single_edits_are_recovered() {
        let mut plan = Vec::new();
        for k in 0..10 {
            let mut p = IntervalPlan::default();
            match k {
                0..=4 => p.merges = 1,
                5..=7 => p.splits = 1,
                _ => p.distributes = 1,
            }
            plan.push(p);
        }
        let (h, log) = generate(&small(9, plan)).unwrap();
        let cases = extract_corrections(&h).unwrap();
        assert_eq!(cases.len(), 10);
        let kinds = crate::annotation::KindCounts::tally(cases.iter().map(|c| c.kind));
        assert_eq!((kinds.merge, kinds.split, kinds.distribute), (5, 3, 2));
        for (c, r) in cases.iter().zip(log.corrections()) {
            assert_eq!(Some(c.kind), r.kind().correction());
            let ids: BTreeSet<ProfileId> = c.profile_ids().into_iter().cloned().collect();
            assert_eq!(ids, r.profiles());
            assert_eq!(c.moved_mentions(), r.mentions);
        }
    }

    #[test]
    fn renames_and_publications_are_invisible() {
        let plan = vec![IntervalPlan { renames: 3, new_publications: 10, ..Default::default() }; 3];
        let (h, log) = generate(&small(2, plan)).unwrap();
        assert_eq!(log.records.len(), 39);
        assert!(extract_corrections(&h).unwrap().is_empty());
    }

    #[test]
    fn too_many_defects_is_infeasible() {
        let c = GeneratorConfig {
            plan: vec![IntervalPlan { merges: 500, ..Default::default() }],
            ..GeneratorConfig::quiet(1, 50, 100, 2)
        };
        assert!(matches!(generate(&c), Err(Error::InfeasiblePlan(_))));
        assert!(generate(&GeneratorConfig::quiet(1, 10, 10, 1)).is_err());
    }

    #[test]
    fn desk_recovery_is_exact() {
        let (h, log) = generate(&GeneratorConfig::desk(21)).unwrap();
        let cases = extract_corrections(&h).unwrap();
        let want: BTreeSet<_> = log
            .corrections()
            .map(|r| (r.interval, r.kind().correction().unwrap(), r.profiles(), r.mentions.clone()))
            .collect();
        let dates: Vec<Date> = h.dates().collect();
        let got: BTreeSet<_> = cases
            .iter()
            .map(|c| {
                let i = dates.iter().position(|d| *d == c.t_before).unwrap();
                (i, c.kind, c.profile_ids().into_iter().cloned().collect(), c.moved_mentions())
            })
            .collect();
        assert_eq!(want.len(), 80);
        assert_eq!(got, want);
        assert!(cases.iter().any(|c| c.kind == CorrectionKind::Distribute));
    }
}
