//! File formats, synthetic uncertainty assignment and database splitting.
//!
//! Uncertain sequence files hold one sequence per line: `item:prob` tokens,
//! `-1` closing each event and `-2` closing the sequence. Weight files hold
//! `item weight` lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Event, ItemId, Pattern, ProbItem, ScoredPattern, UncertainDatabase, WeightTable};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn item_token(line: usize, tok: &str) -> Result<ItemId> {
    ItemId::new(tok).map_err(|_| Error::parse(line, format!("invalid item `{tok}`")))
}

fn unit_interval(line: usize, what: &str, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))?;
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::parse(line, format!("{what} {tok} outside (0, 1]")));
    }
    Ok(v)
}

/// Splits a line into events of raw tokens, enforcing `-1`/`-2` framing.
fn framed_events(lineno: usize, line: &str) -> Result<Vec<Vec<&str>>> {
    let mut events = Vec::new();
    let mut cur: Vec<&str> = Vec::new();
    let mut closed = false;
    for tok in line.split_whitespace() {
        if closed {
            return Err(Error::parse(lineno, "tokens after `-2`"));
        }
        match tok {
            "-1" => {
                if cur.is_empty() {
                    return Err(Error::parse(lineno, "empty event"));
                }
                events.push(std::mem::take(&mut cur));
            }
            "-2" => {
                if !cur.is_empty() {
                    return Err(Error::parse(lineno, "event not closed by `-1` before `-2`"));
                }
                closed = true;
            }
            t => cur.push(t),
        }
    }
    if !closed {
        return Err(Error::parse(lineno, "missing `-2`"));
    }
    if events.is_empty() {
        return Err(Error::parse(lineno, "sequence without events"));
    }
    Ok(events)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_uncertain_str(text: &str) -> Result<UncertainDatabase> {
    let mut db = UncertainDatabase::default();
    for (lineno, line) in content_lines(text) {
        let mut events = Vec::new();
        for raw in framed_events(lineno, line)? {
            let mut items = Vec::with_capacity(raw.len());
            let mut seen = BTreeSet::new();
            for tok in raw {
                let (item, prob) = tok
                    .split_once(':')
                    .ok_or_else(|| Error::parse(lineno, format!("expected `item:prob`, got `{tok}`")))?;
                let item = item_token(lineno, item)?;
                let prob = unit_interval(lineno, "probability", prob)?;
                if !seen.insert(item.clone()) {
                    return Err(Error::parse(lineno, format!("duplicate item `{item}` in event")));
                }
                items.push(ProbItem { item, prob });
            }
            events.push(Event::new(items).map_err(|e| Error::parse(lineno, e.to_string()))?);
        }
        db.push(events).map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    Ok(db)
}

pub fn parse_uncertain_db(path: impl AsRef<Path>) -> Result<UncertainDatabase> {
    parse_uncertain_str(&read(path.as_ref())?)
}

pub fn write_uncertain(w: &mut impl Write, db: &UncertainDatabase) -> io::Result<()> {
    for s in db.sequences() {
        for e in &s.events {
            for p in e.items() {
                write!(w, "{}:{} ", p.item, p.prob)?;
            }
            write!(w, "-1 ")?;
        }
        writeln!(w, "-2")?;
    }
    Ok(())
}

pub fn write_uncertain_db(path: impl AsRef<Path>, db: &UncertainDatabase) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_uncertain(&mut buf, db).expect("in-memory write");
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn parse_weights_str(text: &str) -> Result<WeightTable> {
    let mut table = WeightTable::new();
    for (lineno, line) in content_lines(text) {
        let mut f = line.split_whitespace();
        let (Some(item), Some(w), None) = (f.next(), f.next(), f.next()) else {
            return Err(Error::parse(lineno, "expected `item weight`"));
        };
        let item = item_token(lineno, item)?;
        let w = unit_interval(lineno, "weight", w)?;
        table
            .insert(item, w)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    Ok(table)
}

pub fn parse_weights(path: impl AsRef<Path>) -> Result<WeightTable> {
    parse_weights_str(&read(path.as_ref())?)
}

pub fn write_weights(path: impl AsRef<Path>, weights: &WeightTable) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for (item, w) in weights.iter() {
        out.push_str(&format!("{item} {w}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Layout of a precise (certain) input dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreciseFormat {
    /// SPMF sequence database: `-1` ends an itemset, `-2` ends the sequence.
    SpmfSeq,
    /// One transaction per line; each item becomes its own event.
    SpmfItemset,
}

/// Reads a precise dataset as sequences of events of item tokens.
pub fn parse_precise_str(text: &str, format: PreciseFormat) -> Result<Vec<Vec<Vec<ItemId>>>> {
    let mut out = Vec::new();
    for (lineno, line) in content_lines(text) {
        if line.starts_with('@') || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let seq = match format {
            PreciseFormat::SpmfSeq => {
                let mut events = Vec::new();
                for raw in framed_events(lineno, line)? {
                    let mut set = Vec::with_capacity(raw.len());
                    for tok in raw {
                        let item = item_token(lineno, tok)?;
                        if set.contains(&item) {
                            return Err(Error::parse(lineno, format!("duplicate item `{item}` in event")));
                        }
                        set.push(item);
                    }
                    events.push(set);
                }
                events
            }
            PreciseFormat::SpmfItemset => line
                .split_whitespace()
                .map(|tok| item_token(lineno, tok).map(|i| vec![i]))
                .collect::<Result<Vec<_>>>()?,
        };
        out.push(seq);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub prob_mean: f64,
    pub prob_std: f64,
    pub weight_mean: f64,
    pub weight_std: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            prob_mean: 0.5,
            prob_std: 0.25,
            weight_mean: 0.5,
            weight_std: 0.125,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("prob_std", self.prob_std), ("weight_std", self.weight_std)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParam(format!("{name} must be > 0; got {v}")));
            }
        }
        for (name, v) in [("prob_mean", self.prob_mean), ("weight_mean", self.weight_mean)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParam(format!("{name} must be in (0, 1); got {v}")));
            }
        }
        Ok(())
    }
}

pub const CLAMP_LO: f64 = 0.01;
pub const CLAMP_HI: f64 = 1.0;

/// Box-Muller normal draws over xoshiro256++ (`seed_from_u64`). Each draw
/// consumes two 53-bit uniforms and keeps only the cosine branch.
pub struct Gaussian {
    rng: Xoshiro256PlusPlus,
}

impl Gaussian {
    pub fn new(seed: u64) -> Self {
        Gaussian {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn sample(&mut self, mean: f64, std: f64) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        mean + std * z
    }

    pub fn clamped(&mut self, mean: f64, std: f64) -> f64 {
        self.sample(mean, std).clamp(CLAMP_LO, CLAMP_HI)
    }
}

/// Assigns existential probabilities and item weights to a precise dataset.
///
/// Probabilities are drawn first, one per item occurrence in file order;
/// weights follow, one per distinct item in token order. All draws come from
/// one [`Gaussian`] stream seeded with `cfg.seed`.
pub fn gen_uncertain_str(
    text: &str,
    format: PreciseFormat,
    cfg: &GenConfig,
) -> Result<(UncertainDatabase, WeightTable)> {
    cfg.validate()?;
    let precise = parse_precise_str(text, format)?;
    let mut g = Gaussian::new(cfg.seed);
    let mut db = UncertainDatabase::default();
    let mut distinct = BTreeSet::new();
    for seq in precise {
        let mut events = Vec::with_capacity(seq.len());
        for set in seq {
            let items = set
                .into_iter()
                .map(|item| {
                    distinct.insert(item.clone());
                    ProbItem {
                        item,
                        prob: g.clamped(cfg.prob_mean, cfg.prob_std),
                    }
                })
                .collect();
            events.push(Event::new(items)?);
        }
        db.push(events)?;
    }
    let mut weights = WeightTable::new();
    for item in distinct {
        weights.insert(item, g.clamped(cfg.weight_mean, cfg.weight_std))?;
    }
    Ok((db, weights))
}

pub fn gen_uncertain(
    path: impl AsRef<Path>,
    format: PreciseFormat,
    cfg: &GenConfig,
) -> Result<(UncertainDatabase, WeightTable)> {
    gen_uncertain_str(&read(path.as_ref())?, format, cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub enum IncrementSpec {
    /// Increment sizes as fractions of the initial size.
    Fractions(Vec<f64>),
    /// Absolute increment sizes.
    Sizes(Vec<usize>),
    /// `count` increments, each a uniform draw in `[lo, hi]` of the initial size.
    RatioRange { lo: f64, hi: f64, count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitSpec {
    pub initial_fraction: f64,
    pub increments: IncrementSpec,
}

/// Contiguous, order-preserving split into an initial part and increments.
pub fn split_db(
    db: &UncertainDatabase,
    spec: &SplitSpec,
) -> Result<(UncertainDatabase, Vec<UncertainDatabase>)> {
    let n = db.size();
    if !(spec.initial_fraction > 0.0 && spec.initial_fraction <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "initial_fraction {} outside (0, 1]",
            spec.initial_fraction
        )));
    }
    let initial = ((spec.initial_fraction * n as f64).round() as usize).clamp(1.min(n), n);
    let of_initial = |r: f64| -> Result<usize> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParam(format!("increment ratio {r} must be > 0")));
        }
        Ok(((r * initial as f64).round() as usize).max(1))
    };
    let sizes: Vec<usize> = match &spec.increments {
        IncrementSpec::Fractions(fr) => fr.iter().map(|&r| of_initial(r)).collect::<Result<_>>()?,
        IncrementSpec::Sizes(s) => {
            if s.contains(&0) {
                return Err(Error::InvalidParam("increment size 0".into()));
            }
            s.clone()
        }
        IncrementSpec::RatioRange { lo, hi, count, seed } => {
            if !(*lo > 0.0 && lo <= hi) {
                return Err(Error::InvalidParam(format!("bad ratio range [{lo}, {hi}]")));
            }
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(*seed);
            (0..*count)
                .map(|_| of_initial(rng.gen_range(*lo..=*hi)))
                .collect::<Result<_>>()?
        }
    };
    let total = initial + sizes.iter().sum::<usize>();
    if total > n {
        return Err(Error::Split(format!("{total} sequences requested, {n} available")));
    }
    let mut start = initial;
    let increments = sizes
        .into_iter()
        .map(|k| {
            let part = db.slice(start..start + k);
            start += k;
            part
        })
        .collect();
    Ok((db.slice(0..initial), increments))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternFormat {
    Tsv,
    JsonLines,
}

#[derive(Serialize, Deserialize)]
struct PatternRecord {
    events: Vec<Vec<ItemId>>,
    wes: f64,
}

pub fn format_patterns(
    w: &mut impl Write,
    patterns: &[ScoredPattern],
    format: PatternFormat,
) -> io::Result<()> {
    for sp in patterns {
        match format {
            PatternFormat::Tsv => writeln!(w, "{}\t{:.6}", sp.pattern, sp.wes)?,
            PatternFormat::JsonLines => {
                let rec = PatternRecord {
                    events: sp.pattern.events().to_vec(),
                    wes: sp.wes,
                };
                serde_json::to_writer(&mut *w, &rec)?;
                writeln!(w)?;
            }
        }
    }
    Ok(())
}

pub fn write_patterns(
    path: impl AsRef<Path>,
    patterns: &[ScoredPattern],
    format: PatternFormat,
) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    format_patterns(&mut buf, patterns, format).expect("in-memory write");
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Reads `pattern<TAB>wes` lines.
pub fn parse_patterns_tsv(text: &str) -> Result<Vec<ScoredPattern>> {
    content_lines(text)
        .map(|(lineno, line)| {
            let (p, w) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(lineno, "expected `pattern<TAB>wes`"))?;
            let pattern: Pattern = p.parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
            let wes = w.trim().parse().map_err(|_| Error::parse(lineno, "bad wes"))?;
            Ok(ScoredPattern { pattern, wes })
        })
        .collect()
}

/// Item occurrence counts, used for reporting.
pub fn db_stats(db: &UncertainDatabase) -> (usize, usize, f64) {
    let freq: BTreeMap<_, _> = db.item_frequencies();
    let occurrences: usize = freq.values().sum();
    let avg = if db.is_empty() {
        0.0
    } else {
        occurrences as f64 / db.size() as f64
    };
    (db.size(), freq.len(), avg)
}
