//! Incremental maintenance of the weighted frequent set as increments are
//! appended: uWSInc keeps frequent and semi-frequent patterns, uWSInc+
//! additionally keeps promising patterns found locally in each increment.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::sync::Arc;
use std::time::Instant;

use crate::encode::{Codebook, EncodedDb};
use crate::error::{Error, Result};
use crate::fuws::{self, mine_encoded, FuwsOptions};
use crate::model::{meets, MiningParams, Pattern, ScoredPattern, Thresholds, UncertainDatabase, WeightTable};
use crate::trie::USeqTrie;

/// Running sums for the weighted arithmetic mean of item weights.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WamAccumulator {
    pub weighted_freq_sum: f64,
    pub freq_sum: f64,
}

impl WamAccumulator {
    pub fn wam(&self) -> f64 {
        if self.freq_sum > 0.0 {
            self.weighted_freq_sum / self.freq_sum
        } else {
            0.0
        }
    }

    fn add(&mut self, db: &EncodedDb, book: &Codebook) {
        let (num, den) = db.weighted_frequency(book);
        self.weighted_freq_sum += num;
        self.freq_sum += den;
    }
}

/// Adds the item occurrences of `delta` and returns the new mean.
pub fn update_wam(acc: &mut WamAccumulator, delta: &UncertainDatabase, weights: &WeightTable) -> Result<f64> {
    for s in delta.sequences() {
        for e in &s.events {
            for p in e.items() {
                acc.weighted_freq_sum += weights.weight(&p.item)?;
                acc.freq_sum += 1.0;
            }
        }
    }
    Ok(acc.wam())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternClass {
    Frequent,
    SemiFrequent,
    Promising,
    Infrequent,
}

#[derive(Debug, Clone)]
pub struct IncrementalState {
    /// Frequent and semi-frequent patterns.
    pub seq_trie: USeqTrie,
    /// Promising patterns (uWSInc+ only).
    pub pfs_trie: USeqTrie,
    pub db_size: usize,
    pub wam_acc: WamAccumulator,
    pub params: MiningParams,
    /// Local threshold of the latest uWSInc+ step; 0 before any.
    pub lwes: f64,
    book: Arc<Codebook>,
}

impl IncrementalState {
    /// Mines `db` at `min_sup * mu` so that both frequent and semi-frequent
    /// patterns are kept.
    pub fn init_mining(db: &UncertainDatabase, weights: &WeightTable, params: MiningParams) -> Result<Self> {
        params.validate()?;
        if db.is_empty() {
            return Err(Error::EmptyDatabase);
        }
        let book = Codebook::new(weights);
        let enc = book.encode_db(db)?;
        let out = mine_encoded(&book, &enc, params.min_sup * params.mu, params.wgt_fct, &FuwsOptions::default())?;
        let mut wam_acc = WamAccumulator::default();
        wam_acc.add(&enc, &book);
        Ok(IncrementalState {
            seq_trie: out.trie,
            pfs_trie: USeqTrie::new(book.clone()),
            db_size: db.size(),
            wam_acc,
            params,
            lwes: 0.0,
            book,
        })
    }

    pub fn codebook(&self) -> &Arc<Codebook> {
        &self.book
    }

    pub fn thresholds(&self) -> Thresholds {
        let p = &self.params;
        Thresholds::new(p.min_sup, self.db_size, self.wam_acc.wam(), p.wgt_fct, p.mu)
    }

    pub fn classify(&self, wes: f64) -> PatternClass {
        let t = self.thresholds();
        if meets(wes, t.min_wes) {
            PatternClass::Frequent
        } else if meets(wes, t.min_wes_prime) {
            PatternClass::SemiFrequent
        } else if self.lwes > 0.0 && meets(wes, self.lwes) {
            PatternClass::Promising
        } else {
            PatternClass::Infrequent
        }
    }

    pub fn frequent(&self) -> Vec<ScoredPattern> {
        self.seq_trie.collect(self.thresholds().min_wes)
    }

    pub fn semi_frequent(&self) -> Vec<ScoredPattern> {
        let min_wes = self.thresholds().min_wes;
        self.seq_trie
            .patterns()
            .into_iter()
            .filter(|s| !meets(s.wes, min_wes))
            .collect()
    }

    pub fn promising(&self) -> Vec<ScoredPattern> {
        self.pfs_trie.patterns()
    }

    /// Maintained WES of `pattern` in either trie.
    pub fn tracked_wes(&self, pattern: &Pattern) -> Option<f64> {
        self.seq_trie.get(pattern).or_else(|| self.pfs_trie.get(pattern))
    }

    fn absorb(&mut self, enc: &EncodedDb) {
        self.db_size += enc.len();
        self.wam_acc.add(enc, &self.book);
    }

    /// One uWSInc step; returns the updated frequent set.
    pub fn uwsinc_step(&mut self, delta: &UncertainDatabase) -> Result<Vec<ScoredPattern>> {
        let enc = self.book.encode_db(delta)?;
        self.seq_trie.sup_calc_encoded(&enc);
        self.absorb(&enc);
        let t = self.thresholds();
        self.seq_trie.prune_below(t.min_wes_prime);
        Ok(self.seq_trie.collect(t.min_wes))
    }

    /// One uWSInc+ step; returns the updated frequent set.
    pub fn uwsincplus_step(&mut self, delta: &UncertainDatabase) -> Result<Vec<ScoredPattern>> {
        let enc = self.book.encode_db(delta)?;
        let p = self.params;
        let local_min_sup = p.lwes_factor * p.min_sup * p.mu;
        let lfs = if enc.is_empty() {
            self.lwes = 0.0;
            USeqTrie::new(self.book.clone())
        } else {
            let out = mine_encoded(&self.book, &enc, local_min_sup, p.wgt_fct, &FuwsOptions::default())?;
            self.lwes = out.thresholds.min_wes;
            out.trie
        };
        self.seq_trie.sup_calc_encoded(&enc);
        self.pfs_trie.sup_calc_encoded(&enc);
        self.absorb(&enc);

        let t = self.thresholds();
        let lwes = self.lwes;
        let promoted = self.pfs_trie.drain_where(|w| meets(w, t.min_wes_prime));
        self.pfs_trie.prune_below(lwes);
        for (edges, w) in self.seq_trie.drain_where(|w| !meets(w, t.min_wes_prime)) {
            if meets(w, lwes) {
                self.pfs_trie.insert_edges(&edges, w);
            }
        }
        for (edges, w) in promoted {
            self.seq_trie.insert_edges(&edges, w);
        }

        let mut fresh = Vec::new();
        lfs.for_each(|edges, w| {
            if !self.seq_trie.contains_edges(edges) && !self.pfs_trie.contains_edges(edges) {
                fresh.push((edges.to_vec(), w));
            }
        });
        for (edges, w) in fresh {
            if meets(w, t.min_wes_prime) {
                self.seq_trie.insert_edges(&edges, w);
            } else if meets(w, lwes) {
                self.pfs_trie.insert_edges(&edges, w);
            }
        }
        Ok(self.seq_trie.collect(t.min_wes))
    }

    /// Checks the classification invariants of both tries.
    pub fn validate(&self) -> std::result::Result<(), String> {
        self.seq_trie.check()?;
        self.pfs_trie.check()?;
        let t = self.thresholds();
        for s in self.seq_trie.patterns() {
            if !meets(s.wes, t.min_wes_prime) {
                return Err(format!("{:?} in seq trie below minWES' ({} < {})", s.pattern, s.wes, t.min_wes_prime));
            }
            if self.pfs_trie.get(&s.pattern).is_some() {
                return Err(format!("{:?} stored in both tries", s.pattern));
            }
        }
        for s in self.pfs_trie.patterns() {
            if meets(s.wes, t.min_wes_prime) || !meets(s.wes, self.lwes) {
                return Err(format!(
                    "{:?} in promising trie outside [{}, {}): {}",
                    s.pattern, self.lwes, t.min_wes_prime, s.wes
                ));
            }
        }
        Ok(())
    }

    /// Writes the header line followed by both trie snapshots.
    pub fn write_checkpoint(&self, w: &mut impl Write) -> io::Result<()> {
        let p = &self.params;
        writeln!(
            w,
            "{} {} {} {} {} {} {}",
            self.db_size, self.wam_acc.weighted_freq_sum, self.wam_acc.freq_sum, p.min_sup, p.wgt_fct, p.mu, p.lwes_factor
        )?;
        writeln!(w, "seq {}", self.seq_trie.node_count())?;
        self.seq_trie.write_snapshot(w)?;
        writeln!(w, "pfs {}", self.pfs_trie.node_count())?;
        self.pfs_trie.write_snapshot(w)
    }

    pub fn read_checkpoint(text: &str, weights: &WeightTable) -> Result<Self> {
        let book = Codebook::new(weights);
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.to_string()))
            .filter(|(_, l)| !l.trim().is_empty());
        let (lineno, header) = lines.next().ok_or_else(|| Error::parse(1, "empty checkpoint"))?;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 7 {
            return Err(Error::parse(lineno, "expected `db_size wam_num wam_den min_sup wgt_fct mu lwes_factor`"));
        }
        let num = |i: usize| -> Result<f64> {
            f[i].parse().map_err(|_| Error::parse(lineno, format!("bad number `{}`", f[i])))
        };
        let db_size: usize = f[0]
            .parse()
            .map_err(|_| Error::parse(lineno, "bad db_size"))?;
        let wam_acc = WamAccumulator {
            weighted_freq_sum: num(1)?,
            freq_sum: num(2)?,
        };
        let params = MiningParams::new(num(3)?, num(4)?, num(5)?)
            .and_then(|p| p.with_lwes_factor(num(6)?))
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        let mut section = |name: &str| -> Result<USeqTrie> {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("missing `{name}` section")))?;
            let count = line
                .strip_prefix(name)
                .and_then(|r| r.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::parse(ln, format!("expected `{name} <count>`")))?;
            USeqTrie::read_snapshot(book.clone(), &mut lines, count)
        };
        let seq_trie = section("seq")?;
        let pfs_trie = section("pfs")?;
        Ok(IncrementalState {
            seq_trie,
            pfs_trie,
            db_size,
            wam_acc,
            params,
            lwes: 0.0,
            book,
        })
    }
}

/// `|fs ∩ baseline| / |baseline|`, with an empty baseline counting as 1.
pub fn completeness(fs: &[ScoredPattern], baseline: &[ScoredPattern]) -> f64 {
    if baseline.is_empty() {
        return 1.0;
    }
    let have: BTreeSet<&Pattern> = fs.iter().map(|s| &s.pattern).collect();
    let hit = baseline.iter().filter(|s| have.contains(&s.pattern)).count();
    hit as f64 / baseline.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    UwsInc,
    UwsIncPlus,
    /// Re-mine the concatenated database after every increment.
    Baseline,
}

impl std::str::FromStr for Algo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uwsinc" => Ok(Algo::UwsInc),
            "uwsinc+" => Ok(Algo::UwsIncPlus),
            "baseline" => Ok(Algo::Baseline),
            _ => Err(Error::InvalidParam(format!("unknown algorithm `{s}`"))),
        }
    }
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algo::UwsInc => "uwsinc",
            Algo::UwsIncPlus => "uwsinc+",
            Algo::Baseline => "baseline",
        })
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub frequent: Vec<ScoredPattern>,
    pub thresholds: Thresholds,
    pub sfs_count: usize,
    pub pfs_count: usize,
    pub ms: f64,
}

enum Engine {
    State(IncrementalState),
    Baseline {
        db: UncertainDatabase,
        weights: WeightTable,
        params: MiningParams,
    },
}

/// Drives one algorithm over a stream of increments.
pub struct Stream {
    algo: Algo,
    engine: Engine,
}

impl Stream {
    /// Initial mining; the outcome describes the state before any increment.
    pub fn start(algo: Algo, db: &UncertainDatabase, weights: &WeightTable, params: MiningParams) -> Result<(Self, StepOutcome)> {
        let t0 = Instant::now();
        let engine = match algo {
            Algo::Baseline => {
                params.validate()?;
                if db.is_empty() {
                    return Err(Error::EmptyDatabase);
                }
                Engine::Baseline {
                    db: db.clone(),
                    weights: weights.clone(),
                    params,
                }
            }
            _ => Engine::State(IncrementalState::init_mining(db, weights, params)?),
        };
        let mut s = Stream { algo, engine };
        let out = s.outcome(t0, None)?;
        Ok((s, out))
    }

    pub fn algo(&self) -> Algo {
        self.algo
    }

    pub fn state(&self) -> Option<&IncrementalState> {
        match &self.engine {
            Engine::State(s) => Some(s),
            Engine::Baseline { .. } => None,
        }
    }

    pub fn step(&mut self, delta: &UncertainDatabase) -> Result<StepOutcome> {
        let t0 = Instant::now();
        let fs = match (&mut self.engine, self.algo) {
            (Engine::State(s), Algo::UwsInc) => Some(s.uwsinc_step(delta)?),
            (Engine::State(s), _) => Some(s.uwsincplus_step(delta)?),
            (Engine::Baseline { db, .. }, _) => {
                *db = db.concat(delta);
                None
            }
        };
        self.outcome(t0, fs)
    }

    fn outcome(&mut self, t0: Instant, fs: Option<Vec<ScoredPattern>>) -> Result<StepOutcome> {
        match &self.engine {
            Engine::State(s) => {
                let frequent = fs.unwrap_or_else(|| s.frequent());
                Ok(StepOutcome {
                    thresholds: s.thresholds(),
                    sfs_count: s.seq_trie.len() - frequent.len(),
                    pfs_count: s.pfs_trie.len(),
                    frequent,
                    ms: t0.elapsed().as_secs_f64() * 1e3,
                })
            }
            Engine::Baseline { db, weights, params } => {
                let out = fuws::fuws_with(db, weights, params.min_sup, params.wgt_fct, &FuwsOptions::default())?;
                let th = out.thresholds;
                Ok(StepOutcome {
                    frequent: out.patterns,
                    thresholds: Thresholds::new(params.min_sup, th.db_size, th.wam, params.wgt_fct, params.mu),
                    sfs_count: 0,
                    pfs_count: 0,
                    ms: t0.elapsed().as_secs_f64() * 1e3,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{parse_uncertain_str, parse_weights_str};
    use crate::oracle::oracle_wes;

    const BASE_DB: &str = "\
a:0.9 c:0.6 -1 a:0.7 -1 b:0.3 -1 d:0.7 -1 -2
a:0.6 c:0.4 -1 a:0.5 -1 a:0.4 b:0.3 -1 -2
a:0.3 -1 a:0.2 b:0.2 -1 a:0.4 b:0.3 g:0.5 -1 -2
a:0.1 c:0.1 -1 a:0.3 b:0.1 c:0.4 -1 -2
d:0.1 -1 a:0.4 -1 d:0.1 -1 a:0.5 c:0.6 -1 -2
b:0.3 -1 b:0.4 -1 a:0.1 -1 a:0.1 b:0.2 -1 -2
";
    const DELTA1: &str = "\
c:0.6 a:0.7 -1 a:0.8 -1 f:0.9 a:0.6 -1 -2
c:0.6 a:0.4 -1 c:0.8 -1 a:0.6 -1 f:0.5 -1 g:0.4 c:0.7 -1 -2
f:0.8 -1 a:0.3 -1 c:0.9 -1 d:0.9 -1 f:0.5 a:0.7 d:0.4 -1 -2
c:0.7 -1 a:0.1 -1 a:0.8 c:0.6 d:0.8 -1 -2
";
    const DELTA2: &str = "\
f:0.1 -1 f:0.3 c:0.7 -1 a:0.9 -1 d:0.9 -1 f:0.2 g:0.1 -1 -2
a:0.2 c:0.1 -1 b:0.8 -1 f:0.4 e:0.4 -1 g:0.1 -1 e:0.5 g:0.2 -1 -2
c:0.6 -1 a:0.9 -1 d:0.6 -1 e:0.6 -1 a:0.5 e:0.4 c:0.1 -1 -2
";

    fn weights() -> WeightTable {
        parse_weights_str("a 0.8\nb 1.0\nc 0.9\nd 0.9\ne 0.7\nf 0.9\ng 0.8\n").unwrap()
    }

    fn db(s: &str) -> UncertainDatabase {
        parse_uncertain_str(s).unwrap()
    }

    fn params() -> MiningParams {
        MiningParams::new(0.2, 1.0, 0.7).unwrap()
    }

    fn names(v: &[ScoredPattern]) -> BTreeSet<String> {
        v.iter().map(|s| s.pattern.to_string()).collect()
    }

    fn set(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn init_thresholds_and_contents() {
        let st = IncrementalState::init_mining(&db(BASE_DB), &weights(), params()).unwrap();
        let t = st.thresholds();
        assert!((t.min_wes - 1.06).abs() < 0.01);
        assert!((t.min_wes_prime - 0.74).abs() < 0.01);
        assert_eq!(names(&st.frequent()), set(&["(a)", "(b)", "(c)"]));
        assert_eq!(names(&st.semi_frequent()), set(&["(a)(a)", "(a c)"]));
        st.validate().unwrap();
        let only_fs = IncrementalState::init_mining(&db(BASE_DB), &weights(), MiningParams::new(0.2, 1.0, 1.0).unwrap()).unwrap();
        assert!(only_fs.semi_frequent().is_empty());
        assert!(matches!(
            IncrementalState::init_mining(&UncertainDatabase::default(), &weights(), params()),
            Err(Error::EmptyDatabase)
        ));
    }

    #[test]
    fn uwsinc_walkthrough() {
        let mut st = IncrementalState::init_mining(&db(BASE_DB), &weights(), params()).unwrap();
        let fs = st.uwsinc_step(&db(DELTA1)).unwrap();
        assert_eq!(names(&fs), set(&["(a)", "(a)(a)", "(a c)", "(c)"]));
        assert_eq!(names(&st.semi_frequent()), set(&["(b)"]));
        let a = fs.iter().find(|s| s.pattern.to_string() == "(a)").unwrap();
        assert!((a.wes - 4.56).abs() < 0.01);
        let fs = st.uwsinc_step(&db(DELTA2)).unwrap();
        assert_eq!(names(&fs), set(&["(a)", "(a)(a)", "(c)"]));
        assert_eq!(names(&st.semi_frequent()), set(&["(a c)", "(b)"]));
        st.validate().unwrap();
    }

    #[test]
    fn uwsincplus_walkthrough() {
        let mut st = IncrementalState::init_mining(&db(BASE_DB), &weights(), params()).unwrap();
        let fs = st.uwsincplus_step(&db(DELTA1)).unwrap();
        assert!((st.lwes - 0.96).abs() < 0.01);
        assert_eq!(names(&fs), set(&["(a)", "(a)(a)", "(a c)", "(c)", "(c)(a)", "(f)"]));
        assert_eq!(names(&st.semi_frequent()), set(&["(c)(d)", "(b)", "(c)(f)", "(d)"]));
        assert_eq!(names(&st.promising()), set(&["(a)(f)", "(f)(c)"]));
        st.validate().unwrap();
        let fs = st.uwsincplus_step(&db(DELTA2)).unwrap();
        assert_eq!(names(&fs), set(&["(a)", "(a)(a)", "(c)", "(c)(a)", "(d)", "(f)"]));
        assert_eq!(names(&st.semi_frequent()), set(&["(a c)", "(b)", "(c)(d)"]));
        assert_eq!(
            names(&st.promising()),
            set(&["(a)(d)", "(c)(f)", "(a)(f)", "(e)", "(f)(c)", "(c)(a)(d)"])
        );
        st.validate().unwrap();
    }

    #[test]
    fn empty_delta_is_identity() {
        let mut st = IncrementalState::init_mining(&db(BASE_DB), &weights(), params()).unwrap();
        let before = st.frequent();
        assert_eq!(st.uwsinc_step(&UncertainDatabase::default()).unwrap(), before);
        assert_eq!(st.uwsincplus_step(&UncertainDatabase::default()).unwrap(), before);
    }

    #[test]
    fn wam_updates_match_scratch() {
        let w = weights();
        let mut acc = WamAccumulator::default();
        let wam = update_wam(&mut acc, &db(BASE_DB), &w).unwrap();
        assert!((wam - 0.88).abs() < 0.005);
        assert_eq!(update_wam(&mut acc, &UncertainDatabase::default(), &w).unwrap(), wam);
        let got = update_wam(&mut acc, &db(DELTA1), &w).unwrap();
        let (_, scratch) = fuws::preprocess(&db(BASE_DB).concat(&db(DELTA1)), &w).unwrap();
        assert!((got - scratch).abs() < 1e-9);
        let bad = parse_weights_str("a 0.5\n").unwrap();
        assert!(update_wam(&mut WamAccumulator::default(), &db(DELTA1), &bad).is_err());
    }

    #[test]
    fn maintained_wes_is_additive() {
        let mut st = IncrementalState::init_mining(&db(BASE_DB), &weights(), params()).unwrap();
        st.uwsinc_step(&db(DELTA1)).unwrap();
        let all = db(BASE_DB).concat(&db(DELTA1));
        for s in st.seq_trie.patterns() {
            let o = oracle_wes(&s.pattern, &all, &weights()).unwrap();
            assert!((s.wes - o).abs() < 1e-9, "{:?}", s.pattern);
        }
    }

    #[test]
    fn classification() {
        let st = IncrementalState::init_mining(&db(BASE_DB), &weights(), params()).unwrap();
        assert_eq!(st.classify(2.0), PatternClass::Frequent);
        assert_eq!(st.classify(0.9), PatternClass::SemiFrequent);
        assert_eq!(st.classify(0.1), PatternClass::Infrequent);
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut st = IncrementalState::init_mining(&db(BASE_DB), &weights(), params()).unwrap();
        st.uwsincplus_step(&db(DELTA1)).unwrap();
        let mut buf = Vec::new();
        st.write_checkpoint(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut back = IncrementalState::read_checkpoint(&text, &weights()).unwrap();
        assert_eq!(back.db_size, st.db_size);
        assert_eq!(back.wam_acc, st.wam_acc);
        assert_eq!(back.seq_trie.patterns(), st.seq_trie.patterns());
        assert_eq!(back.promising(), st.promising());
        let a = st.uwsincplus_step(&db(DELTA2)).unwrap();
        let b = back.uwsincplus_step(&db(DELTA2)).unwrap();
        assert_eq!(a, b);
        assert!(IncrementalState::read_checkpoint("1 2 3", &weights()).is_err());
    }

    #[test]
    fn stream_and_completeness() {
        let (mut base, _) = Stream::start(Algo::Baseline, &db(BASE_DB), &weights(), params()).unwrap();
        let (mut inc, _) = Stream::start(Algo::UwsInc, &db(BASE_DB), &weights(), params()).unwrap();
        let b = base.step(&db(DELTA1)).unwrap();
        let i = inc.step(&db(DELTA1)).unwrap();
        let c = completeness(&i.frequent, &b.frequent);
        assert!((0.0..=1.0).contains(&c));
        assert_eq!(completeness(&b.frequent, &b.frequent), 1.0);
        assert_eq!(completeness(&[], &[]), 1.0);
        assert_eq!("uwsinc+".parse::<Algo>().unwrap(), Algo::UwsIncPlus);
    }
}
