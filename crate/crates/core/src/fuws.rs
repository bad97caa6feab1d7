//! Static miner: suffix-max preprocessing, pattern growth over
//! pseudo-projections under the `wExpSup^cap` bound, and false-positive
//! removal with one SupCalc pass over the original database.

use std::sync::Arc;
use std::time::Instant;

use crate::encode::{Codebook, Edge, EncodedDb, EncodedSeq, ItemCode};
use crate::error::{Error, Result};
use crate::model::{meets, ItemId, Kind, Pattern, ScoredPattern, Thresholds, UncertainDatabase, WeightTable};
use crate::trie::USeqTrie;

/// Encoded database whose probabilities are replaced by the maximum over
/// the same item's occurrences at this and every later position.
#[derive(Debug, Clone)]
pub struct PreprocessedDb {
    book: Arc<Codebook>,
    db: EncodedDb,
}

impl PreprocessedDb {
    pub fn from_encoded(book: Arc<Codebook>, db: &EncodedDb) -> Self {
        let mut out = db.clone();
        let mut running = vec![0.0f64; book.len()];
        for seq in &mut out.seqs {
            for k in (0..seq.items.len()).rev() {
                let slot = &mut running[seq.items[k].index()];
                *slot = slot.max(seq.probs[k]);
                seq.probs[k] = *slot;
            }
            for &c in &seq.items {
                running[c.index()] = 0.0;
            }
        }
        PreprocessedDb { book, db: out }
    }

    pub fn codebook(&self) -> &Arc<Codebook> {
        &self.book
    }

    pub fn encoded(&self) -> &EncodedDb {
        &self.db
    }

    /// Decodes back into domain types, for inspection.
    pub fn to_database(&self) -> UncertainDatabase {
        use crate::model::{Event, ProbItem};
        let seqs = self.db.seqs.iter().map(|s| {
            (0..s.event_count())
                .map(|e| {
                    let items = s
                        .event_range(e)
                        .map(|k| ProbItem {
                            item: self.book.token(s.items[k]).clone(),
                            prob: s.probs[k],
                        })
                        .collect();
                    Event::new(items).expect("encoded events are valid")
                })
                .collect()
        });
        UncertainDatabase::new(seqs.collect()).expect("encoded sequences are non-empty")
    }
}

/// Suffix-max preprocessing plus the database's weighted arithmetic mean of
/// item weights.
pub fn preprocess(db: &UncertainDatabase, weights: &WeightTable) -> Result<(PreprocessedDb, f64)> {
    let book = Codebook::new(weights);
    let enc = book.encode_db(db)?;
    let wam = wam_of(&enc, &book);
    Ok((PreprocessedDb::from_encoded(book, &enc), wam))
}

pub(crate) fn wam_of(db: &EncodedDb, book: &Codebook) -> f64 {
    let (num, den) = db.weighted_frequency(book);
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjEntry {
    pub seq: u32,
    /// Event holding the prefix's last matched item.
    pub event: u32,
    /// Flat index of the first item after the match.
    pub next: u32,
}

/// Pseudo-projection of a preprocessed database on a prefix. The root
/// projection has an empty open itemset and spans whole sequences.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProjectedDb {
    pub entries: Vec<ProjEntry>,
    /// Items of the prefix's last itemset, ascending.
    pub open: Vec<ItemCode>,
}

impl ProjectedDb {
    pub fn root(pdb: &PreprocessedDb) -> Self {
        ProjectedDb {
            entries: (0..pdb.db.len() as u32)
                .map(|seq| ProjEntry { seq, event: 0, next: 0 })
                .collect(),
            open: Vec::new(),
        }
    }

    pub fn is_root(&self) -> bool {
        self.open.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Projects each entry at the first qualifying occurrence of `edge`.
    /// Entries whose remaining suffix would be empty are dropped.
    pub fn project(&self, pdb: &PreprocessedDb, edge: Edge) -> ProjectedDb {
        let mut entries = Vec::new();
        for en in &self.entries {
            let seq = &pdb.db.seqs[en.seq as usize];
            if let Some((e, k)) = self.first_occurrence(seq, en, edge) {
                let last = seq.event_count() - 1;
                if e < last || k + 1 < seq.bounds[e + 1] as usize {
                    entries.push(ProjEntry {
                        seq: en.seq,
                        event: e as u32,
                        next: k as u32 + 1,
                    });
                }
            }
        }
        let open = match edge.kind {
            Kind::S => vec![edge.item],
            Kind::I => {
                let mut o = self.open.clone();
                o.push(edge.item);
                o
            }
        };
        ProjectedDb { entries, open }
    }

    fn first_occurrence(&self, seq: &EncodedSeq, en: &ProjEntry, edge: Edge) -> Option<(usize, usize)> {
        let n = seq.event_count();
        let e0 = en.event as usize;
        match edge.kind {
            Kind::S => {
                let from = if self.is_root() { 0 } else { e0 + 1 };
                (from..n).find_map(|e| seq.find_in_event(e, edge.item).map(|k| (e, k)))
            }
            Kind::I => {
                let last = *self.open.last()?;
                if edge.item <= last {
                    return None;
                }
                if let Some(k) = seq.find_in_event(e0, edge.item) {
                    if k >= en.next as usize {
                        return Some((e0, k));
                    }
                }
                (e0 + 1..n).find_map(|e| {
                    let k = seq.find_in_event(e, edge.item)?;
                    seq.event_contains_all(e, &self.open).then_some((e, k))
                })
            }
        }
    }

    /// Builds the projection for a whole prefix by successive first-occurrence
    /// projection from the root.
    pub fn for_prefix(pdb: &PreprocessedDb, prefix: &Pattern) -> Result<ProjectedDb> {
        let mut proj = ProjectedDb::root(pdb);
        for edge in pdb.book.encode_pattern(prefix)? {
            proj = proj.project(pdb, edge);
        }
        Ok(proj)
    }
}

/// Aggregated statistics for one possible extension of a prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionCandidate {
    pub item: ItemId,
    pub kind: Kind,
    /// Sum over projected sequences of the item's best suffix probability.
    pub sum_maxpr: f64,
    /// Max over projected sequences of the item's best suffix probability.
    pub hat_p: f64,
    /// Number of projected sequences containing the extension.
    pub support: usize,
    pub item_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Determination {
    pub candidates: Vec<ExtensionCandidate>,
    /// Largest item weight anywhere in the projected suffixes.
    pub max_weight: f64,
}

/// Lists the S- and I-extension candidates of a projection, sorted with
/// I-extensions first and by item within each kind.
pub fn determine(pdb: &PreprocessedDb, proj: &ProjectedDb) -> Determination {
    let mut d = Determiner::new(pdb.book.len());
    let (cands, max_weight) = d.run(pdb, proj);
    let candidates = cands
        .into_iter()
        .map(|c| ExtensionCandidate {
            item: pdb.book.token(c.edge.item).clone(),
            kind: c.edge.kind,
            sum_maxpr: c.sum_maxpr,
            hat_p: c.hat_p,
            support: c.support as usize,
            item_weight: pdb.book.weight(c.edge.item),
        })
        .collect();
    Determination { candidates, max_weight }
}

/// `prefix_maxpr * hat_p * support` for one extension; the looser bound
/// kept for comparison runs.
pub fn exp_support_top(prefix_maxpr: f64, cand: &ExtensionCandidate) -> f64 {
    prefix_maxpr * cand.hat_p * cand.support as f64
}

#[derive(Debug, Clone, Copy)]
struct Cand {
    edge: Edge,
    sum_maxpr: f64,
    hat_p: f64,
    support: u32,
}

impl Cand {
    fn top(&self, maxpr: f64) -> f64 {
        maxpr * self.hat_p * self.support as f64
    }
}

/// One pair of per-kind accumulators.
#[derive(Clone)]
struct Acc {
    best: Vec<f64>,
    best_touched: Vec<ItemCode>,
    sum: Vec<f64>,
    hat: Vec<f64>,
    count: Vec<u32>,
    touched: Vec<ItemCode>,
}

impl Acc {
    fn new(n: usize) -> Self {
        Acc {
            best: vec![0.0; n],
            best_touched: Vec::new(),
            sum: vec![0.0; n],
            hat: vec![0.0; n],
            count: vec![0; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    fn see(&mut self, c: ItemCode, p: f64) {
        let b = &mut self.best[c.index()];
        if *b == 0.0 {
            self.best_touched.push(c);
        }
        *b = b.max(p);
    }

    fn flush_seq(&mut self) {
        for c in self.best_touched.drain(..) {
            let i = c.index();
            let p = std::mem::take(&mut self.best[i]);
            if self.count[i] == 0 {
                self.touched.push(c);
            }
            self.count[i] += 1;
            self.sum[i] += p;
            self.hat[i] = self.hat[i].max(p);
        }
    }

    fn drain(&mut self, kind: Kind, out: &mut Vec<Cand>) {
        self.touched.sort_unstable();
        for c in self.touched.drain(..) {
            let i = c.index();
            out.push(Cand {
                edge: Edge { kind, item: c },
                sum_maxpr: std::mem::take(&mut self.sum[i]),
                hat_p: std::mem::take(&mut self.hat[i]),
                support: std::mem::take(&mut self.count[i]),
            });
        }
    }
}

#[derive(Clone)]
struct Determiner {
    s: Acc,
    i: Acc,
}

impl Determiner {
    fn new(alphabet: usize) -> Self {
        Determiner {
            s: Acc::new(alphabet),
            i: Acc::new(alphabet),
        }
    }

    fn run(&mut self, pdb: &PreprocessedDb, proj: &ProjectedDb) -> (Vec<Cand>, f64) {
        let book = &pdb.book;
        let mut mxw = 0.0f64;
        let last_open = proj.open.last().copied();
        for en in &proj.entries {
            let seq = &pdb.db.seqs[en.seq as usize];
            let n = seq.event_count();
            match last_open {
                None => {
                    for k in 0..seq.items.len() {
                        self.s.see(seq.items[k], seq.probs[k]);
                        mxw = mxw.max(book.weight(seq.items[k]));
                    }
                }
                Some(last) => {
                    let e0 = en.event as usize;
                    for k in en.next as usize..seq.bounds[e0 + 1] as usize {
                        self.i.see(seq.items[k], seq.probs[k]);
                        mxw = mxw.max(book.weight(seq.items[k]));
                    }
                    for e in e0 + 1..n {
                        let hosts_open = seq.event_contains_all(e, &proj.open);
                        for k in seq.event_range(e) {
                            let c = seq.items[k];
                            self.s.see(c, seq.probs[k]);
                            if hosts_open && c > last {
                                self.i.see(c, seq.probs[k]);
                            }
                            mxw = mxw.max(book.weight(c));
                        }
                    }
                }
            }
            self.s.flush_seq();
            self.i.flush_seq();
        }
        let mut out = Vec::new();
        self.i.drain(Kind::I, &mut out);
        self.s.drain(Kind::S, &mut out);
        (out, mxw)
    }
}

/// Which expected-support bound gates an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Bound {
    #[default]
    Cap,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuwsOptions {
    pub bound: Bound,
    /// Record every evaluated extension.
    pub trace: bool,
    /// Grow top-level branches on the rayon pool (needs the `parallel`
    /// feature) and run SupCalc in parallel.
    pub parallel: bool,
}

impl Default for FuwsOptions {
    fn default() -> Self {
        FuwsOptions {
            bound: Bound::Cap,
            trace: false,
            parallel: true,
        }
    }
}

/// Bound values computed for one evaluated extension.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub pattern: Pattern,
    pub exp_sup_cap: f64,
    pub exp_sup_top: f64,
    pub wgt_cap: f64,
    /// Whether the extension became a candidate.
    pub accepted: bool,
}

impl Evaluation {
    pub fn w_exp_sup_cap(&self) -> f64 {
        self.exp_sup_cap * self.wgt_cap
    }
}

#[derive(Debug, Clone)]
pub struct FuwsOutcome {
    /// Survivors in depth-first trie order.
    pub patterns: Vec<ScoredPattern>,
    /// Survivors with their weighted expected support.
    pub trie: USeqTrie,
    pub thresholds: Thresholds,
    pub candidates: usize,
    pub false_positives: usize,
    pub trace: Vec<Evaluation>,
    pub preprocess_ms: f64,
    pub grow_ms: f64,
    pub filter_ms: f64,
}

/// Weighted sequential patterns of `db` with WES at least
/// `min_sup * |db| * WAM * wgt_fct`.
pub fn fuws(db: &UncertainDatabase, weights: &WeightTable, min_sup: f64, wgt_fct: f64) -> Result<Vec<ScoredPattern>> {
    Ok(fuws_with(db, weights, min_sup, wgt_fct, &FuwsOptions::default())?.patterns)
}

pub fn fuws_with(
    db: &UncertainDatabase,
    weights: &WeightTable,
    min_sup: f64,
    wgt_fct: f64,
    opts: &FuwsOptions,
) -> Result<FuwsOutcome> {
    let book = Codebook::new(weights);
    let enc = book.encode_db(db)?;
    mine_encoded(&book, &enc, min_sup, wgt_fct, opts)
}

fn check_params(min_sup: f64, wgt_fct: f64) -> Result<()> {
    if !(min_sup > 0.0 && min_sup.is_finite()) {
        return Err(Error::InvalidParam(format!("min_sup must be > 0; got {min_sup}")));
    }
    if !(wgt_fct > 0.0 && wgt_fct.is_finite()) {
        return Err(Error::InvalidParam(format!("wgt_fct must be > 0; got {wgt_fct}")));
    }
    Ok(())
}

/// The full pipeline over an already encoded database.
pub fn mine_encoded(
    book: &Arc<Codebook>,
    db: &EncodedDb,
    min_sup: f64,
    wgt_fct: f64,
    opts: &FuwsOptions,
) -> Result<FuwsOutcome> {
    check_params(min_sup, wgt_fct)?;
    let t0 = Instant::now();
    let wam = wam_of(db, book);
    let thresholds = Thresholds::new(min_sup, db.len(), wam, wgt_fct, 1.0);
    let pdb = PreprocessedDb::from_encoded(book.clone(), db);
    let t1 = Instant::now();

    let grower = Grower {
        pdb: &pdb,
        min_wes: thresholds.min_wes,
        bound: opts.bound,
        trace: opts.trace,
    };
    let (found, evals) = if db.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        grower.grow_all(opts.parallel)
    };
    let mut trie = USeqTrie::new(book.clone());
    for edges in &found {
        trie.insert_edges(edges, 0.0);
    }
    let candidates = trie.len();
    let t2 = Instant::now();

    if opts.parallel {
        trie.sup_calc_encoded(db);
    } else {
        trie.sup_calc_sequential(db);
    }
    trie.prune_below(thresholds.min_wes);
    let patterns = trie.collect(f64::NEG_INFINITY);
    let t3 = Instant::now();

    let trace = evals
        .into_iter()
        .map(|(edges, exp_sup_cap, exp_sup_top, wgt_cap, accepted)| Evaluation {
            pattern: book.decode_pattern(&edges),
            exp_sup_cap,
            exp_sup_top,
            wgt_cap,
            accepted,
        })
        .collect();
    let ms = |a: Instant, b: Instant| (b - a).as_secs_f64() * 1e3;
    Ok(FuwsOutcome {
        false_positives: candidates - patterns.len(),
        patterns,
        trie,
        thresholds,
        candidates,
        trace,
        preprocess_ms: ms(t0, t1),
        grow_ms: ms(t1, t2),
        filter_ms: ms(t2, t3),
    })
}

type RawEval = (Vec<Edge>, f64, f64, f64, bool);

struct Grower<'a> {
    pdb: &'a PreprocessedDb,
    min_wes: f64,
    bound: Bound,
    trace: bool,
}

struct Branch {
    found: Vec<Vec<Edge>>,
    evals: Vec<RawEval>,
}

impl Grower<'_> {
    /// Evaluates the root extensions, then grows each accepted branch.
    fn grow_all(&self, parallel: bool) -> (Vec<Vec<Edge>>, Vec<RawEval>) {
        let root = ProjectedDb::root(self.pdb);
        let mut det = Determiner::new(self.pdb.book.len());
        let mut top = Branch {
            found: Vec::new(),
            evals: Vec::new(),
        };
        let accepted = self.evaluate(&mut det, &root, &[], 1.0, 0.0, &mut top);
        let run = |det: &mut Determiner, (edge, maxpr, mxw): (Edge, f64, f64)| {
            let mut b = Branch {
                found: vec![vec![edge]],
                evals: Vec::new(),
            };
            let proj = root.project(self.pdb, edge);
            let mut prefix = vec![edge];
            self.grow(det, &proj, &mut prefix, maxpr, mxw, &mut b);
            b
        };

        #[cfg(feature = "parallel")]
        let branches: Vec<Branch> = if parallel {
            use rayon::prelude::*;
            let alphabet = self.pdb.book.len();
            accepted
                .into_par_iter()
                .map_init(|| Determiner::new(alphabet), run)
                .collect()
        } else {
            accepted.into_iter().map(|a| run(&mut det, a)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let branches: Vec<Branch> = {
            let _ = parallel;
            accepted.into_iter().map(|a| run(&mut det, a)).collect()
        };

        let mut found = Vec::new();
        let mut evals = top.evals;
        for b in branches {
            found.extend(b.found);
            evals.extend(b.evals);
        }
        (found, evals)
    }

    /// Scores every extension of `prefix`; returns the accepted ones with
    /// their child `maxPr` and max prefix weight.
    fn evaluate(
        &self,
        det: &mut Determiner,
        proj: &ProjectedDb,
        prefix: &[Edge],
        maxpr: f64,
        mxw: f64,
        out: &mut Branch,
    ) -> Vec<(Edge, f64, f64)> {
        let (cands, mxw_db) = det.run(self.pdb, proj);
        let mut accepted = Vec::new();
        for c in cands {
            let w = self.pdb.book.weight(c.edge.item);
            let mxw_after = mxw.max(w);
            let wgt_cap = mxw_after.max(mxw_db);
            let cap = maxpr * c.sum_maxpr;
            let top = c.top(maxpr);
            let gate = match self.bound {
                Bound::Cap => cap,
                Bound::Top => top,
            };
            let ok = meets(gate * wgt_cap, self.min_wes);
            if self.trace {
                let mut edges = prefix.to_vec();
                edges.push(c.edge);
                out.evals.push((edges, cap, top, wgt_cap, ok));
            }
            if ok {
                accepted.push((c.edge, maxpr * c.hat_p, mxw_after));
            }
        }
        accepted
    }

    fn grow(
        &self,
        det: &mut Determiner,
        proj: &ProjectedDb,
        prefix: &mut Vec<Edge>,
        maxpr: f64,
        mxw: f64,
        out: &mut Branch,
    ) {
        if proj.is_empty() {
            return;
        }
        let accepted = self.evaluate(det, proj, prefix, maxpr, mxw, out);
        for (edge, child_maxpr, child_mxw) in accepted {
            prefix.push(edge);
            out.found.push(prefix.clone());
            let child = proj.project(self.pdb, edge);
            self.grow(det, &child, prefix, child_maxpr, child_mxw, out);
            prefix.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{parse_uncertain_str, parse_weights_str};

    const BASE_DB: &str = "\
a:0.9 c:0.6 -1 a:0.7 -1 b:0.3 -1 d:0.7 -1 -2
a:0.6 c:0.4 -1 a:0.5 -1 a:0.4 b:0.3 -1 -2
a:0.3 -1 a:0.2 b:0.2 -1 a:0.4 b:0.3 g:0.5 -1 -2
a:0.1 c:0.1 -1 a:0.3 b:0.1 c:0.4 -1 -2
d:0.1 -1 a:0.4 -1 d:0.1 -1 a:0.5 c:0.6 -1 -2
b:0.3 -1 b:0.4 -1 a:0.1 -1 a:0.1 b:0.2 -1 -2
";
    const BASE_WEIGHTS: &str = "a 0.8\nb 1.0\nc 0.9\nd 0.9\ne 0.7\nf 0.9\ng 0.8\n";

    fn inputs() -> (UncertainDatabase, WeightTable) {
        (parse_uncertain_str(BASE_DB).unwrap(), parse_weights_str(BASE_WEIGHTS).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn suffix_max_preprocessing() {
        let w = parse_weights_str("a 1\n").unwrap();
        let db = parse_uncertain_str("a:0.3 -1 a:0.9 -1 -2\n").unwrap();
        let (pdb, _) = preprocess(&db, &w).unwrap();
        assert_eq!(pdb.encoded().seqs[0].probs, vec![0.9, 0.9]);
        let (db, w) = inputs();
        let (pdb, wam) = preprocess(&db, &w).unwrap();
        assert!(close(wam, 27.2 / 31.0, 1e-12));
        assert!(close(wam, 0.88, 0.005));
        // shape preserved
        for (a, b) in pdb.encoded().seqs.iter().zip(&Codebook::new(&w).encode_db(&db).unwrap().seqs) {
            assert_eq!(a.items, b.items);
            assert_eq!(a.bounds, b.bounds);
        }
        // first sequence: a at positions 0 and 2, 0.7 then 0.7
        assert_eq!(pdb.encoded().seqs[0].probs, vec![0.9, 0.6, 0.7, 0.3, 0.7]);
    }

    #[test]
    fn single_occurrence_db_is_unchanged() {
        let (_, w) = inputs();
        let db = parse_uncertain_str("a:0.3 b:0.2 -1 c:0.9 -1 -2\n").unwrap();
        let (pdb, _) = preprocess(&db, &w).unwrap();
        assert_eq!(pdb.to_database(), db);
    }

    #[test]
    fn root_determination() {
        let (db, w) = inputs();
        let (pdb, _) = preprocess(&db, &w).unwrap();
        let d = determine(&pdb, &ProjectedDb::root(&pdb));
        let items: Vec<_> = d.candidates.iter().map(|c| (c.kind, c.item.as_str())).collect();
        assert_eq!(
            items,
            [(Kind::S, "a"), (Kind::S, "b"), (Kind::S, "c"), (Kind::S, "d"), (Kind::S, "g")]
        );
        let a = &d.candidates[0];
        assert!(close(a.sum_maxpr, 0.9 + 0.6 + 0.4 + 0.3 + 0.5 + 0.1, 1e-12));
        assert_eq!(a.hat_p, 0.9);
        assert_eq!(a.support, 6);
        assert!(close(exp_support_top(1.0, a), 5.4, 1e-12));
        assert_eq!(d.max_weight, 1.0);
        assert!(determine(&pdb, &ProjectedDb::default()).candidates.is_empty());
    }

    #[test]
    fn i_extension_bound_for_ac() {
        let (db, w) = inputs();
        let (pdb, _) = preprocess(&db, &w).unwrap();
        let proj = ProjectedDb::for_prefix(&pdb, &"(a)".parse().unwrap()).unwrap();
        let d = determine(&pdb, &proj);
        let c = d
            .candidates
            .iter()
            .find(|c| c.kind == Kind::I && c.item.as_str() == "c")
            .unwrap();
        assert!(close(0.9 * c.sum_maxpr, 1.8, 1e-12));
        let ac = ProjectedDb::for_prefix(&pdb, &"(a c)".parse().unwrap()).unwrap();
        let b = determine(&pdb, &ac)
            .candidates
            .into_iter()
            .find(|c| c.kind == Kind::S && c.item.as_str() == "b")
            .unwrap();
        assert!(close(0.54 * b.sum_maxpr, 0.378, 1e-12));
    }

    #[test]
    fn growth_tree_values() {
        let (db, w) = inputs();
        let opts = FuwsOptions {
            trace: true,
            ..Default::default()
        };
        let out = fuws_with(&db, &w, 0.2 * 0.7, 1.0, &opts).unwrap();
        let cap = |s: &str| {
            let p: Pattern = s.parse().unwrap();
            out.trace.iter().find(|e| e.pattern == p).unwrap().exp_sup_cap
        };
        for (s, v) in [
            ("(a)", 2.8),
            ("(b)", 1.4),
            ("(c)", 2.0),
            ("(a)(a)", 2.25),
            ("(a)(b)", 1.08),
            ("(a)(c)", 0.9),
            ("(a c)", 1.8),
            ("(a c)(a)", 0.81),
        ] {
            assert!(close(cap(s), v, 1e-9), "{s}: {}", cap(s));
        }
        assert!(out.trace.iter().any(|e| e.pattern.to_string() == "(c)(a)" && e.accepted));
    }

    #[test]
    fn static_result() {
        let (db, w) = inputs();
        let out = fuws_with(&db, &w, 0.2 * 0.7, 1.0, &FuwsOptions::default()).unwrap();
        assert!(close(out.thresholds.min_wes, 0.74, 0.01));
        let got: Vec<_> = out.patterns.iter().map(|s| (s.pattern.to_string(), s.wes)).collect();
        let want = [("(a)", 2.24), ("(a c)", 1.02), ("(a)(a)", 1.032), ("(b)", 1.4), ("(c)", 1.8)];
        assert_eq!(got.len(), want.len());
        for ((gp, gw), (wp, ww)) in got.iter().zip(want) {
            assert_eq!(gp, wp);
            assert!(close(*gw, ww, 1e-9), "{gp}: {gw}");
        }
        assert_eq!(out.false_positives, out.candidates - 5);
        assert!(fuws(&db, &w, 1.0, 10.0).unwrap().is_empty());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let (db, w) = inputs();
        let par = fuws_with(&db, &w, 0.05, 1.0, &FuwsOptions::default()).unwrap();
        let seq = fuws_with(
            &db,
            &w,
            0.05,
            1.0,
            &FuwsOptions {
                parallel: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(par.patterns, seq.patterns);
        assert_eq!(par.candidates, seq.candidates);
    }

    #[test]
    fn top_bound_admits_more() {
        let (db, w) = inputs();
        let cap = fuws_with(&db, &w, 0.1, 1.0, &FuwsOptions::default()).unwrap();
        let top = fuws_with(
            &db,
            &w,
            0.1,
            1.0,
            &FuwsOptions {
                bound: Bound::Top,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(cap.candidates <= top.candidates);
        assert_eq!(cap.patterns, top.patterns);
    }

    #[test]
    fn errors_and_degenerate_inputs() {
        let (db, _) = inputs();
        let w = parse_weights_str("a 0.5\n").unwrap();
        assert!(matches!(fuws(&db, &w, 0.2, 1.0), Err(Error::MissingWeight(_))));
        let (_, w) = inputs();
        assert!(fuws(&UncertainDatabase::default(), &w, 0.2, 1.0).unwrap().is_empty());
        assert!(fuws(&db, &w, 0.0, 1.0).is_err());
    }
}
