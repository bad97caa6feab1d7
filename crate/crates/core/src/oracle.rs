//! Brute-force reference computations on the string-typed model. Nothing
//! here touches the encoded representation, the trie or the miner.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{meets, s_weight, Event, ItemId, Kind, Pattern, ScoredPattern, USequence, UncertainDatabase, WeightTable};

pub const MAX_EMBEDDINGS: usize = 1_000_000;
pub const MAX_SEQUENCES: usize = 20;
pub const MAX_EVENTS: usize = 8;
pub const MAX_ALPHABET: usize = 8;

/// Product of the probabilities of `set` inside `event`, if all present.
fn itemset_prob(set: &[ItemId], event: &Event) -> Option<f64> {
    set.iter().try_fold(1.0, |acc, item| event.prob_of(item).map(|p| acc * p))
}

/// Maximum embedding probability of `pattern` in `seq`, by enumerating every
/// embedding. Zero when there is none.
pub fn oracle_max_pr_s(pattern: &Pattern, seq: &USequence) -> Result<f64> {
    fn walk(sets: &[Vec<ItemId>], events: &[Event], from: usize, acc: f64, best: &mut f64, seen: &mut usize) -> Result<()> {
        let Some((set, rest)) = sets.split_first() else {
            *seen += 1;
            if *seen > MAX_EMBEDDINGS {
                return Err(Error::OracleGuard(format!("more than {MAX_EMBEDDINGS} embeddings")));
            }
            *best = best.max(acc);
            return Ok(());
        };
        for e in from..events.len() {
            if let Some(p) = itemset_prob(set, &events[e]) {
                walk(rest, events, e + 1, acc * p, best, seen)?;
            }
        }
        Ok(())
    }
    let mut best = 0.0;
    let mut seen = 0;
    walk(pattern.events(), &seq.events, 0, 1.0, &mut best, &mut seen)?;
    Ok(best)
}

/// Same quantity by dynamic programming over (itemset, event): the best
/// product that places itemset `k` exactly at event `e`.
pub fn dp_max_pr_s(pattern: &Pattern, seq: &USequence) -> f64 {
    let n = seq.events.len();
    let mut prev = vec![1.0f64; n + 1]; // prev[e]: best over events < e
    for set in pattern.events() {
        let mut cur = vec![0.0f64; n];
        for (e, ev) in seq.events.iter().enumerate() {
            if let Some(p) = itemset_prob(set, ev) {
                cur[e] = prev[e] * p;
            }
        }
        let mut run = 0.0f64;
        prev = std::iter::once(0.0)
            .chain(cur.iter().map(|&v| {
                run = run.max(v);
                run
            }))
            .collect();
    }
    prev[n]
}

pub fn oracle_exp_sup(pattern: &Pattern, db: &UncertainDatabase) -> Result<f64> {
    db.sequences().iter().map(|s| oracle_max_pr_s(pattern, s)).sum()
}

pub fn oracle_wes(pattern: &Pattern, db: &UncertainDatabase, weights: &WeightTable) -> Result<f64> {
    let w = s_weight(pattern, weights)?;
    Ok(oracle_exp_sup(pattern, db)? * w)
}

fn guard(db: &UncertainDatabase) -> Result<BTreeSet<ItemId>> {
    if db.size() > MAX_SEQUENCES {
        return Err(Error::OracleGuard(format!(
            "{} sequences, limit {MAX_SEQUENCES}",
            db.size()
        )));
    }
    if let Some(s) = db.sequences().iter().find(|s| s.events.len() > MAX_EVENTS) {
        return Err(Error::OracleGuard(format!(
            "sequence {} has {} events, limit {MAX_EVENTS}",
            s.id,
            s.events.len()
        )));
    }
    let alphabet: BTreeSet<ItemId> = db.item_frequencies().into_keys().cloned().collect();
    if alphabet.len() > MAX_ALPHABET {
        return Err(Error::OracleGuard(format!(
            "{} distinct items, limit {MAX_ALPHABET}",
            alphabet.len()
        )));
    }
    Ok(alphabet)
}

/// Every pattern with WES at least `min_wes`, found by exhaustive
/// enumeration. A pattern is expanded while its expected support times the
/// largest weight in the table still reaches `min_wes`. Output is depth-first
/// with i-extensions before s-extensions and items ascending.
pub fn oracle_mine(db: &UncertainDatabase, weights: &WeightTable, min_wes: f64) -> Result<Vec<ScoredPattern>> {
    let alphabet: Vec<ItemId> = guard(db)?.into_iter().collect();
    for item in &alphabet {
        weights.weight(item)?;
    }
    let max_w = weights.max_weight();
    let mut out = Vec::new();

    fn visit(
        p: Pattern,
        ctx: (&UncertainDatabase, &WeightTable, &[ItemId], f64, f64),
        out: &mut Vec<ScoredPattern>,
    ) -> Result<()> {
        let (db, weights, alphabet, max_w, min_wes) = ctx;
        let es = oracle_exp_sup(&p, db)?;
        if es <= 0.0 || !meets(es * max_w, min_wes) {
            return Ok(());
        }
        let wes = es * s_weight(&p, weights)?;
        let last = p.events().last().and_then(|s| s.last()).cloned();
        if meets(wes, min_wes) {
            out.push(ScoredPattern { pattern: p.clone(), wes });
        }
        for item in alphabet.iter().filter(|i| Some(*i) > last.as_ref()) {
            visit(p.extend(item.clone(), Kind::I)?, ctx, out)?;
        }
        for item in alphabet {
            visit(p.extend(item.clone(), Kind::S)?, ctx, out)?;
        }
        Ok(())
    }

    for item in &alphabet {
        visit(
            Pattern::single(item.clone()),
            (db, weights, &alphabet, max_w, min_wes),
            &mut out,
        )?;
    }
    Ok(out)
}
