//! Dense integer view of the domain types.
//!
//! Every mined item must carry a weight, so the weight table fixes the item
//! universe. Codes are ranks in token order, which keeps code comparison
//! identical to `ItemId` comparison.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{ItemId, Kind, Pattern, UncertainDatabase, WeightTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemCode(pub u32);

impl ItemCode {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One growth step: how an item was appended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub kind: Kind,
    pub item: ItemCode,
}

#[derive(Debug, Clone)]
pub struct Codebook {
    tokens: Vec<ItemId>,
    weights: Vec<f64>,
    max_weight: f64,
}

impl Codebook {
    pub fn new(weights: &WeightTable) -> Arc<Self> {
        let (tokens, weights): (Vec<_>, Vec<_>) =
            weights.iter().map(|(k, w)| (k.clone(), w)).unzip();
        let max_weight = weights.iter().copied().fold(0.0, f64::max);
        Arc::new(Codebook {
            tokens,
            weights,
            max_weight,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn code(&self, item: &ItemId) -> Result<ItemCode> {
        self.tokens
            .binary_search(item)
            .map(|i| ItemCode(i as u32))
            .map_err(|_| Error::MissingWeight(item.clone()))
    }

    #[inline]
    pub fn weight(&self, code: ItemCode) -> f64 {
        self.weights[code.index()]
    }

    pub fn token(&self, code: ItemCode) -> &ItemId {
        &self.tokens[code.index()]
    }

    pub fn max_weight(&self) -> f64 {
        self.max_weight
    }

    pub fn encode_pattern(&self, pattern: &Pattern) -> Result<Vec<Edge>> {
        pattern
            .edges()
            .map(|(kind, item)| {
                Ok(Edge {
                    kind,
                    item: self.code(item)?,
                })
            })
            .collect()
    }

    pub fn decode_pattern(&self, edges: &[Edge]) -> Pattern {
        Pattern::from_edges(edges.iter().map(|e| (e.kind, self.token(e.item))))
            .expect("trie paths are valid patterns")
    }

    pub fn encode_db(&self, db: &UncertainDatabase) -> Result<EncodedDb> {
        let mut seqs = Vec::with_capacity(db.size());
        for s in db.sequences() {
            let mut items = Vec::with_capacity(s.item_count());
            let mut probs = Vec::with_capacity(s.item_count());
            let mut bounds = Vec::with_capacity(s.events.len() + 1);
            bounds.push(0u32);
            for e in &s.events {
                let start = items.len();
                for p in e.items() {
                    items.push(self.code(&p.item)?);
                    probs.push(p.prob);
                }
                // token order and code order agree, but sort defensively
                // against hand-built events
                if items[start..].windows(2).any(|w| w[0] >= w[1]) {
                    let mut pairs: Vec<_> = items[start..]
                        .iter()
                        .copied()
                        .zip(probs[start..].iter().copied())
                        .collect();
                    pairs.sort_by_key(|p| p.0);
                    for (k, (c, p)) in pairs.into_iter().enumerate() {
                        items[start + k] = c;
                        probs[start + k] = p;
                    }
                }
                bounds.push(items.len() as u32);
            }
            seqs.push(EncodedSeq {
                items,
                probs,
                bounds,
            });
        }
        Ok(EncodedDb { seqs })
    }
}

/// A sequence stored flat: event `e` spans `items[bounds[e]..bounds[e+1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSeq {
    pub items: Vec<ItemCode>,
    pub probs: Vec<f64>,
    pub bounds: Vec<u32>,
}

impl EncodedSeq {
    #[inline]
    pub fn event_count(&self) -> usize {
        self.bounds.len() - 1
    }

    #[inline]
    pub fn event_range(&self, e: usize) -> std::ops::Range<usize> {
        self.bounds[e] as usize..self.bounds[e + 1] as usize
    }

    /// Flat index of `item` inside event `e`.
    #[inline]
    pub fn find_in_event(&self, e: usize, item: ItemCode) -> Option<usize> {
        let r = self.event_range(e);
        let start = r.start;
        self.items[r].binary_search(&item).ok().map(|i| start + i)
    }

    /// Whether event `e` contains every item of the ascending `set`.
    pub fn event_contains_all(&self, e: usize, set: &[ItemCode]) -> bool {
        let ev = &self.items[self.event_range(e)];
        let mut j = 0;
        for &x in set {
            while j < ev.len() && ev[j] < x {
                j += 1;
            }
            if j == ev.len() || ev[j] != x {
                return false;
            }
            j += 1;
        }
        true
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EncodedDb {
    pub seqs: Vec<EncodedSeq>,
}

impl EncodedDb {
    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    /// `(sum of f_i * w_i, sum of f_i)` over all item occurrences.
    pub fn weighted_frequency(&self, book: &Codebook) -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for s in &self.seqs {
            for &c in &s.items {
                num += book.weight(c);
                den += 1.0;
            }
        }
        (num, den)
    }
}
