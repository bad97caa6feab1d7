//! Random inputs for property tests and benchmarks.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Event, ItemId, ProbItem, UncertainDatabase, WeightTable};

#[derive(Debug, Clone)]
pub struct Shape {
    pub sequences: RangeInclusive<usize>,
    pub events: RangeInclusive<usize>,
    pub event_items: RangeInclusive<usize>,
    pub alphabet: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            sequences: 1..=12,
            events: 1..=6,
            event_items: 1..=3,
            alphabet: 5,
        }
    }
}

fn token(i: usize) -> ItemId {
    ItemId::new(format!("i{i}")).expect("valid token")
}

/// Probabilities and weights on a 0.01 grid, so ties are common.
fn grid(rng: &mut impl Rng, lo: u32) -> f64 {
    rng.gen_range(lo..=100) as f64 / 100.0
}

pub fn random_weights(rng: &mut impl Rng, alphabet: usize) -> WeightTable {
    let mut w = WeightTable::new();
    for i in 0..alphabet {
        w.insert(token(i), grid(rng, 10)).expect("weight in range");
    }
    w
}

pub fn random_db(rng: &mut impl Rng, shape: &Shape, count: usize) -> UncertainDatabase {
    let mut db = UncertainDatabase::default();
    for _ in 0..count {
        let n_events = rng.gen_range(shape.events.clone());
        let events = (0..n_events)
            .map(|_| {
                let k = rng.gen_range(shape.event_items.clone()).min(shape.alphabet);
                let mut picked: Vec<usize> = (0..shape.alphabet).collect();
                let (chosen, _) = picked.partial_shuffle(rng, k);
                let items = chosen
                    .iter()
                    .map(|&i| ProbItem::new(token(i), grid(rng, 5)).expect("prob in range"))
                    .collect();
                Event::new(items).expect("distinct items")
            })
            .collect();
        db.push(events).expect("non-empty sequence");
    }
    db
}

/// A database of random size within `shape` and weights for its alphabet.
pub fn random_instance(rng: &mut impl Rng, shape: &Shape) -> (UncertainDatabase, WeightTable) {
    let weights = random_weights(rng, shape.alphabet);
    let n = rng.gen_range(shape.sequences.clone());
    (random_db(rng, shape, n), weights)
}

/// An initial database followed by `increments` non-empty increments.
pub fn random_stream(
    rng: &mut impl Rng,
    shape: &Shape,
    increments: usize,
) -> (UncertainDatabase, Vec<UncertainDatabase>, WeightTable) {
    let weights = random_weights(rng, shape.alphabet);
    let n = rng.gen_range(shape.sequences.clone());
    let init = random_db(rng, shape, n);
    let deltas = (0..increments)
        .map(|_| {
            let k = rng.gen_range(1..=(n / 2).max(1));
            random_db(rng, shape, k)
        })
        .collect();
    (init, deltas, weights)
}

/// A precise dataset in SPMF sequence format with skewed item popularity.
pub fn precise_spmf(rng: &mut impl Rng, sequences: usize, alphabet: usize, max_events: usize, max_event_items: usize) -> String {
    let mut out = String::new();
    for _ in 0..sequences {
        let n_events = rng.gen_range(1..=max_events);
        for _ in 0..n_events {
            let k = rng.gen_range(1..=max_event_items);
            let mut items: Vec<usize> = (0..k)
                .map(|_| {
                    let u: f64 = rng.gen();
                    ((u * u * alphabet as f64) as usize).min(alphabet - 1)
                })
                .collect();
            items.sort_unstable();
            items.dedup();
            for i in items {
                write!(out, "{} ", i + 1).expect("string write");
            }
            out.push_str("-1 ");
        }
        out.push_str("-2\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn instances_respect_shape() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let shape = Shape::default();
        for _ in 0..50 {
            let (db, w) = random_instance(&mut rng, &shape);
            assert!((1..=12).contains(&db.size()));
            assert_eq!(w.len(), 5);
            for s in db.sequences() {
                assert!((1..=6).contains(&s.events.len()));
                for e in &s.events {
                    assert!(e.items().iter().all(|p| w.get(&p.item).is_some()));
                }
            }
        }
    }

    #[test]
    fn precise_text_parses() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
        let text = precise_spmf(&mut rng, 30, 20, 5, 4);
        let seqs = crate::dataio::parse_precise_str(&text, crate::dataio::PreciseFormat::SpmfSeq).unwrap();
        assert_eq!(seqs.len(), 30);
    }
}
