//! Domain types shared by every stage of the miner.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for every threshold comparison.
pub const TOLERANCE: f64 = 1e-9;

/// `value >= threshold` with the crate-wide tolerance.
#[inline]
pub fn meets(value: f64, threshold: f64) -> bool {
    value >= threshold - TOLERANCE
}

/// An opaque item token, ordered lexicographically by its text.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ItemId(String);

impl ItemId {
    pub fn new(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.is_empty()
            || token.contains(':')
            || token.chars().any(char::is_whitespace)
            || token.contains('(')
            || token.contains(')')
            || token == "-1"
            || token == "-2"
        {
            return Err(Error::InvalidItem(token));
        }
        Ok(ItemId(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ItemId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        ItemId::new(s)
    }
}

impl From<ItemId> for String {
    fn from(id: ItemId) -> String {
        id.0
    }
}

impl FromStr for ItemId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ItemId::new(s)
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbItem {
    pub item: ItemId,
    pub prob: f64,
}

impl ProbItem {
    pub fn new(item: ItemId, prob: f64) -> Result<Self> {
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "probability {prob} of `{item}` outside (0, 1]"
            )));
        }
        Ok(ProbItem { item, prob })
    }
}

/// One itemset of an uncertain sequence. Items are strictly ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    items: Vec<ProbItem>,
}

impl Event {
    /// Sorts the items and rejects empty events and duplicates.
    pub fn new(mut items: Vec<ProbItem>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidParam("empty event".into()));
        }
        items.sort_by(|a, b| a.item.cmp(&b.item));
        if let Some(w) = items.windows(2).find(|w| w[0].item == w[1].item) {
            return Err(Error::InvalidParam(format!(
                "duplicate item `{}` in event",
                w[0].item
            )));
        }
        Ok(Event { items })
    }

    pub fn items(&self) -> &[ProbItem] {
        &self.items
    }

    pub fn prob_of(&self, item: &ItemId) -> Option<f64> {
        self.items
            .binary_search_by(|p| p.item.cmp(item))
            .ok()
            .map(|i| self.items[i].prob)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct USequence {
    pub id: usize,
    pub events: Vec<Event>,
}

impl USequence {
    pub fn item_count(&self) -> usize {
        self.events.iter().map(Event::len).sum()
    }
}

/// Ordered collection of uncertain sequences; ids are 1-based positions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UncertainDatabase {
    sequences: Vec<USequence>,
}

impl UncertainDatabase {
    pub fn new(sequences: Vec<Vec<Event>>) -> Result<Self> {
        let mut db = UncertainDatabase::default();
        for events in sequences {
            db.push(events)?;
        }
        Ok(db)
    }

    pub fn push(&mut self, events: Vec<Event>) -> Result<()> {
        if events.is_empty() {
            return Err(Error::InvalidParam("sequence without events".into()));
        }
        let id = self.sequences.len() + 1;
        self.sequences.push(USequence { id, events });
        Ok(())
    }

    pub fn sequences(&self) -> &[USequence] {
        &self.sequences
    }

    pub fn size(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Contiguous sub-range, renumbered from 1.
    pub fn slice(&self, range: std::ops::Range<usize>) -> UncertainDatabase {
        let sequences = self.sequences[range]
            .iter()
            .enumerate()
            .map(|(i, s)| USequence {
                id: i + 1,
                events: s.events.clone(),
            })
            .collect();
        UncertainDatabase { sequences }
    }

    /// `self` followed by `other`, renumbered.
    pub fn concat(&self, other: &UncertainDatabase) -> UncertainDatabase {
        let mut out = self.clone();
        for s in &other.sequences {
            let id = out.sequences.len() + 1;
            out.sequences.push(USequence {
                id,
                events: s.events.clone(),
            });
        }
        out
    }

    /// Per-item occurrence counts.
    pub fn item_frequencies(&self) -> BTreeMap<&ItemId, usize> {
        let mut freq = BTreeMap::new();
        for s in &self.sequences {
            for e in &s.events {
                for p in e.items() {
                    *freq.entry(&p.item).or_insert(0) += 1;
                }
            }
        }
        freq
    }
}

/// Item significance weights, each in (0, 1].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightTable {
    entries: BTreeMap<ItemId, f64>,
}

impl WeightTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a weight; a second entry for the same item is an error.
    pub fn insert(&mut self, item: ItemId, weight: f64) -> Result<()> {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "weight {weight} of `{item}` outside (0, 1]"
            )));
        }
        if self.entries.contains_key(&item) {
            return Err(Error::InvalidParam(format!("duplicate weight for `{item}`")));
        }
        self.entries.insert(item, weight);
        Ok(())
    }

    pub fn get(&self, item: &ItemId) -> Option<f64> {
        self.entries.get(item).copied()
    }

    pub fn weight(&self, item: &ItemId) -> Result<f64> {
        self.get(item).ok_or_else(|| Error::MissingWeight(item.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ItemId, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_weight(&self) -> f64 {
        self.entries.values().copied().fold(0.0, f64::max)
    }
}

impl<S: AsRef<str>> FromIterator<(S, f64)> for WeightTable {
    /// Panics on invalid entries; meant for literals in tests and examples.
    fn from_iter<T: IntoIterator<Item = (S, f64)>>(iter: T) -> Self {
        let mut table = WeightTable::new();
        for (item, w) in iter {
            table
                .insert(ItemId::new(item.as_ref()).expect("valid item"), w)
                .expect("valid weight");
        }
        table
    }
}

/// How a pattern grows by one item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// Item joins the last itemset.
    I,
    /// Item opens a new itemset.
    S,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::I => "I",
            Kind::S => "S",
        })
    }
}

/// A sequential pattern: non-empty itemsets, each strictly ascending.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    events: Vec<Vec<ItemId>>,
}

impl Pattern {
    pub fn new(events: Vec<Vec<ItemId>>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::InvalidPattern("no itemsets".into()));
        }
        for set in &events {
            if set.is_empty() {
                return Err(Error::InvalidPattern("empty itemset".into()));
            }
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidPattern(format!(
                    "itemset {set:?} not strictly ascending"
                )));
            }
        }
        Ok(Pattern { events })
    }

    pub fn single(item: ItemId) -> Self {
        Pattern {
            events: vec![vec![item]],
        }
    }

    pub fn events(&self) -> &[Vec<ItemId>] {
        &self.events
    }

    /// Total number of items.
    pub fn length(&self) -> usize {
        self.events.iter().map(Vec::len).sum()
    }

    /// Number of itemsets.
    pub fn size(&self) -> usize {
        self.events.len()
    }

    pub fn items(&self) -> impl Iterator<Item = &ItemId> {
        self.events.iter().flatten()
    }

    /// Items in growth order, each tagged with the extension that added it.
    pub fn edges(&self) -> impl Iterator<Item = (Kind, &ItemId)> {
        self.events.iter().flat_map(|set| {
            set.iter()
                .enumerate()
                .map(|(i, item)| (if i == 0 { Kind::S } else { Kind::I }, item))
        })
    }

    pub fn extend(&self, item: ItemId, kind: Kind) -> Result<Pattern> {
        let mut events = self.events.clone();
        match kind {
            Kind::S => events.push(vec![item]),
            Kind::I => {
                let last = events.last_mut().expect("pattern is non-empty");
                if last.last().is_some_and(|l| *l >= item) {
                    return Err(Error::OrderViolation { item });
                }
                last.push(item);
            }
        }
        Ok(Pattern { events })
    }

    /// Builds a pattern from growth edges; the first edge must be `S`.
    pub fn from_edges<'a>(edges: impl IntoIterator<Item = (Kind, &'a ItemId)>) -> Result<Self> {
        let mut events: Vec<Vec<ItemId>> = Vec::new();
        for (kind, item) in edges {
            match (kind, events.last_mut()) {
                (Kind::S, _) => events.push(vec![item.clone()]),
                (Kind::I, Some(last)) => {
                    if last.last().is_some_and(|l| l >= item) {
                        return Err(Error::OrderViolation { item: item.clone() });
                    }
                    last.push(item.clone());
                }
                (Kind::I, None) => {
                    return Err(Error::InvalidPattern("pattern starts with an i-extension".into()))
                }
            }
        }
        Pattern::new(events)
    }
}

/// `extend` as a free function.
pub fn extend(pattern: &Pattern, item: ItemId, kind: Kind) -> Result<Pattern> {
    pattern.extend(item, kind)
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for set in &self.events {
            f.write_str("(")?;
            for (i, item) in set.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                f.write_str(item.as_str())?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{self}>")
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Parses the `(a b)(c)` form.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPattern(format!("cannot parse `{s}`"));
        let mut events = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let set = body[..close]
                .split_whitespace()
                .map(ItemId::new)
                .collect::<Result<Vec<_>>>()?;
            events.push(set);
            rest = body[close + 1..].trim_start();
        }
        Pattern::new(events)
    }
}

/// Mean item weight over every item occurrence of the pattern.
pub fn s_weight(pattern: &Pattern, weights: &WeightTable) -> Result<f64> {
    let mut sum = 0.0;
    for item in pattern.items() {
        sum += weights.weight(item)?;
    }
    Ok(sum / pattern.length() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MiningParams {
    pub min_sup: f64,
    pub wgt_fct: f64,
    /// Buffer ratio; 1.0 keeps no semi-frequent patterns.
    pub mu: f64,
    pub lwes_factor: f64,
}

impl MiningParams {
    pub fn new(min_sup: f64, wgt_fct: f64, mu: f64) -> Result<Self> {
        let p = MiningParams {
            min_sup,
            wgt_fct,
            mu,
            lwes_factor: 2.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_lwes_factor(mut self, lwes_factor: f64) -> Result<Self> {
        self.lwes_factor = lwes_factor;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParam(format!("{what} = {v}")));
        if !(self.min_sup > 0.0 && self.min_sup <= 1.0) {
            return bad("min_sup must be in (0, 1]; got", self.min_sup);
        }
        if !(self.wgt_fct > 0.0 && self.wgt_fct.is_finite()) {
            return bad("wgt_fct must be > 0; got", self.wgt_fct);
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return bad("mu must be in (0, 1]; got", self.mu);
        }
        if !(self.lwes_factor > 0.0 && self.lwes_factor.is_finite()) {
            return bad("lwes_factor must be > 0; got", self.lwes_factor);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub db_size: usize,
    pub wam: f64,
    pub min_wes: f64,
    pub min_wes_prime: f64,
}

impl Thresholds {
    /// `minWES = min_sup * |DB| * WAM * wgt_fct`, `minWES' = minWES * mu`.
    pub fn new(min_sup: f64, db_size: usize, wam: f64, wgt_fct: f64, mu: f64) -> Self {
        let min_wes = min_sup * db_size as f64 * wam * wgt_fct;
        Thresholds {
            db_size,
            wam,
            min_wes,
            min_wes_prime: min_wes * mu,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredPattern {
    pub pattern: Pattern,
    pub wes: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> ItemId {
        ItemId::new(s).unwrap()
    }

    fn base_weights() -> WeightTable {
        [("a", 0.8), ("b", 1.0), ("c", 0.9), ("d", 0.9), ("e", 0.7), ("f", 0.9), ("g", 0.8)]
            .into_iter()
            .collect()
    }

    #[test]
    fn item_tokens() {
        assert!(ItemId::new("").is_err());
        assert!(ItemId::new("a:b").is_err());
        assert!(ItemId::new("a b").is_err());
        assert!(ItemId::new("-1").is_err());
        assert!(ItemId::new("-2").is_err());
        assert!(ItemId::new("-3").is_ok());
        assert!(id("10") < id("2"));
    }

    #[test]
    fn s_weight_examples() {
        let w = base_weights();
        let p: Pattern = "(a)(a c)".parse().unwrap();
        assert!((s_weight(&p, &w).unwrap() - 2.5 / 3.0).abs() < 1e-12);
        let b: Pattern = "(b)".parse().unwrap();
        assert_eq!(s_weight(&b, &w).unwrap(), 1.0);
        let w2: WeightTable = [("a", 0.8), ("b", 1.0), ("c", 0.9)].into_iter().collect();
        let p: Pattern = "(a b)(c)".parse().unwrap();
        assert!((s_weight(&p, &w2).unwrap() - 0.9).abs() < 1e-12);
        let z: Pattern = "(z)".parse().unwrap();
        assert!(matches!(s_weight(&z, &w), Err(Error::MissingWeight(i)) if i.as_str() == "z"));
    }

    #[test]
    fn extension_examples() {
        let ab: Pattern = "(a)(b)".parse().unwrap();
        let i = ab.extend(id("c"), Kind::I).unwrap();
        assert_eq!(i.to_string(), "(a)(b c)");
        assert_eq!((i.length(), i.size()), (3, 2));
        let s = ab.extend(id("c"), Kind::S).unwrap();
        assert_eq!(s.to_string(), "(a)(b)(c)");
        assert_eq!((s.length(), s.size()), (3, 3));
        assert_eq!(ab.to_string(), "(a)(b)");
        let a: Pattern = "(a)".parse().unwrap();
        assert!(matches!(a.extend(id("a"), Kind::I), Err(Error::OrderViolation { .. })));
    }

    #[test]
    fn pattern_parse_rejects_bad_input() {
        assert!("".parse::<Pattern>().is_err());
        assert!("()".parse::<Pattern>().is_err());
        assert!("(b a)".parse::<Pattern>().is_err());
        assert!("(a)(".parse::<Pattern>().is_err());
        let p: Pattern = " (a b) (c) ".parse().unwrap();
        assert_eq!(p.to_string(), "(a b)(c)");
    }

    #[test]
    fn edges_round_trip() {
        let p: Pattern = "(a c)(b)(a d e)".parse().unwrap();
        let edges: Vec<_> = p.edges().collect();
        assert_eq!(edges[0].0, Kind::S);
        assert_eq!(edges[1].0, Kind::I);
        assert_eq!(Pattern::from_edges(edges).unwrap(), p);
    }

    #[test]
    fn weights_reject_zero_and_duplicates() {
        let mut w = WeightTable::new();
        assert!(w.insert(id("a"), 0.0).is_err());
        assert!(w.insert(id("a"), 1.1).is_err());
        w.insert(id("a"), 0.5).unwrap();
        assert!(w.insert(id("a"), 0.6).is_err());
    }

    #[test]
    fn events_sort_and_reject_duplicates() {
        let e = Event::new(vec![
            ProbItem::new(id("c"), 0.5).unwrap(),
            ProbItem::new(id("a"), 0.4).unwrap(),
        ])
        .unwrap();
        assert_eq!(e.items()[0].item, id("a"));
        assert!(Event::new(vec![
            ProbItem::new(id("a"), 0.5).unwrap(),
            ProbItem::new(id("a"), 0.6).unwrap(),
        ])
        .is_err());
        assert!(ProbItem::new(id("a"), 0.0).is_err());
    }

    #[test]
    fn thresholds_formula() {
        let t = Thresholds::new(0.2, 6, 0.88, 0.75, 1.0);
        assert!((t.min_wes - 0.792).abs() < 1e-12);
        assert_eq!(t.min_wes, t.min_wes_prime);
        let t = Thresholds::new(0.2, 6, 0.88, 1.0, 0.7);
        assert!((t.min_wes_prime - 0.7392).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(MiningParams::new(0.0, 1.0, 1.0).is_err());
        assert!(MiningParams::new(1.1, 1.0, 1.0).is_err());
        assert!(MiningParams::new(0.1, 0.0, 1.0).is_err());
        assert!(MiningParams::new(0.1, 1.0, 0.0).is_err());
        assert!(MiningParams::new(0.1, 1.0, 0.5).unwrap().with_lwes_factor(0.0).is_err());
    }
}
