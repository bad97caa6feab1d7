//! Prefix trie over patterns with typed (S/I) edges and per-node weighted
//! expected support accumulators.
//!
//! Nodes carry an explicit pattern-end flag: the incremental miner inserts
//! patterns whose prefixes are not stored (a promising `<(a)(f)>` without
//! `<(a)>`), so path nodes and stored patterns have to be told apart.

use std::io::{self, Write};
use std::sync::Arc;

use crate::encode::{Codebook, Edge, EncodedDb, EncodedSeq, ItemCode};
use crate::error::{Error, Result};
use crate::model::{meets, Kind, Pattern, ScoredPattern, UncertainDatabase};

pub type NodeId = u32;

const ROOT: NodeId = 0;

#[derive(Debug, Clone)]
struct Node {
    edge: Option<Edge>,
    parent: NodeId,
    /// Sorted by `(kind, item)`: I-children first, then S-children.
    children: Vec<NodeId>,
    wes: f64,
    terminal: bool,
}

#[derive(Debug, Clone)]
pub struct USeqTrie {
    nodes: Vec<Node>,
    free: Vec<NodeId>,
    book: Arc<Codebook>,
    pattern_count: usize,
}

impl USeqTrie {
    pub fn new(book: Arc<Codebook>) -> Self {
        USeqTrie {
            nodes: vec![Node {
                edge: None,
                parent: ROOT,
                children: Vec::new(),
                wes: 0.0,
                terminal: false,
            }],
            free: Vec::new(),
            book,
            pattern_count: 0,
        }
    }

    pub fn codebook(&self) -> &Arc<Codebook> {
        &self.book
    }

    /// Number of stored patterns.
    pub fn len(&self) -> usize {
        self.pattern_count
    }

    pub fn is_empty(&self) -> bool {
        self.pattern_count == 0
    }

    /// Live non-root nodes, including pure path nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - 1 - self.free.len()
    }

    fn edge(&self, id: NodeId) -> Edge {
        self.nodes[id as usize].edge.expect("non-root node")
    }

    fn child(&self, id: NodeId, edge: Edge) -> std::result::Result<usize, usize> {
        self.nodes[id as usize]
            .children
            .binary_search_by(|&c| self.edge(c).cmp(&edge))
    }

    fn alloc(&mut self, node: Node) -> NodeId {
        match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as NodeId
            }
        }
    }

    fn find(&self, edges: &[Edge]) -> Option<NodeId> {
        let mut cur = ROOT;
        for &e in edges {
            let pos = self.child(cur, e).ok()?;
            cur = self.nodes[cur as usize].children[pos];
        }
        Some(cur)
    }

    /// Inserts (or overwrites) a pattern given as growth edges.
    pub fn insert_edges(&mut self, edges: &[Edge], wes: f64) -> NodeId {
        debug_assert!(!edges.is_empty());
        debug_assert_eq!(edges[0].kind, Kind::S);
        let mut cur = ROOT;
        for &e in edges {
            cur = match self.child(cur, e) {
                Ok(pos) => self.nodes[cur as usize].children[pos],
                Err(pos) => {
                    let id = self.alloc(Node {
                        edge: Some(e),
                        parent: cur,
                        children: Vec::new(),
                        wes: 0.0,
                        terminal: false,
                    });
                    self.nodes[cur as usize].children.insert(pos, id);
                    id
                }
            };
        }
        let node = &mut self.nodes[cur as usize];
        if !node.terminal {
            node.terminal = true;
            self.pattern_count += 1;
        }
        node.wes = wes;
        cur
    }

    pub fn insert(&mut self, pattern: &Pattern, wes: f64) -> Result<()> {
        let edges = self.book.encode_pattern(pattern)?;
        self.insert_edges(&edges, wes);
        Ok(())
    }

    /// Stored weighted expected support of a pattern.
    pub fn get_edges(&self, edges: &[Edge]) -> Option<f64> {
        let id = self.find(edges)?;
        let n = &self.nodes[id as usize];
        (id != ROOT && n.terminal).then_some(n.wes)
    }

    pub fn get(&self, pattern: &Pattern) -> Option<f64> {
        let edges = self.book.encode_pattern(pattern).ok()?;
        self.get_edges(&edges)
    }

    pub fn contains_edges(&self, edges: &[Edge]) -> bool {
        self.get_edges(edges).is_some()
    }

    fn unmark_and_reclaim(&mut self, id: NodeId) {
        let node = &mut self.nodes[id as usize];
        debug_assert!(node.terminal);
        node.terminal = false;
        self.pattern_count -= 1;
        let mut cur = id;
        while cur != ROOT {
            let n = &self.nodes[cur as usize];
            if n.terminal || !n.children.is_empty() {
                break;
            }
            let parent = n.parent;
            let edge = self.edge(cur);
            let pos = self.child(parent, edge).expect("child is linked");
            self.nodes[parent as usize].children.remove(pos);
            self.free.push(cur);
            cur = parent;
        }
    }

    pub fn remove_edges(&mut self, edges: &[Edge]) -> bool {
        match self.find(edges) {
            Some(id) if id != ROOT && self.nodes[id as usize].terminal => {
                self.unmark_and_reclaim(id);
                true
            }
            _ => false,
        }
    }

    /// Removes a stored pattern; path nodes left without children or
    /// pattern-ends are reclaimed bottom-up.
    pub fn remove(&mut self, pattern: &Pattern) -> Result<()> {
        let edges = self
            .book
            .encode_pattern(pattern)
            .map_err(|_| Error::NotFound(pattern.to_string()))?;
        if self.remove_edges(&edges) {
            Ok(())
        } else {
            Err(Error::NotFound(pattern.to_string()))
        }
    }

    fn preorder(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.node_count());
        let mut stack: Vec<NodeId> = self.nodes[ROOT as usize].children.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            order.push(id);
            stack.extend(self.nodes[id as usize].children.iter().rev());
        }
        order
    }

    fn path(&self, mut id: NodeId) -> Vec<Edge> {
        let mut edges = Vec::new();
        while id != ROOT {
            edges.push(self.edge(id));
            id = self.nodes[id as usize].parent;
        }
        edges.reverse();
        edges
    }

    /// Visits stored patterns depth-first with their edges and WES.
    pub fn for_each(&self, mut f: impl FnMut(&[Edge], f64)) {
        fn walk(t: &USeqTrie, id: NodeId, path: &mut Vec<Edge>, f: &mut impl FnMut(&[Edge], f64)) {
            for &c in &t.nodes[id as usize].children {
                let n = &t.nodes[c as usize];
                path.push(n.edge.expect("non-root"));
                if n.terminal {
                    f(path, n.wes);
                }
                walk(t, c, path, f);
                path.pop();
            }
        }
        walk(self, ROOT, &mut Vec::new(), &mut f);
    }

    /// Stored patterns with `wes >= min_wes` (tolerant), depth-first order.
    pub fn collect(&self, min_wes: f64) -> Vec<ScoredPattern> {
        let mut out = Vec::new();
        self.for_each(|edges, wes| {
            if meets(wes, min_wes) {
                out.push(ScoredPattern {
                    pattern: self.book.decode_pattern(edges),
                    wes,
                });
            }
        });
        out
    }

    /// Every stored pattern.
    pub fn patterns(&self) -> Vec<ScoredPattern> {
        self.collect(f64::NEG_INFINITY)
    }

    /// Removes and returns every stored pattern whose WES satisfies `pred`.
    pub fn drain_where(&mut self, mut pred: impl FnMut(f64) -> bool) -> Vec<(Vec<Edge>, f64)> {
        let order = self.preorder();
        let mut drained = Vec::new();
        for &id in &order {
            let n = &self.nodes[id as usize];
            if n.terminal && pred(n.wes) {
                drained.push((self.path(id), n.wes));
            }
        }
        // reverse preorder visits children before parents
        for &id in order.iter().rev() {
            let n = &self.nodes[id as usize];
            if n.terminal && pred(n.wes) {
                self.unmark_and_reclaim(id);
            }
        }
        drained
    }

    /// Removes every stored pattern with `wes < min_wes` (tolerant).
    pub fn prune_below(&mut self, min_wes: f64) -> usize {
        self.drain_where(|w| !meets(w, min_wes)).len()
    }

    pub fn reset_wes(&mut self) {
        for n in &mut self.nodes {
            n.wes = 0.0;
        }
    }

    /// Adds each stored pattern's weighted expected support in `db`.
    pub fn sup_calc(&mut self, db: &UncertainDatabase) -> Result<()> {
        let enc = self.book.encode_db(db)?;
        self.sup_calc_encoded(&enc);
        Ok(())
    }

    /// Uses the parallel path when the `parallel` feature is enabled.
    pub fn sup_calc_encoded(&mut self, db: &EncodedDb) {
        #[cfg(feature = "parallel")]
        self.sup_calc_parallel(db);
        #[cfg(not(feature = "parallel"))]
        self.sup_calc_sequential(db);
    }

    pub fn sup_calc_sequential(&mut self, db: &EncodedDb) {
        if self.node_count() == 0 {
            return;
        }
        let mut acc = vec![0.0; self.nodes.len()];
        let mut scratch = Scratch::new(self.book.len());
        for seq in &db.seqs {
            scratch.scan(self, seq, &mut acc);
        }
        self.absorb(&acc);
    }

    /// Splits the database into a fixed number of contiguous chunks and sums
    /// per-chunk accumulators in chunk order, so the result does not depend
    /// on the thread count.
    #[cfg(feature = "parallel")]
    pub fn sup_calc_parallel(&mut self, db: &EncodedDb) {
        use rayon::prelude::*;

        const MAX_CHUNKS: usize = 64;
        const MIN_CHUNK: usize = 128;
        if self.node_count() == 0 || db.is_empty() {
            return;
        }
        let chunk = db.len().div_ceil(MAX_CHUNKS).max(MIN_CHUNK);
        if chunk >= db.len() {
            return self.sup_calc_sequential(db);
        }
        let this = &*self;
        let partials: Vec<Vec<f64>> = db
            .seqs
            .par_chunks(chunk)
            .map(|seqs| {
                let mut acc = vec![0.0; this.nodes.len()];
                let mut scratch = Scratch::new(this.book.len());
                for seq in seqs {
                    scratch.scan(this, seq, &mut acc);
                }
                acc
            })
            .collect();
        let mut total = vec![0.0; self.nodes.len()];
        for p in &partials {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        self.absorb(&total);
    }

    fn absorb(&mut self, acc: &[f64]) {
        for (n, a) in self.nodes.iter_mut().zip(acc) {
            n.wes += a;
        }
    }

    /// Checks structural invariants; returns a description of the first
    /// violation.
    pub fn check(&self) -> std::result::Result<(), String> {
        let mut count = 0;
        let mut stack = vec![ROOT];
        let mut seen = 0;
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id as usize];
            if id != ROOT {
                seen += 1;
                if n.terminal {
                    count += 1;
                } else if n.children.is_empty() {
                    return Err(format!("dangling path node {:?}", self.path(id)));
                }
            }
            let edges: Vec<Edge> = n.children.iter().map(|&c| self.edge(c)).collect();
            if edges.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("children of {:?} unsorted or duplicated", self.path(id)));
            }
            for (&c, e) in n.children.iter().zip(&edges) {
                if self.nodes[c as usize].parent != id {
                    return Err("broken parent link".into());
                }
                if e.kind == Kind::I {
                    match n.edge {
                        None => return Err("i-extension below the root".into()),
                        Some(pe) if pe.item >= e.item => {
                            return Err(format!("i-extension order at {:?}", self.path(c)))
                        }
                        _ => {}
                    }
                }
            }
            stack.extend(&n.children);
        }
        if count != self.pattern_count {
            return Err(format!("pattern count {} != {}", self.pattern_count, count));
        }
        if seen != self.node_count() {
            return Err("unreachable live nodes".into());
        }
        Ok(())
    }

    /// Writes a depth-first preorder snapshot, one node per line:
    /// `<depth> <S|I> <item> <wes>`. Path nodes that are not stored patterns
    /// carry `-` in place of the WES.
    pub fn write_snapshot(&self, w: &mut impl Write) -> io::Result<()> {
        fn walk(t: &USeqTrie, id: NodeId, depth: usize, w: &mut impl Write) -> io::Result<()> {
            for &c in &t.nodes[id as usize].children {
                let n = &t.nodes[c as usize];
                let e = n.edge.expect("non-root");
                write!(w, "{} {} {} ", depth, e.kind, t.book.token(e.item))?;
                if n.terminal {
                    writeln!(w, "{}", n.wes)?;
                } else {
                    writeln!(w, "-")?;
                }
                walk(t, c, depth + 1, w)?;
            }
            Ok(())
        }
        walk(self, ROOT, 1, w)
    }

    /// Reads `count` snapshot lines produced by [`write_snapshot`].
    ///
    /// [`write_snapshot`]: USeqTrie::write_snapshot
    pub fn read_snapshot(
        book: Arc<Codebook>,
        lines: &mut impl Iterator<Item = (usize, String)>,
        count: usize,
    ) -> Result<Self> {
        let mut trie = USeqTrie::new(book);
        let mut path: Vec<Edge> = Vec::new();
        for _ in 0..count {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(0, "truncated trie snapshot"))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(Error::parse(lineno, "expected `<depth> <kind> <item> <wes>`"));
            }
            let depth: usize = f[0]
                .parse()
                .map_err(|_| Error::parse(lineno, "bad depth"))?;
            if depth == 0 || depth > path.len() + 1 {
                return Err(Error::parse(lineno, "depth out of sequence"));
            }
            let kind = match f[1] {
                "S" => Kind::S,
                "I" if depth > 1 => Kind::I,
                _ => return Err(Error::parse(lineno, "bad edge kind")),
            };
            let item = f[2].parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
            let item = trie
                .book
                .code(&item)
                .map_err(|e| Error::parse(lineno, e.to_string()))?;
            path.truncate(depth - 1);
            path.push(Edge { kind, item });
            if kind == Kind::I && path[depth - 2].item >= item {
                return Err(Error::parse(lineno, "i-extension order violation"));
            }
            if f[3] == "-" {
                // path node: materialized by the next stored descendant
                continue;
            }
            let wes: f64 = f[3]
                .parse()
                .map_err(|_| Error::parse(lineno, "bad wes"))?;
            trie.insert_edges(&path, wes);
        }
        Ok(trie)
    }
}

/// Per-worker buffers for the SupCalc scan.
struct Scratch {
    /// `(event, prob)` occurrences of each item in the current sequence.
    occ: Vec<Vec<(u32, f64)>>,
    touched: Vec<ItemCode>,
    /// Position arrays, one per trie depth; level 0 is the root.
    levels: Vec<Vec<f64>>,
    /// Exclusive prefix maxima of `levels[d]`, built on demand.
    prefix_max: Vec<Vec<f64>>,
}

impl Scratch {
    fn new(alphabet: usize) -> Self {
        Scratch {
            occ: vec![Vec::new(); alphabet],
            touched: Vec::new(),
            levels: Vec::new(),
            prefix_max: Vec::new(),
        }
    }

    fn scan(&mut self, trie: &USeqTrie, seq: &EncodedSeq, acc: &mut [f64]) {
        for c in self.touched.drain(..) {
            self.occ[c.index()].clear();
        }
        for e in 0..seq.event_count() {
            for k in seq.event_range(e) {
                let c = seq.items[k];
                let list = &mut self.occ[c.index()];
                if list.is_empty() {
                    self.touched.push(c);
                }
                list.push((e as u32, seq.probs[k]));
            }
        }
        let n = seq.event_count();
        self.ensure_level(0, n);
        self.levels[0].fill(1.0);
        // the root sits before the first event: every position is reachable
        self.prefix_max[0].fill(1.0);
        self.traverse(trie, ROOT, 0, 0.0, 0, n, acc);
    }

    fn ensure_level(&mut self, depth: usize, n: usize) {
        while self.levels.len() <= depth {
            self.levels.push(Vec::new());
            self.prefix_max.push(Vec::new());
        }
        self.levels[depth].resize(n, 0.0);
        self.prefix_max[depth].resize(n, 0.0);
    }

    #[allow(clippy::too_many_arguments)]
    fn traverse(
        &mut self,
        trie: &USeqTrie,
        id: NodeId,
        depth: usize,
        wgt_sum: f64,
        itm_cnt: usize,
        n: usize,
        acc: &mut [f64],
    ) {
        let mut prefix_ready = id == ROOT;
        self.ensure_level(depth + 1, n);
        for &c in &trie.nodes[id as usize].children {
            let edge = trie.nodes[c as usize].edge.expect("non-root");
            if self.occ[edge.item.index()].is_empty() {
                continue;
            }
            if edge.kind == Kind::S && !prefix_ready {
                let (parent, pm) = (&self.levels[depth], &mut self.prefix_max[depth]);
                let mut run = 0.0f64;
                for m in 0..n {
                    pm[m] = run;
                    run = run.max(parent[m]);
                }
                prefix_ready = true;
            }
            let (lo, hi) = self.levels.split_at_mut(depth + 1);
            let parent = &lo[depth];
            let cur = &mut hi[0];
            cur.fill(0.0);
            let mut best = 0.0f64;
            for &(m, p) in &self.occ[edge.item.index()] {
                let m = m as usize;
                let v = match edge.kind {
                    Kind::S => self.prefix_max[depth][m] * p,
                    Kind::I => parent[m] * p,
                };
                cur[m] = v;
                best = best.max(v);
            }
            if best > 0.0 {
                let sum = wgt_sum + trie.book.weight(edge.item);
                let cnt = itm_cnt + 1;
                acc[c as usize] += best * (sum / cnt as f64);
                if !trie.nodes[c as usize].children.is_empty() {
                    self.traverse(trie, c, depth + 1, sum, cnt, n, acc);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ItemId, WeightTable};

    fn book() -> Arc<Codebook> {
        let w: WeightTable = [("a", 0.8), ("b", 1.0), ("c", 0.9), ("d", 0.9)]
            .into_iter()
            .collect();
        Codebook::new(&w)
    }

    fn p(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    fn sample_trie(book: Arc<Codebook>) -> USeqTrie {
        let mut t = USeqTrie::new(book);
        for s in ["(a)", "(a b)", "(b)", "(c)", "(c)(d)", "(d)"] {
            t.insert(&p(s), 0.0).unwrap();
        }
        t
    }

    fn stored(t: &USeqTrie) -> Vec<String> {
        t.patterns().into_iter().map(|s| s.pattern.to_string()).collect()
    }

    #[test]
    fn insertion_reuses_prefixes() {
        let mut t = sample_trie(book());
        assert_eq!(t.node_count(), 6);
        t.insert(&p("(a b)(c)"), 0.0).unwrap();
        assert_eq!(t.node_count(), 7);
        t.insert(&p("(b)(c)"), 0.0).unwrap();
        t.insert(&p("(c d)"), 0.0).unwrap();
        // the six original nodes plus three new leaves
        assert_eq!(t.node_count(), 9);
        assert_eq!(t.len(), 9);
        t.check().unwrap();
        assert_eq!(
            stored(&t),
            ["(a)", "(a b)", "(a b)(c)", "(b)", "(b)(c)", "(c)", "(c d)", "(c)(d)", "(d)"]
        );
    }

    #[test]
    fn insert_existing_overwrites_wes() {
        let mut t = sample_trie(book());
        t.insert(&p("(a b)"), 1.5).unwrap();
        t.insert(&p("(a b)"), 2.5).unwrap();
        assert_eq!(t.node_count(), 6);
        assert_eq!(t.get(&p("(a b)")), Some(2.5));
    }

    #[test]
    fn removal_reclaims_childless_nodes() {
        let mut t = sample_trie(book());
        for s in ["(a b)(c)", "(b)(c)", "(c d)"] {
            t.insert(&p(s), 0.0).unwrap();
        }
        t.remove(&p("(a b)(c)")).unwrap();
        assert_eq!(t.node_count(), 8);
        assert!(t.get(&p("(a b)")).is_some());
        assert!(t.get(&p("(a b)(c)")).is_none());
        t.check().unwrap();
        assert!(matches!(t.remove(&p("(a b)(c)")), Err(Error::NotFound(_))));
    }

    #[test]
    fn removing_an_internal_pattern_keeps_its_node() {
        let mut t = sample_trie(book());
        t.remove(&p("(a)")).unwrap();
        assert_eq!(t.node_count(), 6);
        assert_eq!(t.len(), 5);
        assert!(t.get(&p("(a)")).is_none());
        assert!(t.get(&p("(a b)")).is_some());
        t.remove(&p("(a b)")).unwrap();
        assert_eq!(t.node_count(), 4);
        t.check().unwrap();
    }

    #[test]
    fn non_prefix_closed_insert() {
        let mut t = USeqTrie::new(book());
        t.insert(&p("(a)(c)"), 0.5).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.node_count(), 2);
        assert_eq!(stored(&t), ["(a)(c)"]);
        t.check().unwrap();
    }

    fn walkthrough_db() -> EncodedDb {
        let db = crate::dataio::parse_uncertain_str("a:0.8 -1 b:0.6 -1 a:0.9 b:0.7 -1 c:0.3 -1 d:0.9 -1 -2\n")
            .unwrap();
        book().encode_db(&db).unwrap()
    }

    #[test]
    fn sup_calc_walkthrough_values() {
        let mut t = sample_trie(book());
        t.insert(&p("(b)(c)"), 0.0).unwrap();
        t.sup_calc_sequential(&walkthrough_db());
        let close = |s: &str, v: f64| {
            let got = t.get(&p(s)).unwrap();
            assert!((got - v).abs() < 1e-12, "{s}: {got} vs {v}");
        };
        close("(a)", 0.72);
        close("(a b)", 0.567);
        close("(b)", 0.7);
        close("(b)(c)", 0.1995);
        // (c)(d): 0.3 * 0.9 * 0.9
        close("(c)(d)", 0.243);
    }

    #[test]
    fn absent_pattern_contributes_nothing() {
        let mut t = USeqTrie::new(book());
        t.insert(&p("(d)(a)"), 0.0).unwrap();
        t.sup_calc_sequential(&walkthrough_db());
        assert_eq!(t.get(&p("(d)(a)")), Some(0.0));
    }

    #[test]
    fn collect_and_prune_after_walkthrough() {
        let mut t = sample_trie(book());
        t.insert(&p("(b)(c)"), 0.0).unwrap();
        t.sup_calc_sequential(&walkthrough_db());
        assert_eq!(t.collect(0.0).len(), t.len());
        let hi: Vec<_> = t.collect(0.6).into_iter().map(|s| (s.pattern.to_string(), s.wes)).collect();
        // (d) alone also clears 0.6 on this sequence: 0.9 * 0.9
        assert_eq!(hi.len(), 3);
        assert_eq!(hi[0].0, "(a)");
        assert_eq!(hi[1].0, "(b)");
        assert_eq!(hi[2].0, "(d)");
        let removed = t.prune_below(0.6);
        assert_eq!(removed, 4);
        assert_eq!(stored(&t), ["(a)", "(b)", "(d)"]);
        t.check().unwrap();
        assert_eq!(t.prune_below(0.0), 0);
        t.prune_below(f64::INFINITY);
        assert!(t.is_empty());
        assert_eq!(t.node_count(), 0);
        assert!(USeqTrie::new(book()).collect(0.0).is_empty());
    }

    #[test]
    fn reset_is_idempotent() {
        let mut t = sample_trie(book());
        t.sup_calc_sequential(&walkthrough_db());
        t.reset_wes();
        assert!(t.patterns().iter().all(|s| s.wes == 0.0));
        t.reset_wes();
        assert_eq!(t.node_count(), 6);
    }

    #[test]
    fn snapshot_round_trip() {
        let mut t = USeqTrie::new(book());
        t.insert(&p("(a)(c)"), 0.125).unwrap();
        t.insert(&p("(a b)"), 1.0 / 3.0).unwrap();
        t.insert(&p("(d)"), 2.0).unwrap();
        let mut buf = Vec::new();
        t.write_snapshot(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), t.node_count());
        assert!(text.starts_with("1 S a -\n2 I b 0.3333333333333333\n2 S c 0.125\n"));
        let mut lines = text.lines().map(String::from).enumerate();
        let back = USeqTrie::read_snapshot(book(), &mut lines, t.node_count()).unwrap();
        assert_eq!(back.patterns(), t.patterns());
        back.check().unwrap();
    }

    #[test]
    fn snapshot_rejects_bad_lines() {
        let mut lines = vec!["2 S a 0.1".to_string()].into_iter().enumerate();
        assert!(USeqTrie::read_snapshot(book(), &mut lines, 1).is_err());
        let mut lines = vec!["1 I a 0.1".to_string()].into_iter().enumerate();
        assert!(USeqTrie::read_snapshot(book(), &mut lines, 1).is_err());
        let mut lines = vec!["1 S zz 0.1".to_string()].into_iter().enumerate();
        assert!(USeqTrie::read_snapshot(book(), &mut lines, 1).is_err());
    }

    #[test]
    fn missing_weight_is_reported() {
        let mut t = USeqTrie::new(book());
        assert!(matches!(
            t.insert(&Pattern::single(ItemId::new("zz").unwrap()), 0.0),
            Err(Error::MissingWeight(_))
        ));
    }
}
