//! A CSP engine for instances that are finite powers of the template.
//!
//! An instance of the form `b^k` (one block per searched operation
//! symbol) has `|R|^k` constraint scopes per template relation `R`,
//! far too many to materialise already for modest tuple counts. This
//! engine never enumerates scopes. The constraint scopes of `R` in
//! `b^k` are exactly the r-tuples of points whose rows all lie in `R`,
//! so the arc-consistency support condition at a point `p` and
//! position `i` quantifies over row sequences compatible with the
//! digits of `p`. The sweep below evaluates that quantifier with an
//! automaton whose states are sets of (r-1)-tuples of nodes of a
//! hash-consed trie of the current value lists; memoisation on
//! (depth, state) keeps a sweep cheap whenever the lists have few
//! distinct slices, which holds throughout the searches this crate
//! performs.
//!
//! Soundness does not depend on the state count staying small; when it
//! grows past the configured budget the sweep stops with an error
//! instead of an unsound answer.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::relstruct::Structure;
use crate::{Error, Limits, Result};

pub type Mask = u64;

pub fn full_mask(n: usize) -> Mask {
    if n == 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, Debug)]
struct Relation {
    arity: usize,
    tuples: Vec<Vec<u8>>,
    /// Tuple indices grouped by (position, digit).
    by_pos_digit: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Copy, Debug)]
struct Block {
    exponent: usize,
    offset: usize,
    points: usize,
}

/// A CSP whose variables are the points of one power block per
/// searched symbol, with optional point merges and pinned values.
pub struct PowerCsp {
    domain: usize,
    relations: Vec<Relation>,
    blocks: Vec<Block>,
    point_class: Vec<u32>,
    class_count: usize,
    masks: Vec<Mask>,
    /// Bumped whenever any list changes; sweeps that already ran at
    /// the current version are skipped.
    version: u64,
    last_swept: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SweepOutcome {
    Fixed,
    Changed,
    Emptied,
}

#[derive(Clone)]
enum Allowed {
    Leaf(Mask),
    Node(Vec<u32>),
}

impl PowerCsp {
    /// Builds the instance `template^k1 (+) template^k2 (+) ...`, one
    /// block per exponent, with all lists full.
    pub fn new(template: &Structure, exponents: &[usize], limits: &Limits) -> Result<Self> {
        let n = template.size();
        if n == 0 || n > 64 {
            return Err(Error::GuardExceeded(format!(
                "engine requires 1..=64 domain elements, got {n}"
            )));
        }
        let mut relations = Vec::new();
        for (name, arity, tuples) in template.relations() {
            if arity > 5 {
                return Err(Error::GuardExceeded(format!(
                    "engine supports relation arity <= 5, {name} has arity {arity}"
                )));
            }
            let tuples: Vec<Vec<u8>> =
                tuples.iter().map(|t| t.iter().map(|&x| x as u8).collect()).collect();
            let mut by_pos_digit = vec![vec![Vec::new(); n]; arity];
            for (ti, t) in tuples.iter().enumerate() {
                for (pos, &d) in t.iter().enumerate() {
                    by_pos_digit[pos][d as usize].push(ti as u32);
                }
            }
            relations.push(Relation { arity, tuples, by_pos_digit });
        }
        let mut blocks = Vec::new();
        let mut offset = 0usize;
        for &k in exponents {
            let points = (n as u64)
                .checked_pow(k as u32)
                .filter(|&p| p <= limits.power_points)
                .ok_or_else(|| {
                    Error::GuardExceeded(format!("power block {n}^{k} exceeds the point budget"))
                })? as usize;
            blocks.push(Block { exponent: k, offset, points });
            offset += points;
        }
        let point_class: Vec<u32> = (0..offset as u32).collect();
        let masks = vec![full_mask(n); offset];
        let slots = blocks.len() * relations.iter().map(|r| r.arity).sum::<usize>();
        Ok(PowerCsp {
            domain: n,
            relations,
            blocks,
            point_class,
            class_count: offset,
            masks,
            version: 1,
            last_swept: vec![0; slots],
        })
    }

    pub fn block_offset(&self, block: usize) -> usize {
        self.blocks[block].offset
    }

    pub fn block_points(&self, block: usize) -> usize {
        self.blocks[block].points
    }

    /// Merges the classes of two global point indices.
    pub fn merge(&mut self, p: usize, q: usize) {
        let (a, b) = (self.find(p), self.find(q));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.point_class[hi as usize] = lo;
        }
    }

    fn find(&mut self, p: usize) -> u32 {
        let parent = self.point_class[p];
        if parent as usize == p {
            return parent;
        }
        let root = self.find(parent as usize);
        self.point_class[p] = root;
        root
    }

    /// Restricts a point's list to a single value.
    pub fn pin(&mut self, p: usize, value: usize) {
        let c = self.find(p) as usize;
        self.masks[c] &= 1 << value;
        self.version += 1;
    }

    /// Flattens the union-find and renumbers classes by least point;
    /// call once after all merges and pins.
    pub fn seal(&mut self) {
        let total = self.point_class.len();
        let mut merged: Vec<Mask> = Vec::new();
        let mut renumber: BTreeMap<u32, u32> = BTreeMap::new();
        let mut classes: Vec<u32> = Vec::with_capacity(total);
        for p in 0..total {
            let root = self.find(p);
            let next = merged.len() as u32;
            let c = *renumber.entry(root).or_insert_with(|| {
                merged.push(full_mask(self.domain));
                next
            });
            merged[c as usize] &= self.masks[root as usize];
            classes.push(c);
        }
        self.point_class = classes;
        self.class_count = merged.len();
        self.masks = merged;
        self.version += 1;
    }

    pub fn class_of(&self, p: usize) -> usize {
        self.point_class[p] as usize
    }

    /// Runs arc-consistency sweeps to the greatest fixed point.
    /// `Ok(false)` means some list emptied.
    pub fn propagate(&mut self, budget: &mut i64) -> Result<bool> {
        if self.masks.iter().any(|&m| m == 0) {
            return Ok(false);
        }
        loop {
            let mut all_clean = true;
            let mut slot = 0;
            for b in 0..self.blocks.len() {
                for r in 0..self.relations.len() {
                    for i in 0..self.relations[r].arity {
                        let this = slot;
                        slot += 1;
                        if self.last_swept[this] >= self.version {
                            continue;
                        }
                        all_clean = false;
                        let before = self.version;
                        match self.sweep(b, r, i, budget)? {
                            SweepOutcome::Emptied => return Ok(false),
                            SweepOutcome::Changed => {
                                self.version += 1;
                                // A changed sweep can enable more
                                // pruning by itself, so it stays dirty.
                                self.last_swept[this] = before;
                            }
                            SweepOutcome::Fixed => self.last_swept[this] = self.version,
                        }
                    }
                }
            }
            if all_clean {
                return Ok(true);
            }
        }
    }

    /// Complete backtracking search on top of [`PowerCsp::propagate`]:
    /// branches on the class with the smallest remaining list, values
    /// ascending. Returns one value per class, or `None` once the
    /// space is exhausted.
    pub fn solve(&mut self, budget: &mut i64) -> Result<Option<Vec<u8>>> {
        if !self.propagate(budget)? {
            return Ok(None);
        }
        let branch = (0..self.class_count)
            .filter(|&c| self.masks[c].count_ones() >= 2)
            .min_by_key(|&c| self.masks[c].count_ones());
        let Some(c) = branch else {
            // All lists singleton; arc consistency of singletons is
            // outright satisfaction.
            return Ok(Some(self.masks.iter().map(|m| m.trailing_zeros() as u8).collect()));
        };
        let saved = self.masks.clone();
        let mut values = saved[c];
        while values != 0 {
            let v = values.trailing_zeros();
            values &= values - 1;
            self.masks.copy_from_slice(&saved);
            self.masks[c] = 1 << v;
            self.version += 1;
            match self.solve(budget) {
                Ok(Some(solution)) => return Ok(Some(solution)),
                Ok(None) => {}
                Err(e) => return Err(e),
            }
        }
        self.masks = saved;
        self.version += 1;
        Ok(None)
    }

    /// One arc-consistency pass for (block, relation, position):
    /// prunes every class to the values supported at each of its
    /// points.
    fn sweep(
        &mut self,
        block: usize,
        rel: usize,
        position: usize,
        budget: &mut i64,
    ) -> Result<SweepOutcome> {
        let blk = self.blocks[block];
        let n = self.domain;
        let k = blk.exponent;
        let relation = &self.relations[rel];
        let others: Vec<usize> = (0..relation.arity).filter(|&j| j != position).collect();

        // Hash-consed trie of the current lists over this block:
        // level m stores its nodes as n consecutive child ids in a
        // flat array; the leaves are interned masks.
        let mut leaf_intern: BTreeMap<Mask, u32> = BTreeMap::new();
        let mut leaves: Vec<Mask> = Vec::new();
        let mut current: Vec<u32> = (0..blk.points)
            .map(|p| {
                let m = self.masks[self.point_class[blk.offset + p] as usize];
                *leaf_intern.entry(m).or_insert_with(|| {
                    leaves.push(m);
                    (leaves.len() - 1) as u32
                })
            })
            .collect();
        let mut levels: Vec<Vec<u32>> = vec![Vec::new(); k];
        for m in (0..k).rev() {
            // Batch-intern the chunks of n child ids by sorting.
            let count = current.len() / n;
            let mut order: Vec<u32> = (0..count as u32).collect();
            order.sort_unstable_by(|&a, &b| {
                current[a as usize * n..(a as usize + 1) * n]
                    .cmp(&current[b as usize * n..(b as usize + 1) * n])
            });
            let mut flat: Vec<u32> = Vec::new();
            let mut ids = vec![0u32; count];
            let mut prev: Option<u32> = None;
            for &chunk in &order {
                let this = &current[chunk as usize * n..(chunk as usize + 1) * n];
                let is_new = match prev {
                    Some(p) => this != &flat[p as usize * n..(p as usize + 1) * n],
                    None => true,
                };
                if is_new {
                    let id = (flat.len() / n) as u32;
                    flat.extend_from_slice(this);
                    prev = Some(id);
                }
                ids[chunk as usize] = prev.unwrap();
            }
            levels[m] = flat;
            current = ids;
        }
        debug_assert_eq!(current.len(), 1);
        *budget -= (blk.points * 2) as i64;

        let mut ctx = SweepContext {
            n,
            k,
            position,
            others,
            relation,
            levels: &levels,
            leaves: &leaves,
            states: Vec::new(),
            state_intern: BTreeMap::new(),
            memo: BTreeMap::new(),
            leaf_memo: BTreeMap::new(),
            allowed: Vec::new(),
            step_buf: Vec::new(),
        };
        let w = ctx.others.len();
        let initial = ctx.intern_state(alloc::vec![pack(&alloc::vec![current[0]; w])]);
        let root_allowed = ctx.compute(0, initial, budget)?;

        // Intersect every point's class list with its allowed mask.
        let mut outcome = SweepOutcome::Fixed;
        let mut stack: Vec<(u32, usize, usize)> = vec![(root_allowed, 0, blk.points)];
        while let Some((node, lo, hi)) = stack.pop() {
            match &ctx.allowed[node as usize] {
                Allowed::Leaf(mask) => {
                    // A leaf can cover more than one point when the
                    // whole subtree shares one allowed mask; apply it
                    // to every point in the range.
                    for p in lo..hi {
                        let class = self.point_class[blk.offset + p] as usize;
                        let new = self.masks[class] & mask;
                        if new != self.masks[class] {
                            self.masks[class] = new;
                            if new == 0 {
                                return Ok(SweepOutcome::Emptied);
                            }
                            outcome = SweepOutcome::Changed;
                        }
                    }
                }
                Allowed::Node(children) => {
                    let span = (hi - lo) / n;
                    for (d, &child) in children.iter().enumerate() {
                        stack.push((child, lo + d * span, lo + (d + 1) * span));
                    }
                }
            }
        }
        Ok(outcome)
    }
}

/// Packs up to four u32 node ids into a sortable key.
fn pack(tuple: &[u32]) -> u128 {
    debug_assert!(tuple.len() <= 4);
    let mut key = 0u128;
    for &id in tuple {
        key = key << 32 | id as u128;
    }
    key
}

fn unpack(key: u128, w: usize, out: &mut [u32]) {
    for i in 0..w {
        out[w - 1 - i] = (key >> (32 * i)) as u32;
    }
}

struct SweepContext<'a> {
    n: usize,
    k: usize,
    position: usize,
    others: Vec<usize>,
    relation: &'a Relation,
    levels: &'a [Vec<u32>],
    leaves: &'a [Mask],
    /// Interned automaton states: sorted sets of packed node-id
    /// tuples, one entry per tuple of "other column" trie nodes.
    states: Vec<Vec<u128>>,
    state_intern: BTreeMap<Vec<u128>, u32>,
    memo: BTreeMap<(usize, u32), u32>,
    leaf_memo: BTreeMap<u32, Mask>,
    allowed: Vec<Allowed>,
    step_buf: Vec<u128>,
}

impl SweepContext<'_> {
    fn intern_state(&mut self, tuples: Vec<u128>) -> u32 {
        if let Some(&id) = self.state_intern.get(tuples.as_slice()) {
            return id;
        }
        let id = self.states.len() as u32;
        self.states.push(tuples.clone());
        self.state_intern.insert(tuples, id);
        id
    }

    /// The allowed-mask trie for the subtree at depth `m` of any point
    /// whose prefix induced the automaton state `state_id`.
    fn compute(&mut self, m: usize, state_id: u32, budget: &mut i64) -> Result<u32> {
        if let Some(&id) = self.memo.get(&(m, state_id)) {
            return Ok(id);
        }
        *budget -= self.states[state_id as usize].len().max(1) as i64;
        if *budget < 0 {
            return Err(Error::GuardExceeded("power-instance engine state budget".into()));
        }
        let w = self.others.len();
        let id = if m == self.k {
            // Leaf: a value survives iff every reachable tuple of
            // lists supports it. An empty state means no scope reaches
            // this point at this position, so everything survives.
            let mask = if let Some(&mask) = self.leaf_memo.get(&state_id) {
                mask
            } else {
                let mut nodes = [0u32; 4];
                let mut mask: Mask = 0;
                'values: for u in 0..self.n {
                    for &tuple in &self.states[state_id as usize] {
                        unpack(tuple, w, &mut nodes);
                        let supported =
                            self.relation.by_pos_digit[self.position][u].iter().any(|&ti| {
                                let t = &self.relation.tuples[ti as usize];
                                self.others.iter().zip(&nodes).all(|(&j, &leaf_id)| {
                                    self.leaves[leaf_id as usize] >> t[j] & 1 == 1
                                })
                            });
                        if !supported {
                            continue 'values;
                        }
                    }
                    mask |= 1 << u;
                }
                self.leaf_memo.insert(state_id, mask);
                mask
            };
            self.allowed.push(Allowed::Leaf(mask));
            (self.allowed.len() - 1) as u32
        } else {
            let mut children = Vec::with_capacity(self.n);
            let mut collapsed: Option<u32> = None;
            let mut all_same = true;
            for digit in 0..self.n {
                // Step the automaton: template rows carrying `digit`
                // at `position` advance every tuple in the state.
                let mut nodes = [0u32; 4];
                let mut next = core::mem::take(&mut self.step_buf);
                next.clear();
                for ti in 0..self.states[state_id as usize].len() {
                    let tuple = self.states[state_id as usize][ti];
                    unpack(tuple, w, &mut nodes);
                    for &ri in &self.relation.by_pos_digit[self.position][digit] {
                        let t = &self.relation.tuples[ri as usize];
                        let mut key = 0u128;
                        for (&j, &node) in self.others.iter().zip(&nodes) {
                            let child = self.levels[m][node as usize * self.n + t[j] as usize];
                            key = key << 32 | child as u128;
                        }
                        next.push(key);
                    }
                }
                next.sort_unstable();
                next.dedup();
                *budget -= next.len() as i64;
                let next_id = self.intern_state(next.clone());
                next.clear();
                self.step_buf = next;
                let child = self.compute(m + 1, next_id, budget)?;
                match collapsed {
                    None => collapsed = Some(child),
                    Some(c) if c == child => {}
                    _ => all_same = false,
                }
                children.push(child);
            }
            // Children that all agree collapse into a single leaf when
            // they are leaves, shrinking the application walk.
            if all_same {
                if let Some(c) = collapsed {
                    if matches!(self.allowed[c as usize], Allowed::Leaf(_)) {
                        self.memo.insert((m, state_id), c);
                        return Ok(c);
                    }
                }
            }
            self.allowed.push(Allowed::Node(children));
            (self.allowed.len() - 1) as u32
        };
        self.memo.insert((m, state_id), id);
        Ok(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relstruct::{complete, directed_cycle, power};

    fn budget() -> i64 {
        Limits::default().engine_states as i64
    }

    /// The engine's verdict on b^k with pins must agree with explicit
    /// search on the materialised power structure.
    fn check_against_explicit(template: &Structure, k: usize, pins: &[(usize, usize)]) {
        let mut engine = PowerCsp::new(template, &[k], &Limits::default()).unwrap();
        for &(p, v) in pins {
            engine.pin(p, v);
        }
        engine.seal();
        let got = engine.solve(&mut budget()).unwrap();

        let explicit = power(template, k).unwrap();
        let mut init = crate::consistency::UnaryLists::full(explicit.size(), template.size());
        for &(p, v) in pins {
            init.set_singleton(p, v);
        }
        let want = crate::homsearch::search_hom(&explicit, template, &init).unwrap();
        assert_eq!(got.is_some(), want.is_some());
        if let Some(values) = got {
            let table: Vec<usize> =
                (0..explicit.size()).map(|p| values[engine.class_of(p)] as usize).collect();
            let m = crate::relstruct::Mapping::new(table, template.size()).unwrap();
            assert!(m.is_homomorphism(&explicit, template));
            for &(p, v) in pins {
                assert_eq!(m.apply(p), v);
            }
        }
    }

    #[test]
    fn powers_match_explicit_search() {
        check_against_explicit(&complete(3), 2, &[]);
        check_against_explicit(&complete(3), 2, &[(0, 0), (4, 1)]);
        check_against_explicit(&directed_cycle(3), 3, &[(0, 0)]);
        check_against_explicit(&complete(2), 3, &[(0, 0), (7, 1)]);
        check_against_explicit(&directed_cycle(2), 2, &[(1, 0)]);
    }

    #[test]
    fn unsatisfiable_pins_detected() {
        // In K_2^2 the points 01 and 10 are adjacent, so pinning both
        // to the same colour cannot extend to a homomorphism.
        let mut engine = PowerCsp::new(&complete(2), &[2], &Limits::default()).unwrap();
        engine.pin(1, 0);
        engine.pin(2, 0);
        engine.seal();
        assert!(engine.solve(&mut budget()).unwrap().is_none());
    }

    #[test]
    fn merges_identify_values() {
        // T_2 has the commutative polymorphism min, so merging the two
        // off-diagonal points of its square is satisfiable.
        let t2 = crate::relstruct::transitive_tournament(2);
        let mut engine = PowerCsp::new(&t2, &[2], &Limits::default()).unwrap();
        engine.merge(1, 2);
        engine.seal();
        let values = engine.solve(&mut budget()).unwrap().unwrap();
        assert_eq!(values[engine.class_of(1)], values[engine.class_of(2)]);

        // K_2 has no commutative binary polymorphism: the merged point
        // would need a loop.
        let mut engine = PowerCsp::new(&complete(2), &[2], &Limits::default()).unwrap();
        engine.merge(1, 2);
        engine.seal();
        assert!(engine.solve(&mut budget()).unwrap().is_none());
    }

    #[test]
    fn budget_is_enforced() {
        let mut engine = PowerCsp::new(&complete(3), &[3], &Limits::default()).unwrap();
        engine.seal();
        let mut tiny = 5i64;
        assert!(matches!(engine.propagate(&mut tiny), Err(Error::GuardExceeded(_))));
    }
}


