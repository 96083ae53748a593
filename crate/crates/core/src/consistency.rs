//! The propagation procedures: arc consistency (an AC-3 style
//! implementation generalised to arbitrary arities), strong path
//! consistency, generic k-consistency, and singleton arc consistency.
//!
//! All procedures compute the unique greatest fixed point below their
//! initial lists, so the output does not depend on processing order.
//! `None` signals rejection (some list became empty).

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::relstruct::{Mapping, Structure, Tuple};
use crate::{Error, Result};

/// Per-variable candidate sets over a template domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryLists {
    domain: usize,
    lists: Vec<BitSet>,
}

impl UnaryLists {
    /// Full lists: every variable may take every template value.
    pub fn full(vars: usize, domain: usize) -> Self {
        UnaryLists { domain, lists: vec![BitSet::full(domain); vars] }
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn var_count(&self) -> usize {
        self.lists.len()
    }

    pub fn get(&self, var: usize) -> &BitSet {
        &self.lists[var]
    }

    pub fn set(&mut self, var: usize, list: BitSet) {
        self.lists[var] = list;
    }

    pub fn set_singleton(&mut self, var: usize, value: usize) {
        self.lists[var] = BitSet::singleton(self.domain, value);
    }

    /// Intersects a variable's list with the given values.
    pub fn restrict(&mut self, var: usize, values: impl IntoIterator<Item = usize>) {
        let keep = BitSet::from_iter(self.domain, values);
        self.lists[var].intersect_with(&keep);
    }

    pub fn has_empty(&self) -> bool {
        self.lists.iter().any(|l| l.is_empty())
    }

    pub fn is_within(&self, other: &UnaryLists) -> bool {
        self.lists.iter().zip(&other.lists).all(|(a, b)| a.is_subset(b))
    }

    /// If every list is a singleton, the induced map.
    pub fn as_mapping(&self) -> Option<Mapping> {
        let table = self.lists.iter().map(|l| l.sole()).collect::<Option<Vec<_>>>()?;
        Mapping::new(table, self.domain).ok()
    }
}

fn check_signatures(instance: &Structure, template: &Structure) -> Result<()> {
    if instance.signature() != template.signature() {
        return Err(Error::SignatureMismatch);
    }
    Ok(())
}

/// Is there a template tuple with value `u` at position `i` whose other
/// entries lie in the scope's current lists?
fn has_support(
    tuples: &BTreeSet<Tuple>,
    scope: &[usize],
    lists: &UnaryLists,
    position: usize,
    value: usize,
) -> bool {
    tuples.iter().any(|s| {
        s[position] == value
            && s.iter().zip(scope).enumerate().all(|(j, (&b, &var))| {
                j == position || lists.get(var).contains(b)
            })
    })
}

/// Arc consistency with a worklist of constraints (AC-3 discipline):
/// the unique greatest fixed point below `init` of the support rule.
/// Returns `None` as soon as a list empties.
pub fn ac(instance: &Structure, template: &Structure, init: &UnaryLists) -> Result<Option<UnaryLists>> {
    check_signatures(instance, template)?;
    if init.var_count() != instance.size() || init.domain() != template.size() {
        return Err(Error::BadArgument("lists do not match instance/template".into()));
    }
    let mut lists = init.clone();
    if lists.has_empty() {
        return Ok(None);
    }

    // Constraints are the instance tuples, paired with their template
    // relation.
    let mut constraints: Vec<(&BTreeSet<Tuple>, &Tuple)> = Vec::new();
    for (name, _, tuples) in instance.relations() {
        let templ = template.relation(name).unwrap();
        for scope in tuples {
            constraints.push((templ, scope));
        }
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); instance.size()];
    for (ci, (_, scope)) in constraints.iter().enumerate() {
        for &v in scope.iter().collect::<BTreeSet<_>>() {
            incident[v].push(ci);
        }
    }

    let mut queue: VecDeque<usize> = (0..constraints.len()).collect();
    let mut queued = vec![true; constraints.len()];
    while let Some(ci) = queue.pop_front() {
        queued[ci] = false;
        let (templ, scope) = constraints[ci];
        for i in 0..scope.len() {
            let var = scope[i];
            let stale: Vec<usize> = lists
                .get(var)
                .iter()
                .filter(|&u| !has_support(templ, scope, &lists, i, u))
                .collect();
            if stale.is_empty() {
                continue;
            }
            for u in stale {
                lists.lists[var].remove(u);
            }
            if lists.get(var).is_empty() {
                return Ok(None);
            }
            for &cj in &incident[var] {
                if !queued[cj] {
                    queued[cj] = true;
                    queue.push_back(cj);
                }
            }
        }
    }
    Ok(Some(lists))
}

/// Per ordered variable pair, a set of template pairs; the diagonal
/// lists are restricted to diagonal pairs and simulate arc consistency.
///
/// Each list is stored twice, as row masks (`(u, v)` present iff bit
/// `v` of row `u`) and as column masks, so the composition rule tests
/// one intersection per surviving pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairLists {
    vars: usize,
    domain: usize,
    rows: Vec<u64>,
    cols: Vec<u64>,
}

impl PairLists {
    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    #[inline]
    fn row(&self, x: usize, y: usize, u: usize) -> u64 {
        self.rows[(x * self.vars + y) * self.domain + u]
    }

    #[inline]
    fn col(&self, x: usize, y: usize, w: usize) -> u64 {
        self.cols[(x * self.vars + y) * self.domain + w]
    }

    pub fn contains(&self, x: usize, y: usize, u: usize, w: usize) -> bool {
        self.row(x, y, u) >> w & 1 == 1
    }

    pub fn pairs(&self, x: usize, y: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.domain;
        (0..d).flat_map(move |u| {
            let mut m = self.row(x, y, u);
            core::iter::from_fn(move || {
                if m == 0 {
                    return None;
                }
                let w = m.trailing_zeros() as usize;
                m &= m - 1;
                Some((u, w))
            })
        })
    }

    fn remove(&mut self, x: usize, y: usize, u: usize, w: usize) {
        self.rows[(x * self.vars + y) * self.domain + u] &= !(1 << w);
        self.cols[(x * self.vars + y) * self.domain + w] &= !(1 << u);
    }

    fn list_is_empty(&self, x: usize, y: usize) -> bool {
        let base = (x * self.vars + y) * self.domain;
        self.rows[base..base + self.domain].iter().all(|&m| m == 0)
    }

    fn any_empty(&self) -> bool {
        (0..self.vars).any(|x| (0..self.vars).any(|y| self.list_is_empty(x, y)))
    }

    /// Pins the diagonal list of `x` to the single pair `(u, u)`.
    pub fn pin(&mut self, x: usize, u: usize) {
        let base = (x * self.vars + x) * self.domain;
        for v in 0..self.domain {
            self.rows[base + v] = 0;
            self.cols[base + v] = 0;
        }
        self.rows[base + u] = 1 << u;
        self.cols[base + u] = 1 << u;
    }

    /// The initial lists for an instance/template pair: `E(H)` for
    /// instance arcs, everything otherwise, diagonals cut to the
    /// diagonal of the template.
    pub fn initial(instance: &Structure, template: &Structure) -> Result<Self> {
        if !instance.is_digraph() || !template.is_digraph() {
            return Err(Error::NotADigraph);
        }
        let n = instance.size();
        let d = template.size();
        if d > 64 {
            return Err(Error::GuardExceeded("path consistency needs a template domain <= 64".into()));
        }
        let full: u64 = if d == 64 { !0 } else { (1 << d) - 1 };
        let mut lists = PairLists {
            vars: n,
            domain: d,
            rows: vec![full; n * n * d],
            cols: vec![full; n * n * d],
        };
        let mut edge_rows = vec![0u64; d];
        let mut edge_cols = vec![0u64; d];
        for (u, w) in template.arcs()? {
            edge_rows[u] |= 1 << w;
            edge_cols[w] |= 1 << u;
        }
        for (x, y) in instance.arcs()? {
            let base = (x * n + y) * d;
            for v in 0..d {
                lists.rows[base + v] &= edge_rows[v];
                lists.cols[base + v] &= edge_cols[v];
            }
        }
        for x in 0..n {
            let base = (x * n + x) * d;
            for v in 0..d {
                lists.rows[base + v] &= 1 << v;
                lists.cols[base + v] &= 1 << v;
            }
        }
        Ok(lists)
    }
}

/// Strong path consistency on digraphs: the greatest fixed point of
/// the composition rule over all ordered variable triples.
pub fn pc(instance: &Structure, template: &Structure) -> Result<Option<PairLists>> {
    let init = PairLists::initial(instance, template)?;
    Ok(pc_fixpoint(init))
}

/// Runs the path-consistency rules to their fixed point from
/// explicitly given lists.
pub fn pc_fixpoint(lists: PairLists) -> Option<PairLists> {
    let seed: Vec<(usize, usize)> =
        (0..lists.vars).flat_map(|x| (0..lists.vars).map(move |z| (x, z))).collect();
    pc_fixpoint_from(lists, &seed)
}

/// Re-establishes path consistency after the listed pairs shrank;
/// from an already consistent state this touches only the affected
/// triples, which makes pin-and-propagate loops cheap.
pub fn pc_fixpoint_from(mut lists: PairLists, dirty: &[(usize, usize)]) -> Option<PairLists> {
    let n = lists.vars;
    let d = lists.domain;
    if lists.any_empty() {
        return None;
    }
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let mut queued = vec![false; n * n];
    // A shrunken pair (x, z) can tighten any list whose composition
    // rule routes through x or z.
    fn enqueue_around(
        n: usize,
        x: usize,
        z: usize,
        queue: &mut VecDeque<(usize, usize)>,
        queued: &mut [bool],
    ) {
        for a in 0..n {
            for &(p, q) in &[(a, z), (x, a), (a, x), (z, a)] {
                if !queued[p * n + q] {
                    queued[p * n + q] = true;
                    queue.push_back((p, q));
                }
            }
        }
        if !queued[x * n + z] {
            queued[x * n + z] = true;
            queue.push_back((x, z));
        }
    }
    for &(x, z) in dirty {
        enqueue_around(n, x, z, &mut queue, &mut queued);
    }
    while let Some((x, z)) = queue.pop_front() {
        queued[x * n + z] = false;
        let mut removed = false;
        for y in 0..n {
            let mut emptied = true;
            for u in 0..d {
                let mut m = lists.row(x, z, u);
                while m != 0 {
                    let w = m.trailing_zeros() as usize;
                    m &= m - 1;
                    if lists.row(x, y, u) & lists.col(y, z, w) == 0 {
                        lists.remove(x, z, u, w);
                        removed = true;
                    } else {
                        emptied = false;
                    }
                }
            }
            if emptied {
                return None;
            }
        }
        if removed {
            enqueue_around(n, x, z, &mut queue, &mut queued);
        }
    }
    Some(lists)
}

/// Verdict of the k-consistency procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consistency {
    Accept,
    Reject,
}

/// The k-consistency procedure, `k >= 2`: maintains the sets of
/// partial homomorphisms on every variable subset of size at most
/// `k - 1` and removes maps that fail to extend to some additional
/// variable. Accepts iff no set empties.
pub fn k_consistency(instance: &Structure, template: &Structure, k: usize) -> Result<Consistency> {
    check_signatures(instance, template)?;
    if k < 2 {
        return Err(Error::BadArgument("k-consistency requires k >= 2".into()));
    }
    let n = instance.size();
    let d = template.size();
    let max_set = (k - 1).min(n);

    // Constraints grouped for the "all constraints inside a variable
    // set" checks.
    let constraints: Vec<(&BTreeSet<Tuple>, &Tuple)> = instance
        .relations()
        .flat_map(|(name, _, tuples)| {
            let templ = template.relation(name).unwrap();
            tuples.iter().map(move |scope| (templ, scope))
        })
        .collect();

    let satisfies_inside = |vars: &[usize], assignment: &BTreeMap<usize, usize>| -> bool {
        constraints.iter().all(|(templ, scope)| {
            if !scope.iter().all(|v| vars.contains(v)) {
                return true;
            }
            let tuple: Tuple = scope.iter().map(|v| assignment[v]).collect();
            templ.contains(&tuple)
        })
    };

    // Enumerate subsets of size 1..=max_set.
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    while let Some((cur, next)) = stack.pop() {
        if !cur.is_empty() {
            subsets.push(cur.clone());
        }
        if cur.len() < max_set {
            for v in next..n {
                let mut ext = cur.clone();
                ext.push(v);
                stack.push((ext, v + 1));
            }
        }
    }
    subsets.sort();
    let subset_index: BTreeMap<Vec<usize>, usize> =
        subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

    // Initial families: assignments satisfying all constraints inside
    // the subset.
    let mut families: Vec<BTreeSet<Tuple>> = Vec::with_capacity(subsets.len());
    for vars in &subsets {
        let mut fam = BTreeSet::new();
        let mut assignment = vec![0usize; vars.len()];
        loop {
            let map: BTreeMap<usize, usize> =
                vars.iter().copied().zip(assignment.iter().copied()).collect();
            if satisfies_inside(vars, &map) {
                fam.insert(assignment.clone());
            }
            let mut i = vars.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                assignment[i] += 1;
                if assignment[i] < d {
                    break;
                }
                assignment[i] = 0;
            }
            if assignment.iter().all(|&a| a == 0) {
                break;
            }
        }
        if fam.is_empty() {
            return Ok(Consistency::Reject);
        }
        families.push(fam);
    }

    // Fixed point of the extension rule.
    let mut changed = true;
    while changed {
        changed = false;
        for (si, vars) in subsets.iter().enumerate() {
            let mut stale: Vec<Tuple> = Vec::new();
            'assignments: for assignment in &families[si] {
                for z in 0..n {
                    if vars.contains(&z) {
                        continue;
                    }
                    let mut ext_vars: Vec<usize> = vars.clone();
                    ext_vars.push(z);
                    ext_vars.sort_unstable();
                    let extends = (0..d).any(|b| {
                        let map: BTreeMap<usize, usize> = vars
                            .iter()
                            .copied()
                            .zip(assignment.iter().copied())
                            .chain(core::iter::once((z, b)))
                            .collect();
                        if !satisfies_inside(&ext_vars, &map) {
                            return false;
                        }
                        // Every stored restriction of the extension
                        // must be present in its family.
                        subsets.iter().enumerate().all(|(sj, sub)| {
                            if sub.len() > ext_vars.len() || !sub.iter().all(|v| map.contains_key(v)) {
                                return true;
                            }
                            if !sub.contains(&z) {
                                return true; // unchanged by the extension
                            }
                            let restricted: Tuple = sub.iter().map(|v| map[v]).collect();
                            families[sj].contains(&restricted)
                        })
                    });
                    if !extends {
                        stale.push(assignment.clone());
                        continue 'assignments;
                    }
                }
            }
            for a in stale {
                families[si].remove(&a);
                changed = true;
            }
            if families[si].is_empty() {
                return Ok(Consistency::Reject);
            }
        }
        // Downward closure: a stored map must restrict into the
        // smaller families.
        for (si, vars) in subsets.iter().enumerate() {
            if vars.len() < 2 {
                continue;
            }
            let mut stale: Vec<Tuple> = Vec::new();
            for assignment in &families[si] {
                let ok = vars.iter().enumerate().all(|(drop, _)| {
                    let sub: Vec<usize> = vars
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    let restricted: Tuple = assignment
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != drop)
                        .map(|(_, &a)| a)
                        .collect();
                    families[subset_index[&sub]].contains(&restricted)
                });
                if !ok {
                    stale.push(assignment.clone());
                }
            }
            for a in stale {
                families[si].remove(&a);
                changed = true;
            }
            if families[si].is_empty() {
                return Ok(Consistency::Reject);
            }
        }
    }
    Ok(Consistency::Accept)
}

/// Singleton arc consistency: repeatedly pins a single value, runs AC
/// on a copy, and permanently removes values whose pin propagates to a
/// contradiction. The scan is lexicographic over (variable, value) and
/// restarts after every permanent removal.
pub fn sac(instance: &Structure, template: &Structure, init: &UnaryLists) -> Result<Option<UnaryLists>> {
    let mut lists = match ac(instance, template, init)? {
        Some(l) => l,
        None => return Ok(None),
    };
    'restart: loop {
        for var in 0..instance.size() {
            let values: Vec<usize> = lists.get(var).iter().collect();
            for b in values {
                let mut pinned = lists.clone();
                pinned.set_singleton(var, b);
                if ac(instance, template, &pinned)?.is_none() {
                    lists.lists[var].remove(b);
                    if lists.get(var).is_empty() {
                        return Ok(None);
                    }
                    // Re-establish arc consistency before rescanning.
                    lists = match ac(instance, template, &lists)? {
                        Some(l) => l,
                        None => return Ok(None),
                    };
                    continue 'restart;
                }
            }
        }
        return Ok(Some(lists));
    }
}
