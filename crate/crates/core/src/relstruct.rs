//! Finite relational structures, digraph helpers, constructions and
//! the core/automorphism machinery.
//!
//! Elements of a structure of size `n` are `0..n-1`; the empty domain
//! is rejected everywhere. Relations are stored as sorted,
//! deduplicated tuple sets, so structure equality is componentwise set
//! equality and all iteration is deterministic.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Limits, Result};

pub type Tuple = Vec<usize>;
pub type TupleSet = BTreeSet<Tuple>;

/// An ordered list of relation symbols with their arities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Self {
        Signature { symbols: symbols.into_iter().map(|(n, a)| (n.into(), a)).collect() }
    }

    /// The digraph signature: a single binary symbol `E`.
    pub fn digraph() -> Self {
        Signature::new([("E", 2)])
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }
}

/// A finite relational structure: a domain `0..size-1` and one tuple
/// set per signature symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Structure {
    signature: Signature,
    size: usize,
    relations: Vec<TupleSet>,
}

impl Structure {
    /// A structure with all relations empty.
    pub fn new(signature: Signature, size: usize) -> Self {
        let relations = vec![TupleSet::new(); signature.len()];
        Structure { signature, size, relations }
    }

    /// Assembles a structure without checking the invariants; pair
    /// with [`Structure::validate`] when the parts come from outside.
    ///
    /// Panics if `relations` is not aligned with the signature.
    pub fn from_parts(signature: Signature, size: usize, relations: Vec<TupleSet>) -> Self {
        assert_eq!(signature.len(), relations.len(), "one tuple set per symbol");
        Structure { signature, size, relations }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation(&self, name: &str) -> Option<&TupleSet> {
        self.signature.index_of(name).map(|i| &self.relations[i])
    }

    pub fn relation_at(&self, index: usize) -> &TupleSet {
        &self.relations[index]
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize, &TupleSet)> {
        self.signature
            .symbols
            .iter()
            .zip(&self.relations)
            .map(|((n, a), t)| (n.as_str(), *a, t))
    }

    pub fn total_tuples(&self) -> usize {
        self.relations.iter().map(|r| r.len()).sum()
    }

    /// Inserts a tuple, rejecting arity mismatches and out-of-range
    /// entries.
    pub fn insert_tuple(&mut self, name: &str, tuple: Tuple) -> Result<()> {
        let i = self
            .signature
            .index_of(name)
            .ok_or_else(|| Error::BadArgument(format!("unknown symbol {name}")))?;
        if tuple.len() != self.signature.symbols[i].1 {
            return Err(Error::BadArgument(format!(
                "arity mismatch for {name}: expected {}, got {}",
                self.signature.symbols[i].1,
                tuple.len()
            )));
        }
        if let Some(&e) = tuple.iter().find(|&&e| e >= self.size) {
            return Err(Error::BadArgument(format!("entry {e} out of range for size {}", self.size)));
        }
        self.relations[i].insert(tuple);
        Ok(())
    }

    /// All invariant violations; an empty list means well-formed.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.size == 0 {
            violations.push("empty domain".to_string());
        }
        let mut seen = BTreeSet::new();
        for (name, arity) in &self.signature.symbols {
            if !seen.insert(name.clone()) {
                violations.push(format!("duplicate symbol {name}"));
            }
            if *arity == 0 {
                violations.push(format!("symbol {name} has arity 0"));
            }
        }
        for ((name, arity), tuples) in self.signature.symbols.iter().zip(&self.relations) {
            for t in tuples {
                if t.len() != *arity {
                    violations.push(format!(
                        "arity mismatch in {name}: tuple of length {} under arity {arity}",
                        t.len()
                    ));
                } else if let Some(&e) = t.iter().find(|&&e| e >= self.size) {
                    violations.push(format!("entry {e} out of range in {name} (size {})", self.size));
                }
            }
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// True if the signature is the single binary symbol `E`.
    pub fn is_digraph(&self) -> bool {
        self.signature == Signature::digraph()
    }

    /// The arc set of a digraph as pairs.
    pub fn arcs(&self) -> Result<Vec<(usize, usize)>> {
        if !self.is_digraph() {
            return Err(Error::NotADigraph);
        }
        Ok(self.relations[0].iter().map(|t| (t[0], t[1])).collect())
    }
}

/// A total map between initial segments, the carrier of homomorphisms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mapping {
    table: Vec<usize>,
    target_size: usize,
}

impl Mapping {
    pub fn new(table: Vec<usize>, target_size: usize) -> Result<Self> {
        if let Some(&v) = table.iter().find(|&&v| v >= target_size) {
            return Err(Error::BadArgument(format!("target {v} out of range {target_size}")));
        }
        Ok(Mapping { table, target_size })
    }

    pub fn identity(size: usize) -> Self {
        Mapping { table: (0..size).collect(), target_size: size }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn source_size(&self) -> usize {
        self.table.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    /// `other` after `self` (first `self`, then `other`).
    pub fn then(&self, other: &Mapping) -> Result<Mapping> {
        if other.source_size() != self.target_size {
            return Err(Error::BadArgument("composition sizes do not match".into()));
        }
        Ok(Mapping {
            table: self.table.iter().map(|&x| other.table[x]).collect(),
            target_size: other.target_size,
        })
    }

    pub fn is_bijective(&self) -> bool {
        if self.table.len() != self.target_size {
            return false;
        }
        let mut seen = vec![false; self.target_size];
        for &v in &self.table {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.table.iter().copied().collect()
    }

    /// Does the map preserve every relation from `a` to `b`?
    pub fn is_homomorphism(&self, a: &Structure, b: &Structure) -> bool {
        if a.signature != b.signature
            || self.table.len() != a.size
            || self.target_size != b.size
        {
            return false;
        }
        for (ra, rb) in a.relations.iter().zip(&b.relations) {
            for t in ra {
                let image: Tuple = t.iter().map(|&x| self.table[x]).collect();
                if !rb.contains(&image) {
                    return false;
                }
            }
        }
        true
    }

    /// Preserves relations in both directions: `t` in `R^a` iff its
    /// image is in `R^b`, for all tuples over the source.
    pub fn is_strong_homomorphism(&self, a: &Structure, b: &Structure) -> bool {
        if !self.is_homomorphism(a, b) {
            return false;
        }
        // For bijections it is enough to check preimages of b-tuples
        // whose entries lie in the image.
        for (ra, rb) in a.relations.iter().zip(&b.relations) {
            for t in rb {
                let mut pre = Vec::with_capacity(t.len());
                let mut total = true;
                for &y in t {
                    match self.table.iter().position(|&v| v == y) {
                        Some(x) => pre.push(x),
                        None => {
                            total = false;
                            break;
                        }
                    }
                }
                if total && self.is_bijective() && !ra.contains(&pre) {
                    return false;
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Constructions

fn check_signature(a: &Structure, b: &Structure) -> Result<()> {
    if a.signature != b.signature {
        return Err(Error::SignatureMismatch);
    }
    Ok(())
}

/// The direct (categorical) product; the pair `(i, j)` is encoded as
/// `i * b.size + j`. A tuple is in a relation iff both componentwise
/// projections are.
pub fn direct_product(a: &Structure, b: &Structure) -> Result<Structure> {
    check_signature(a, b)?;
    let size = a
        .size
        .checked_mul(b.size)
        .ok_or_else(|| Error::GuardExceeded("product domain overflows".into()))?;
    let mut relations = Vec::with_capacity(a.relations.len());
    for (ra, rb) in a.relations.iter().zip(&b.relations) {
        let mut out = TupleSet::new();
        for ta in ra {
            for tb in rb {
                if ta.len() == tb.len() {
                    out.insert(ta.iter().zip(tb).map(|(&x, &y)| x * b.size + y).collect());
                }
            }
        }
        relations.push(out);
    }
    Ok(Structure { signature: a.signature.clone(), size, relations })
}

/// The k-th power; elements are base-`size` numerals with the first
/// coordinate most significant, matching iterated [`direct_product`].
pub fn power(a: &Structure, k: usize) -> Result<Structure> {
    if k == 0 {
        return Err(Error::BadArgument("power requires k >= 1".into()));
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = direct_product(&acc, a)?;
    }
    Ok(acc)
}

/// Encodes a tuple over `0..size-1` as an element of the k-th power.
pub fn power_index(size: usize, coords: &[usize]) -> usize {
    coords.iter().fold(0, |acc, &c| acc * size + c)
}

/// Decodes an element of the k-th power back into coordinates.
pub fn power_coords(size: usize, k: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for i in (0..k).rev() {
        out[i] = index % size;
        index /= size;
    }
    out
}

/// Disjoint union; elements of `b` are shifted by `a.size`.
pub fn disjoint_union(a: &Structure, b: &Structure) -> Result<Structure> {
    check_signature(a, b)?;
    if a.size == 0 || b.size == 0 {
        return Err(Error::InvalidStructure("empty domain".into()));
    }
    let mut relations = a.relations.clone();
    for (out, rb) in relations.iter_mut().zip(&b.relations) {
        for t in rb {
            out.insert(t.iter().map(|&x| x + a.size).collect());
        }
    }
    Ok(Structure { signature: a.signature.clone(), size: a.size + b.size, relations })
}

/// The substructure induced by `elems`, renumbered order-preservingly.
pub fn induced_substructure(a: &Structure, elems: &BTreeSet<usize>) -> Result<Structure> {
    if elems.is_empty() {
        return Err(Error::BadArgument("induced substructure on empty set".into()));
    }
    if let Some(&e) = elems.iter().find(|&&e| e >= a.size) {
        return Err(Error::BadArgument(format!("element {e} out of range")));
    }
    let index: Vec<Option<usize>> = {
        let mut v = vec![None; a.size];
        for (i, &e) in elems.iter().enumerate() {
            v[e] = Some(i);
        }
        v
    };
    let relations = a
        .relations
        .iter()
        .map(|r| {
            r.iter()
                .filter_map(|t| t.iter().map(|&x| index[x]).collect::<Option<Tuple>>())
                .collect()
        })
        .collect();
    Ok(Structure { signature: a.signature.clone(), size: elems.len(), relations })
}

/// Contracts two distinct vertices of a digraph; the merged vertex
/// inherits all in- and out-edges of both.
pub fn contract(g: &Structure, u: usize, v: usize) -> Result<Structure> {
    if !g.is_digraph() {
        return Err(Error::NotADigraph);
    }
    if u == v {
        return Err(Error::BadArgument("contract requires two distinct vertices".into()));
    }
    if u >= g.size || v >= g.size {
        return Err(Error::BadArgument("vertex out of range".into()));
    }
    // The merged vertex takes the lower slot; only the higher one is
    // removed from the numbering.
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    let map = |x: usize| -> usize {
        if x == u || x == v {
            lo
        } else {
            x - usize::from(x > hi)
        }
    };
    let mut edges = TupleSet::new();
    for t in &g.relations[0] {
        edges.insert(vec![map(t[0]), map(t[1])]);
    }
    Ok(Structure { signature: Signature::digraph(), size: g.size - 1, relations: vec![edges] })
}

// ---------------------------------------------------------------------------
// Digraph families

/// A digraph with the given arcs.
pub fn digraph(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Structure {
    let mut s = Structure::new(Signature::digraph(), n);
    for (u, v) in arcs {
        s.insert_tuple("E", vec![u, v]).expect("arc in range");
    }
    s
}

/// An undirected graph as a symmetric digraph.
pub fn graph(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Structure {
    let mut s = Structure::new(Signature::digraph(), n);
    for (u, v) in edges {
        s.insert_tuple("E", vec![u, v]).expect("edge in range");
        s.insert_tuple("E", vec![v, u]).expect("edge in range");
    }
    s
}

/// The complete loopless graph on `n` vertices.
pub fn complete(n: usize) -> Structure {
    graph(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// The undirected cycle on `n` vertices.
pub fn cycle(n: usize) -> Structure {
    graph(n, (0..n).map(|u| (u, (u + 1) % n)))
}

/// The directed cycle on `n` vertices.
pub fn directed_cycle(n: usize) -> Structure {
    digraph(n, (0..n).map(|u| (u, (u + 1) % n)))
}

/// The directed path with `n` edges (`n + 1` vertices).
pub fn directed_path(n: usize) -> Structure {
    digraph(n + 1, (0..n).map(|u| (u, u + 1)))
}

/// The undirected path with `n` edges.
pub fn path(n: usize) -> Structure {
    graph(n + 1, (0..n).map(|u| (u, u + 1)))
}

/// The transitive tournament on `n` vertices: `(i, j)` iff `i < j`.
pub fn transitive_tournament(n: usize) -> Structure {
    digraph(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// `n` vertices, no edges.
pub fn edgeless(n: usize) -> Structure {
    digraph(n, [])
}

/// Shape flags of a digraph, computed exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DigraphPredicates {
    pub has_loop: bool,
    pub is_symmetric: bool,
    pub is_bipartite: bool,
    pub is_smooth: bool,
    pub is_disjoint_union_of_directed_cycles: bool,
}

/// Computes the shape flags used by the classifiers. Bipartiteness is
/// decided on the undirected shadow by 2-colouring; a loop makes a
/// graph non-bipartite.
pub fn structure_predicates(g: &Structure) -> Result<DigraphPredicates> {
    let arcs = g.arcs()?;
    let n = g.size;
    let has_loop = arcs.iter().any(|&(u, v)| u == v);
    let is_symmetric = arcs.iter().all(|&(u, v)| g.relations[0].contains(&vec![v, u]));

    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &arcs {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut colour = vec![None; n];
    let mut is_bipartite = true;
    'outer: for s in 0..n {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(false);
        let mut queue = vec![s];
        while let Some(u) = queue.pop() {
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(!colour[u].unwrap());
                        queue.push(v);
                    }
                    Some(c) => {
                        if c == colour[u].unwrap() {
                            is_bipartite = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
    }

    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for &(u, v) in &arcs {
        outdeg[u] += 1;
        indeg[v] += 1;
    }
    let is_smooth = (0..n).all(|v| indeg[v] > 0 && outdeg[v] > 0);
    let is_disjoint_union_of_directed_cycles = (0..n).all(|v| indeg[v] == 1 && outdeg[v] == 1);

    Ok(DigraphPredicates {
        has_loop,
        is_symmetric,
        is_bipartite,
        is_smooth,
        is_disjoint_union_of_directed_cycles,
    })
}

/// Weakly connected components of a digraph, each sorted.
pub fn weakly_connected_components(g: &Structure) -> Result<Vec<Vec<usize>>> {
    let arcs = g.arcs()?;
    let mut adj = vec![Vec::new(); g.size];
    for &(u, v) in &arcs {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; g.size];
    let mut components = Vec::new();
    for s in 0..g.size {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    Ok(components)
}

// ---------------------------------------------------------------------------
// Automorphisms, orbits, isomorphism

fn guard_exhaustive(a: &Structure, limits: &Limits) -> Result<()> {
    if a.size > limits.exhaustive_domain {
        return Err(Error::GuardExceeded(format!(
            "exhaustive search needs size <= {}, got {}",
            limits.exhaustive_domain, a.size
        )));
    }
    Ok(())
}

/// Backtracking enumeration of bijective strong homomorphisms a -> b.
fn isomorphisms_impl(a: &Structure, b: &Structure, first_only: bool) -> Vec<Mapping> {
    let mut found = Vec::new();
    if a.size != b.size || a.signature != b.signature {
        return found;
    }
    let n = a.size;
    let mut img: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];

    // Checks tuples all of whose entries are already assigned, in both
    // directions; incremental, so it only looks at tuples touching the
    // last assigned element.
    fn consistent(a: &Structure, b: &Structure, img: &[usize], used: &[bool]) -> bool {
        let m = img.len();
        let last = m - 1;
        for (ra, rb) in a.relations.iter().zip(&b.relations) {
            for t in ra {
                if t.contains(&last) && t.iter().all(|&x| x < m) {
                    let image: Tuple = t.iter().map(|&x| img[x]).collect();
                    if !rb.contains(&image) {
                        return false;
                    }
                }
            }
            for t in rb {
                if t.contains(&img[last]) && t.iter().all(|&y| used[y]) {
                    let pre: Tuple = t
                        .iter()
                        .map(|&y| img.iter().position(|&v| v == y).unwrap())
                        .collect();
                    if !ra.contains(&pre) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn rec(
        a: &Structure,
        b: &Structure,
        img: &mut Vec<usize>,
        used: &mut Vec<bool>,
        found: &mut Vec<Mapping>,
        first_only: bool,
    ) {
        if first_only && !found.is_empty() {
            return;
        }
        if img.len() == a.size {
            found.push(Mapping { table: img.clone(), target_size: b.size });
            return;
        }
        for v in 0..b.size {
            if used[v] {
                continue;
            }
            img.push(v);
            used[v] = true;
            if consistent(a, b, img, used) {
                rec(a, b, img, used, found, first_only);
            }
            img.pop();
            used[v] = false;
        }
    }

    rec(a, b, &mut img, &mut used, &mut found, first_only);
    found
}

/// All automorphisms, as permutations in lexicographic order.
pub fn automorphisms(a: &Structure, limits: &Limits) -> Result<Vec<Mapping>> {
    guard_exhaustive(a, limits)?;
    Ok(isomorphisms_impl(a, a, false))
}

/// Tests whether two structures are isomorphic.
pub fn isomorphic(a: &Structure, b: &Structure, limits: &Limits) -> Result<bool> {
    guard_exhaustive(a, limits)?;
    guard_exhaustive(b, limits)?;
    Ok(!isomorphisms_impl(a, b, true).is_empty())
}

/// The partition of `A^k` into orbits of the componentwise
/// automorphism action, ordered by least tuple.
pub fn orbits(a: &Structure, k: usize, limits: &Limits) -> Result<Vec<BTreeSet<Tuple>>> {
    if k == 0 {
        return Err(Error::BadArgument("orbits requires k >= 1".into()));
    }
    let autos = automorphisms(a, limits)?;
    let total = a
        .size
        .checked_pow(k as u32)
        .ok_or_else(|| Error::GuardExceeded("tuple space overflows".into()))?;
    let mut assigned = vec![false; total];
    let mut out = Vec::new();
    for idx in 0..total {
        if assigned[idx] {
            continue;
        }
        let seed = power_coords(a.size, k, idx);
        let mut orbit = BTreeSet::new();
        for g in &autos {
            let t: Tuple = seed.iter().map(|&x| g.apply(x)).collect();
            assigned[power_index(a.size, &t)] = true;
            orbit.insert(t);
        }
        out.push(orbit);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cores

/// Tests whether every endomorphism is an automorphism (injectivity
/// suffices on finite structures): searches for an endomorphism
/// merging some pair of elements.
pub fn is_core(a: &Structure, limits: &Limits) -> Result<bool> {
    guard_exhaustive(a, limits)?;
    for u in 0..a.size {
        for v in u + 1..a.size {
            for w in 0..a.size {
                let mut init = crate::consistency::UnaryLists::full(a.size, a.size);
                init.set_singleton(u, w);
                init.set_singleton(v, w);
                if crate::homsearch::search_hom(a, a, &init)?.is_some() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Computes the core as an induced substructure together with the
/// retracting endomorphism (as a map onto the renumbered core).
///
/// Among endomorphic images of minimal size the lexicographically
/// least element set is chosen, so the output is deterministic.
pub fn core(a: &Structure, limits: &Limits) -> Result<(Structure, Mapping)> {
    guard_exhaustive(a, limits)?;
    for s in 1..=a.size {
        let mut subset: Vec<usize> = (0..s).collect();
        loop {
            let elems: BTreeSet<usize> = subset.iter().copied().collect();
            let mut init = crate::consistency::UnaryLists::full(a.size, a.size);
            for x in 0..a.size {
                init.restrict(x, elems.iter().copied());
            }
            if let Some(h) = crate::homsearch::search_hom(a, a, &init)? {
                // h maps a into `elems`; the image is exactly `elems`,
                // otherwise a smaller set would have succeeded earlier.
                // Iterate h until it fixes `elems` pointwise, which
                // turns it into a retraction.
                let mut r = h.clone();
                while !elems.iter().all(|&x| r.apply(x) == x) {
                    r = r.then(&h)?;
                }
                let core = induced_substructure(a, &elems)?;
                let renumber: Vec<usize> = (0..a.size)
                    .map(|x| elems.iter().position(|&e| e == r.apply(x)).unwrap())
                    .collect();
                let retraction = Mapping::new(renumber, core.size)?;
                return Ok((core, retraction));
            }
            if !next_subset(&mut subset, a.size) {
                break;
            }
        }
    }
    unreachable!("the identity is always an endomorphism")
}

/// Advances a sorted s-subset of 0..n-1 to its lexicographic successor.
fn next_subset(subset: &mut [usize], n: usize) -> bool {
    let s = subset.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (s - i) {
            subset[i] += 1;
            for j in i + 1..s {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
