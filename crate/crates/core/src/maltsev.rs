//! The Bulatov-Dalmau algorithm for templates with a Maltsev
//! polymorphism: forks, compact representations, the procedures
//! Nonempty, Fix-values and Next, and the end-to-end solver.
//!
//! The solver maintains a compact representation of the n-ary solution
//! space while constraints are added one by one; the full space `A^n`
//! is never materialised.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::polymorphism::{is_polymorphism_with, Operation};
use crate::pplogic::Relation;
use crate::relstruct::{Mapping, Structure, Tuple, TupleSet};
use crate::{Error, Limits, Result};

/// A fork of a relation: two tuples agreeing strictly before
/// `position` (0-based) and taking values `a` and `b` there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fork {
    pub position: usize,
    pub a: usize,
    pub b: usize,
}

/// A small tuple set witnessing every fork of the relation it
/// represents; generates the relation under any Maltsev polymorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactRep {
    arity: usize,
    domain: usize,
    tuples: TupleSet,
}

impl CompactRep {
    pub fn new(arity: usize, domain: usize, tuples: TupleSet) -> Result<Self> {
        for t in &tuples {
            if t.len() != arity || t.iter().any(|&e| e >= domain) {
                return Err(Error::BadArgument("malformed representation tuple".into()));
            }
        }
        Ok(CompactRep { arity, domain, tuples })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn tuples(&self) -> &TupleSet {
        &self.tuples
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// For every (position, a, b), the lexicographically least witness
/// pair, using a single tuple when `a == b`.
fn fork_witnesses(tuples: &TupleSet, arity: usize) -> BTreeMap<Fork, (Tuple, Tuple)> {
    let mut out: BTreeMap<Fork, (Tuple, Tuple)> = BTreeMap::new();
    for i in 0..arity {
        // Group by prefix; within a group every value pair is a fork.
        let mut groups: BTreeMap<&[usize], BTreeMap<usize, &Tuple>> = BTreeMap::new();
        for t in tuples {
            groups.entry(&t[..i]).or_default().entry(t[i]).or_insert(t);
        }
        for by_value in groups.values() {
            for (&a, &s) in by_value {
                for (&b, &t) in by_value {
                    let fork = Fork { position: i, a, b };
                    let witness = if a == b { (s.clone(), s.clone()) } else { (s.clone(), t.clone()) };
                    match out.get(&fork) {
                        Some(best) if *best <= witness => {}
                        _ => {
                            out.insert(fork, witness);
                        }
                    }
                }
            }
        }
    }
    out
}

/// All forks of a relation.
pub fn forks(r: &Relation) -> Vec<Fork> {
    fork_witnesses(r.tuples(), r.arity()).into_keys().collect()
}

/// A compact representation: for every fork, the lexicographically
/// least witness pair is kept.
pub fn compact_representation(r: &Relation) -> CompactRep {
    let mut tuples = TupleSet::new();
    for (s, t) in fork_witnesses(r.tuples(), r.arity()).into_values() {
        tuples.insert(s);
        tuples.insert(t);
    }
    CompactRep { arity: r.arity(), domain: r.domain(), tuples }
}

fn check_maltsev(m: &Operation) -> Result<()> {
    if m.arity() != 3 {
        return Err(Error::BadArgument("a Maltsev operation is ternary".into()));
    }
    for x in 0..m.domain() {
        for y in 0..m.domain() {
            if m.apply(&[y, x, x]) != y || m.apply(&[x, x, y]) != y {
                return Err(Error::BadArgument("operation is not Maltsev".into()));
            }
        }
    }
    Ok(())
}

fn check_preserved(tuples: &TupleSet, arity: usize, m: &Operation) -> Result<()> {
    let rows: Vec<&Tuple> = tuples.iter().collect();
    for r in &rows {
        for s in &rows {
            for t in &rows {
                let image: Tuple = (0..arity).map(|j| m.apply(&[r[j], s[j], t[j]])).collect();
                if !tuples.contains(&image) {
                    return Err(Error::BadArgument("relation not preserved by the operation".into()));
                }
            }
        }
    }
    Ok(())
}

fn apply_m(m: &Operation, r: &Tuple, s: &Tuple, t: &Tuple) -> Tuple {
    (0..r.len()).map(|j| m.apply(&[r[j], s[j], t[j]])).collect()
}

/// The least m-closed superset of the representation (fixed point of
/// componentwise application); errors if `m` is not Maltsev.
pub fn closure_under_maltsev(rep: &CompactRep, m: &Operation) -> Result<Relation> {
    check_maltsev(m)?;
    if m.domain() != rep.domain {
        return Err(Error::BadArgument("operation domain mismatch".into()));
    }
    let mut tuples = rep.tuples.clone();
    loop {
        let rows: Vec<Tuple> = tuples.iter().cloned().collect();
        let mut fresh = Vec::new();
        for r in &rows {
            for s in &rows {
                for t in &rows {
                    let image = apply_m(m, r, s, t);
                    if !tuples.contains(&image) {
                        fresh.push(image);
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Relation::new(rep.arity, rep.domain, tuples);
        }
        tuples.extend(fresh);
    }
}

/// Bounded materialisation used by the debug validation of the
/// representation contract; gives up (returning `None`) when either
/// the result or the work grows past the caps, so validation never
/// dominates the procedures it checks.
#[cfg(debug_assertions)]
fn closure_capped(tuples: &TupleSet, m: &Operation, cap: usize) -> Option<TupleSet> {
    let mut out = tuples.clone();
    let mut work: u64 = 0;
    loop {
        let rows: Vec<Tuple> = out.iter().cloned().collect();
        work += (rows.len() as u64).pow(3);
        if work > 2_000_000 {
            return None;
        }
        let mut fresh = Vec::new();
        for r in &rows {
            for s in &rows {
                for t in &rows {
                    let image = apply_m(m, r, s, t);
                    if !out.contains(&image) && !fresh.contains(&image) {
                        fresh.push(image);
                        if out.len() + fresh.len() > cap {
                            return None;
                        }
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Some(out);
        }
        out.extend(fresh);
    }
}

/// In debug builds, checks that `rep` is a genuine compact
/// representation of `expected` (fork-complete and contained in it),
/// materialising only when small.
#[cfg(debug_assertions)]
fn debug_validate_rep(rep: &CompactRep, expected: &TupleSet, m: &Operation) {
    if expected.len() > 10_000 {
        return;
    }
    let _ = m;
    assert!(rep.tuples.is_subset(expected), "representation escapes its relation");
    let rep_forks: Vec<Fork> = fork_witnesses(&rep.tuples, rep.arity).into_keys().collect();
    let full_forks: Vec<Fork> = fork_witnesses(expected, rep.arity).into_keys().collect();
    assert_eq!(rep_forks, full_forks, "representation misses forks");
}

/// The procedure Nonempty: a tuple of the represented relation whose
/// projection to `idx` lies in `s`, or `None` if there is none.
///
/// The search runs in projection space: projections commute with the
/// componentwise Maltsev application, so the reachable projections are
/// the m-closure of the projected representation, and a witness tuple
/// is reassembled from the derivation of its projection.
pub fn nonempty(
    rep: &CompactRep,
    idx: &[usize],
    s: &Relation,
    m: &Operation,
) -> Result<Option<Tuple>> {
    check_maltsev(m)?;
    if m.domain() != rep.domain || s.domain() != rep.domain {
        return Err(Error::BadArgument("domain mismatch".into()));
    }
    if idx.len() != s.arity() {
        return Err(Error::BadArgument("index sequence does not match relation arity".into()));
    }
    if let Some(&i) = idx.iter().find(|&&i| i >= rep.arity) {
        return Err(Error::BadArgument(format!("index {i} out of range")));
    }
    check_preserved(s.tuples(), s.arity(), m)?;

    let project = |t: &Tuple| -> Tuple { idx.iter().map(|&i| t[i]).collect() };
    // Reachable projections with their derivations: either a base
    // tuple of the representation or an m-image of three earlier ones.
    enum Derivation {
        Base(Tuple),
        Image(usize, usize, usize),
    }
    let mut projections: Vec<Tuple> = Vec::new();
    let mut index_of: BTreeMap<Tuple, usize> = BTreeMap::new();
    let mut derivations: Vec<Derivation> = Vec::new();
    for t in &rep.tuples {
        let p = project(t);
        index_of.entry(p.clone()).or_insert_with(|| {
            projections.push(p);
            derivations.push(Derivation::Base(t.clone()));
            projections.len() - 1
        });
    }
    let mut frontier = 0usize;
    while frontier < projections.len() {
        let upto = projections.len();
        for a in 0..upto {
            for b in 0..upto {
                for c in 0..upto {
                    if a.max(b).max(c) < frontier {
                        continue;
                    }
                    let image = apply_m(m, &projections[a], &projections[b], &projections[c]);
                    if !index_of.contains_key(&image) {
                        index_of.insert(image.clone(), projections.len());
                        projections.push(image);
                        derivations.push(Derivation::Image(a, b, c));
                    }
                }
            }
        }
        frontier = upto;
    }

    let Some(target) = projections.iter().position(|p| s.tuples().contains(p)) else {
        return Ok(None);
    };
    // Reassemble a full witness along the derivation.
    fn assemble(
        i: usize,
        projections: &[Tuple],
        derivations: &[Derivation],
        m: &Operation,
        cache: &mut BTreeMap<usize, Tuple>,
    ) -> Tuple {
        if let Some(t) = cache.get(&i) {
            return t.clone();
        }
        let t = match &derivations[i] {
            Derivation::Base(t) => t.clone(),
            Derivation::Image(a, b, c) => {
                let ta = assemble(*a, projections, derivations, m, cache);
                let tb = assemble(*b, projections, derivations, m, cache);
                let tc = assemble(*c, projections, derivations, m, cache);
                apply_m(m, &ta, &tb, &tc)
            }
        };
        cache.insert(i, t.clone());
        t
    }
    let witness = assemble(target, &projections, &derivations, m, &mut BTreeMap::new());
    debug_assert!(s.tuples().contains(&project(&witness)));
    Ok(Some(witness))
}

/// One stage of Fix-values: from a representation of
/// `R ∩ (c_0 x ... x c_{j-1} x A x ...)` to one with position `j`
/// additionally pinned to `constants[j]`.
fn fix_stage(
    u: &CompactRep,
    constants: &[usize],
    j: usize,
    m: &Operation,
) -> Result<CompactRep> {
    let n = u.arity;
    let domain = u.domain;
    let witnesses = fork_witnesses(&u.tuples, n);
    let mut out = TupleSet::new();
    for i in 0..n {
        for a in 0..domain {
            for b in 0..domain {
                let Some((s, t)) = witnesses.get(&Fork { position: i, a, b }) else {
                    continue;
                };
                let pair = Relation::from_tuples(2, domain, [vec![constants[j], a]])?;
                let Some(r) = nonempty(u, &[j, i], &pair, m)? else {
                    continue;
                };
                if i > j || (a == b && constants[i] == a) {
                    out.insert(apply_m(m, &r, s, t));
                    out.insert(r);
                }
            }
        }
    }
    CompactRep::new(n, domain, out)
}

/// The procedure Fix-values: a compact representation of the
/// represented relation with its first `constants.len()` positions
/// pinned.
pub fn fix_values(rep: &CompactRep, constants: &[usize], m: &Operation) -> Result<CompactRep> {
    check_maltsev(m)?;
    if constants.len() > rep.arity {
        return Err(Error::BadArgument("more constants than positions".into()));
    }
    if let Some(&c) = constants.iter().find(|&&c| c >= rep.domain) {
        return Err(Error::BadArgument(format!("constant {c} out of range")));
    }
    let mut u = rep.clone();
    for j in 0..constants.len() {
        u = fix_stage(&u, constants, j, m)?;
        #[cfg(debug_assertions)]
        {
            if let Some(full) = closure_capped(&rep.tuples, m, 10_000) {
                let expected: TupleSet = full
                    .iter()
                    .filter(|t| t[..=j] == constants[..=j])
                    .cloned()
                    .collect();
                debug_validate_rep(&u, &expected, m);
            }
        }
    }
    Ok(u)
}

/// The procedure Next: a compact representation of
/// `{ t in R : (t[idx_1],...,t[idx_k]) in s }`.
pub fn next(rep: &CompactRep, idx: &[usize], s: &Relation, m: &Operation) -> Result<CompactRep> {
    check_maltsev(m)?;
    let n = rep.arity;
    let domain = rep.domain;
    let mut extended_idx: Vec<usize> = idx.to_vec();
    extended_idx.push(0); // placeholder, set per position below
    let mut out = TupleSet::new();
    for i in 0..n {
        *extended_idx.last_mut().unwrap() = i;
        for a in 0..domain {
            let s_with_a = Relation::new(
                s.arity() + 1,
                domain,
                s.tuples()
                    .iter()
                    .map(|t| {
                        let mut e = t.clone();
                        e.push(a);
                        e
                    })
                    .collect(),
            )?;
            let Some(t) = nonempty(rep, &extended_idx, &s_with_a, m)? else {
                continue;
            };
            let pinned = fix_values(rep, &t[..i], m)?;
            for b in 0..domain {
                let s_with_b = Relation::new(
                    s.arity() + 1,
                    domain,
                    s.tuples()
                        .iter()
                        .map(|u| {
                            let mut e = u.clone();
                            e.push(b);
                            e
                        })
                        .collect(),
                )?;
                if let Some(t2) = nonempty(&pinned, &extended_idx, &s_with_b, m)? {
                    out.insert(t.clone());
                    out.insert(t2);
                }
            }
        }
    }
    let result = CompactRep::new(n, domain, out)?;
    #[cfg(debug_assertions)]
    {
        if let Some(full) = closure_capped(&rep.tuples, m, 10_000) {
            let expected: TupleSet = full
                .iter()
                .filter(|t| {
                    let proj: Tuple = idx.iter().map(|&i| t[i]).collect();
                    s.tuples().contains(&proj)
                })
                .cloned()
                .collect();
            debug_validate_rep(&result, &expected, m);
        }
    }
    Ok(result)
}

/// Verdict of the Maltsev solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaltsevOutcome {
    Sat(Mapping),
    Unsat,
}

impl MaltsevOutcome {
    pub fn witness(&self) -> Option<&Mapping> {
        match self {
            MaltsevOutcome::Sat(m) => Some(m),
            MaltsevOutcome::Unsat => None,
        }
    }
}

/// A compact representation of the full relation `A^n`.
fn full_representation(n: usize, domain: usize) -> CompactRep {
    let mut tuples = TupleSet::new();
    for a in 0..domain {
        tuples.insert(vec![a; n]);
        for i in 0..n {
            for b in 0..domain {
                if b != a {
                    let mut t = vec![a; n];
                    t[i] = b;
                    tuples.insert(t);
                }
            }
        }
    }
    CompactRep { arity: n, domain, tuples }
}

/// Decides the instance over a Maltsev template by adding constraints
/// one at a time to a compact representation of the solution space;
/// a satisfying assignment is extracted by pinning variables in order
/// through Fix-values stages and verified before it is returned.
pub fn solve(
    instance: &Structure,
    template: &Structure,
    m: &Operation,
    limits: &Limits,
) -> Result<MaltsevOutcome> {
    if instance.signature() != template.signature() {
        return Err(Error::SignatureMismatch);
    }
    check_maltsev(m)?;
    if !is_polymorphism_with(m, template, limits)? {
        return Err(Error::BadArgument("operation is not a polymorphism of the template".into()));
    }
    let n = instance.size();
    let domain = template.size();
    let mut rep = full_representation(n, domain);
    for (name, arity, tuples) in instance.relations() {
        let templ = Relation::new(arity, domain, template.relation(name).unwrap().clone())?;
        for scope in tuples {
            rep = next(&rep, scope, &templ, m)?;
            if rep.is_empty() {
                return Ok(MaltsevOutcome::Unsat);
            }
        }
    }
    // Extract the lexicographically least solution by pinning
    // variables in order.
    let mut constants: Vec<usize> = Vec::new();
    let mut current = rep;
    for j in 0..n {
        let mut extended = None;
        for a in 0..domain {
            constants.push(a);
            let stage = fix_stage(&current, &constants, j, m)?;
            if !stage.is_empty() {
                extended = Some(stage);
                break;
            }
            constants.pop();
        }
        match extended {
            Some(stage) => current = stage,
            None => return Err(Error::BadArgument("extraction lost all solutions".into())),
        }
    }
    let witness = Mapping::new(constants, domain)?;
    if !witness.is_homomorphism(instance, template) {
        return Err(Error::BadArgument("unverified Maltsev witness".into()));
    }
    Ok(MaltsevOutcome::Sat(witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relstruct::Signature;

    fn bool_minority() -> Operation {
        Operation::from_fn(3, 2, |a| a[0] ^ a[1] ^ a[2]).unwrap()
    }

    fn rel(arity: usize, domain: usize, tuples: &[&[usize]]) -> Relation {
        Relation::from_tuples(arity, domain, tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    #[test]
    fn fork_enumeration() {
        let r = rel(2, 2, &[&[0, 0], &[1, 1]]);
        let fs = forks(&r);
        let expected = vec![
            Fork { position: 0, a: 0, b: 0 },
            Fork { position: 0, a: 0, b: 1 },
            Fork { position: 0, a: 1, b: 0 },
            Fork { position: 0, a: 1, b: 1 },
            Fork { position: 1, a: 0, b: 0 },
            Fork { position: 1, a: 1, b: 1 },
        ];
        assert_eq!(fs, expected);

        assert!(forks(&Relation::new(2, 2, TupleSet::new()).unwrap()).is_empty());

        let full = rel(2, 2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert_eq!(forks(&full).len(), 8);
    }

    #[test]
    fn compact_reps() {
        let r = rel(2, 2, &[&[0, 0], &[1, 1]]);
        assert_eq!(compact_representation(&r).tuples(), r.tuples());

        let single = rel(3, 2, &[&[0, 1, 0]]);
        assert_eq!(compact_representation(&single).tuples(), single.tuples());

        let cube = Relation::from_tuples(
            3,
            2,
            (0..8usize).map(|i| vec![i >> 2 & 1, i >> 1 & 1, i & 1]),
        )
        .unwrap();
        let rep = compact_representation(&cube);
        assert!(rep.tuples().len() <= 2 * forks(&cube).len());
        // The representation generates the relation back.
        let closed = closure_under_maltsev(&rep, &bool_minority()).unwrap();
        assert_eq!(closed.tuples(), cube.tuples());
    }

    #[test]
    fn closure_recovers_from_partial_rep() {
        let rep = CompactRep::new(
            2,
            2,
            [vec![0, 0], vec![1, 1], vec![0, 1]].into_iter().collect(),
        )
        .unwrap();
        let closed = closure_under_maltsev(&rep, &bool_minority()).unwrap();
        assert_eq!(closed.len(), 4);

        // Already closed sets stay put.
        let rep = CompactRep::new(2, 2, [vec![0, 0], vec![1, 1]].into_iter().collect()).unwrap();
        let closed = closure_under_maltsev(&rep, &bool_minority()).unwrap();
        assert_eq!(closed.len(), 2);
    }

    #[test]
    fn parity_relation_roundtrip() {
        // (x,y,z,u) with x+y+z = 1 mod 2, u free.
        let parity = Relation::from_tuples(
            4,
            2,
            (0..16usize)
                .map(|i| vec![i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1])
                .filter(|t| (t[0] + t[1] + t[2]) % 2 == 1),
        )
        .unwrap();
        assert_eq!(parity.len(), 8);
        let rep = compact_representation(&parity);
        let closed = closure_under_maltsev(&rep, &bool_minority()).unwrap();
        assert_eq!(closed.tuples(), parity.tuples());

        // Pinning x = 1 leaves 1 + t2 + t3 = 1, i.e. t2 + t3 even.
        let pinned = fix_values(&rep, &[1], &bool_minority()).unwrap();
        let closed = closure_under_maltsev(&pinned, &bool_minority()).unwrap();
        let expected: TupleSet = parity
            .tuples()
            .iter()
            .filter(|t| t[0] == 1)
            .cloned()
            .collect();
        assert_eq!(closed.tuples(), &expected);
    }

    #[test]
    fn nonempty_basics() {
        let rep =
            CompactRep::new(2, 2, [vec![0, 0], vec![1, 1]].into_iter().collect()).unwrap();
        let m = bool_minority();
        let found = nonempty(&rep, &[0], &rel(1, 2, &[&[1]]), &m).unwrap();
        assert_eq!(found, Some(vec![1, 1]));
        let none = nonempty(&rep, &[0, 1], &rel(2, 2, &[&[0, 1]]), &m).unwrap();
        assert_eq!(none, None);
    }

    #[test]
    fn nonempty_agrees_with_materialised_search() {
        // Random-ish m-invariant relations: closures of seed sets.
        let m = bool_minority();
        let seeds: Vec<Vec<Tuple>> = vec![
            vec![vec![0, 0, 1], vec![0, 1, 0]],
            vec![vec![1, 1, 1]],
            vec![vec![0, 0, 0], vec![1, 1, 0], vec![0, 1, 1]],
        ];
        for seed in seeds {
            let seeded = CompactRep::new(3, 2, seed.into_iter().collect()).unwrap();
            let full = closure_under_maltsev(&seeded, &m).unwrap();
            let rep = compact_representation(&full);
            for idx in [vec![0], vec![2], vec![0, 2], vec![1, 0]] {
                let arity = idx.len();
                for code in 0..(1usize << arity) {
                    let target: Tuple = (0..arity).map(|i| code >> i & 1).collect();
                    let s = Relation::from_tuples(arity, 2, [target.clone()]).unwrap();
                    let got = nonempty(&rep, &idx, &s, &m).unwrap();
                    let want = full
                        .tuples()
                        .iter()
                        .any(|t| idx.iter().zip(&target).all(|(&i, &v)| t[i] == v));
                    assert_eq!(got.is_some(), want);
                    if let Some(t) = got {
                        assert!(full.tuples().contains(&t));
                    }
                }
            }
        }
    }

    #[test]
    fn fix_values_identity_and_pin() {
        let m = bool_minority();
        let rep =
            CompactRep::new(2, 2, [vec![0, 0], vec![1, 1]].into_iter().collect()).unwrap();
        let same = fix_values(&rep, &[], &m).unwrap();
        assert_eq!(same.tuples(), rep.tuples());

        let pinned = fix_values(&rep, &[1], &m).unwrap();
        let closed = closure_under_maltsev(&pinned, &m).unwrap();
        assert_eq!(closed.tuples().iter().collect::<Vec<_>>(), vec![&vec![1, 1]]);
    }

    #[test]
    fn next_restricts() {
        let m = bool_minority();
        let full = rel(2, 2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let rep = compact_representation(&full);
        let diag = rel(2, 2, &[&[0, 0], &[1, 1]]);
        let restricted = next(&rep, &[0, 1], &diag, &m).unwrap();
        let closed = closure_under_maltsev(&restricted, &m).unwrap();
        assert_eq!(closed.tuples(), diag.tuples());

        // With the full constraint nothing changes.
        let everything = next(&rep, &[0, 1], &full, &m).unwrap();
        let closed = closure_under_maltsev(&everything, &m).unwrap();
        assert_eq!(closed.tuples(), full.tuples());
    }

    fn parity_template() -> Structure {
        // ({0,1}; L_0, L_1) with L_i = all triples of parity i.
        let mut s = Structure::new(Signature::new([("L0", 3), ("L1", 3)]), 2);
        for x in 0..2usize {
            for y in 0..2usize {
                for z in 0..2usize {
                    let name = if (x + y + z) % 2 == 0 { "L0" } else { "L1" };
                    s.insert_tuple(name, vec![x, y, z]).unwrap();
                }
            }
        }
        s
    }

    #[test]
    fn parity_chain_instance() {
        // L1(x1,x2,x3), L1(x2,x3,x4), L1(x3,x4,x5), L0(x1,x3,x5) has a
        // parity contradiction; flipping the last constraint makes it
        // satisfiable.
        let template = parity_template();
        let m = bool_minority();
        let mut unsat = Structure::new(template.signature().clone(), 5);
        unsat.insert_tuple("L1", vec![0, 1, 2]).unwrap();
        unsat.insert_tuple("L1", vec![1, 2, 3]).unwrap();
        unsat.insert_tuple("L1", vec![2, 3, 4]).unwrap();
        unsat.insert_tuple("L0", vec![0, 2, 4]).unwrap();
        assert_eq!(solve(&unsat, &template, &m, &Limits::default()).unwrap(), MaltsevOutcome::Unsat);

        let mut sat = Structure::new(template.signature().clone(), 5);
        sat.insert_tuple("L1", vec![0, 1, 2]).unwrap();
        sat.insert_tuple("L1", vec![1, 2, 3]).unwrap();
        sat.insert_tuple("L1", vec![2, 3, 4]).unwrap();
        sat.insert_tuple("L1", vec![0, 2, 4]).unwrap();
        let outcome = solve(&sat, &template, &m, &Limits::default()).unwrap();
        let witness = outcome.witness().expect("satisfiable");
        assert!(witness.is_homomorphism(&sat, &template));
    }

    #[test]
    fn solver_rejects_non_polymorphisms() {
        let template = crate::relstruct::complete(3);
        let m = Operation::from_fn(3, 3, |a| (a[0] + 3 - a[1] + a[2]) % 3).unwrap();
        // m is Maltsev but not a polymorphism of K_3.
        let instance = crate::relstruct::complete(3);
        assert!(solve(&instance, &template, &m, &Limits::default()).is_err());
    }
}
