//! Homomorphism existence and construction: a brute-force oracle,
//! AC-pruned backtracking with precolourings and lists, and solution
//! construction from a bare decision procedure.

use alloc::vec::Vec;

use crate::consistency::{ac, UnaryLists};
use crate::relstruct::{self, Mapping, Structure, Tuple};
use crate::{Error, Limits, Result};

fn verify(mapping: &Mapping, instance: &Structure, template: &Structure, init: &UnaryLists) -> Result<()> {
    let respects_lists =
        (0..instance.size()).all(|x| init.get(x).contains(mapping.apply(x)));
    if !respects_lists || !mapping.is_homomorphism(instance, template) {
        return Err(Error::BadArgument("search produced an unverified mapping".into()));
    }
    Ok(())
}

/// Exhaustive enumeration in index order with incremental constraint
/// checks; the independent oracle against which the pruned search is
/// validated.
pub fn brute_force_hom(
    instance: &Structure,
    template: &Structure,
    init: &UnaryLists,
    limits: &Limits,
) -> Result<Option<Mapping>> {
    if instance.signature() != template.signature() {
        return Err(Error::SignatureMismatch);
    }
    let space = (template.size() as u64).checked_pow(instance.size() as u32);
    if space.is_none_or(|s| s > limits.brute_force) {
        return Err(Error::GuardExceeded("brute-force space too large".into()));
    }
    let constraints: Vec<(&relstruct::TupleSet, &Tuple)> = instance
        .relations()
        .flat_map(|(name, _, tuples)| {
            let templ = template.relation(name).unwrap();
            tuples.iter().map(move |scope| (templ, scope))
        })
        .collect();

    fn rec(
        n: usize,
        d: usize,
        init: &UnaryLists,
        constraints: &[(&relstruct::TupleSet, &Tuple)],
        partial: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if partial.len() == n {
            return Some(partial.clone());
        }
        let x = partial.len();
        for v in 0..d {
            if !init.get(x).contains(v) {
                continue;
            }
            partial.push(v);
            let ok = constraints.iter().all(|(templ, scope)| {
                if !scope.iter().all(|&s| s < partial.len()) || !scope.contains(&x) {
                    return true;
                }
                templ.contains(&scope.iter().map(|&s| partial[s]).collect::<Tuple>())
            });
            if ok {
                if let Some(found) = rec(n, d, init, constraints, partial) {
                    return Some(found);
                }
            }
            partial.pop();
        }
        None
    }

    let mut partial = Vec::with_capacity(instance.size());
    match rec(instance.size(), template.size(), init, &constraints, &mut partial) {
        Some(table) => {
            let m = Mapping::new(table, template.size())?;
            verify(&m, instance, template, init)?;
            Ok(Some(m))
        }
        None => Ok(None),
    }
}

/// Backtracking with arc-consistency pruning. Variables are chosen
/// smallest-list-first (ties by index), values in ascending order, and
/// AC restarts from the previous fixed point after each pin, so the
/// result is deterministic and, when a map exists, lexicographically
/// least under that exploration order.
pub fn search_hom(
    instance: &Structure,
    template: &Structure,
    init: &UnaryLists,
) -> Result<Option<Mapping>> {
    let mut out = None;
    search_all_impl(instance, template, init, 1, &mut |m| out = Some(m))?;
    if let Some(m) = &out {
        verify(m, instance, template, init)?;
    }
    Ok(out)
}

/// Enumerates homomorphisms respecting `init`, up to `cap` of them.
/// Returns the solutions found and whether the search was exhausted
/// (`false` means the cap was hit with search space remaining).
pub fn enumerate_homs(
    instance: &Structure,
    template: &Structure,
    init: &UnaryLists,
    cap: usize,
) -> Result<(Vec<Mapping>, bool)> {
    let mut found = Vec::new();
    let exhausted = search_all_impl(instance, template, init, cap, &mut |m| found.push(m))?;
    Ok((found, exhausted))
}

fn search_all_impl(
    instance: &Structure,
    template: &Structure,
    init: &UnaryLists,
    cap: usize,
    sink: &mut impl FnMut(Mapping),
) -> Result<bool> {
    let lists = match ac(instance, template, init)? {
        Some(l) => l,
        None => return Ok(true),
    };
    let mut count = 0usize;
    let exhausted = rec(instance, template, &lists, cap, &mut count, sink)?;

    fn rec(
        instance: &Structure,
        template: &Structure,
        lists: &UnaryLists,
        cap: usize,
        count: &mut usize,
        sink: &mut impl FnMut(Mapping),
    ) -> Result<bool> {
        if *count >= cap {
            return Ok(false);
        }
        // Smallest list of size >= 2, ties by variable index.
        let branch = (0..instance.size())
            .filter(|&x| lists.get(x).len() >= 2)
            .min_by_key(|&x| lists.get(x).len());
        let Some(x) = branch else {
            // All singletons: AC already validated every constraint's
            // supports, but confirm the assignment outright.
            let m = lists.as_mapping().expect("all lists are singletons");
            if m.is_homomorphism(instance, template) {
                *count += 1;
                sink(m);
            }
            return Ok(true);
        };
        let mut exhausted = true;
        for v in lists.get(x).iter().collect::<Vec<_>>() {
            let mut pinned = lists.clone();
            pinned.set_singleton(x, v);
            if let Some(next) = ac(instance, template, &pinned)? {
                exhausted &= rec(instance, template, &next, cap, count, sink)?;
            }
            if *count >= cap {
                return Ok(false);
            }
        }
        Ok(exhausted)
    }

    Ok(exhausted)
}

/// Is there any homomorphism from `a` to `b`?
pub fn hom_exists(a: &Structure, b: &Structure) -> Result<bool> {
    let init = UnaryLists::full(a.size(), b.size());
    Ok(search_hom(a, b, &init)?.is_some())
}

/// Are `a` and `b` homomorphically equivalent?
pub fn hom_equivalent(a: &Structure, b: &Structure) -> Result<bool> {
    Ok(hom_exists(a, b)? && hom_exists(b, a)?)
}

/// Builds a full homomorphism from a decision procedure by pinning
/// variables one at a time through the precoloured problem over the
/// template's core, using at most `1 + |vars| * |core|` oracle calls.
///
/// The oracle receives candidate lists over the core of `template`
/// and must decide whether a homomorphism respecting them exists. An
/// oracle that accepts and then rejects every single-variable
/// extension is reported as [`Error::OracleInconsistent`].
pub fn construct_solution(
    instance: &Structure,
    template: &Structure,
    limits: &Limits,
    oracle: &mut dyn FnMut(&UnaryLists) -> Result<bool>,
) -> Result<Option<Mapping>> {
    if instance.signature() != template.signature() {
        return Err(Error::SignatureMismatch);
    }
    let (core, _) = relstruct::core(template, limits)?;
    // An embedding of the core back into the template: the core search
    // returns an induced substructure, so search for it explicitly to
    // stay independent of element numbering.
    let embed = search_hom(&core, template, &UnaryLists::full(core.size(), template.size()))?
        .expect("a core embeds into its host");

    let mut lists = UnaryLists::full(instance.size(), core.size());
    if !oracle(&lists)? {
        return Ok(None);
    }
    for x in 0..instance.size() {
        let mut pinned_value = None;
        for u in 0..core.size() {
            let mut candidate = lists.clone();
            candidate.set_singleton(x, u);
            if oracle(&candidate)? {
                pinned_value = Some(u);
                break;
            }
        }
        match pinned_value {
            Some(u) => lists.set_singleton(x, u),
            None => return Err(Error::OracleInconsistent),
        }
    }
    let into_core = lists.as_mapping().expect("all variables pinned");
    if !into_core.is_homomorphism(instance, &core) {
        return Err(Error::OracleInconsistent);
    }
    Ok(Some(into_core.then(&embed)?))
}
