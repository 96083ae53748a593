//! Complexity classifiers: Schaefer for Boolean templates,
//! Hell-Nesetril for undirected graphs, smooth digraphs, the general
//! dichotomy via Siggers polymorphisms, bounded width, and cyclic
//! arity profiles.
//!
//! Every P or NP-complete verdict carries a machine-checkable
//! certificate; `Inconclusive` is reserved for guard overruns and
//! names the blocking stage.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::polymorphism::{
    find_special, is_polymorphism_with, Operation, SpecialKind, SpecialResult,
};
use crate::relstruct::{
    self, structure_predicates, Signature, Structure, Tuple,
};
use crate::{Error, Limits, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Complexity {
    P,
    NpComplete,
    Inconclusive,
}

/// Schaefer's tractable classes; a template can lie in several.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SchaeferClass {
    Const0,
    Const1,
    Horn,
    DualHorn,
    Bijunctive,
    Affine,
}

impl SchaeferClass {
    pub fn name(&self) -> &'static str {
        match self {
            SchaeferClass::Const0 => "const0",
            SchaeferClass::Const1 => "const1",
            SchaeferClass::Horn => "horn",
            SchaeferClass::DualHorn => "dual-horn",
            SchaeferClass::Bijunctive => "bijunctive",
            SchaeferClass::Affine => "affine",
        }
    }
}

/// One concrete failure of preservation: applying the operation to the
/// rows of the named relation escapes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub operation: Operation,
    pub relation: String,
    pub rows: Vec<Tuple>,
    pub image: Tuple,
}

/// The machine-checkable reason behind a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Passing Schaefer classes with their witnessing operations.
    SchaeferClasses(Vec<(SchaeferClass, Operation)>),
    /// All candidate operations fail; one violation each.
    FailedOperations(Vec<Violation>),
    /// A loop at this vertex.
    Loop(usize),
    /// A proper 2-colouring.
    Bipartition(Vec<bool>),
    /// A closed walk of odd length, refuting bipartiteness.
    OddClosedWalk(Vec<usize>),
    /// The core is a disjoint union of directed cycles.
    CycleUnionCore(Structure),
    /// Operations witnessing tractability, together with the structure
    /// they are polymorphisms of (the singleton expansion of the
    /// core).
    Polymorphisms { of: Structure, ops: Vec<(String, Operation)> },
    /// A complete indicator search found nothing; completeness of the
    /// search is the proof.
    ExhaustedSearch(String),
    /// A guard stopped the named stage.
    Blocked(String),
}

/// A complexity verdict with its certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub complexity: Complexity,
    pub certificate: Certificate,
}

// ---------------------------------------------------------------------------
// Schaefer

fn find_violation(op: &Operation, b: &Structure) -> Option<Violation> {
    let k = op.arity();
    for (name, arity, tuples) in b.relations() {
        let rows: Vec<&Tuple> = tuples.iter().collect();
        if rows.is_empty() {
            continue;
        }
        let mut choice = vec![0usize; k];
        'combinations: loop {
            let image: Tuple = (0..arity)
                .map(|j| {
                    let args: Vec<usize> = choice.iter().map(|&c| rows[c][j]).collect();
                    op.apply(&args)
                })
                .collect();
            if !tuples.contains(&image) {
                return Some(Violation {
                    operation: op.clone(),
                    relation: name.to_string(),
                    rows: choice.iter().map(|&c| rows[c].clone()).collect(),
                    image,
                });
            }
            let mut i = k;
            loop {
                if i == 0 {
                    break 'combinations;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < rows.len() {
                    break;
                }
                choice[i] = 0;
            }
        }
    }
    None
}

/// Schaefer's classifier for templates over `{0, 1}`: tests the six
/// fixed operations; every passing class is reported, and when none
/// passes the template is NP-complete with one violation per
/// operation as the certificate.
pub fn schaefer(b: &Structure) -> Result<Verdict> {
    if b.size() != 2 {
        return Err(Error::BadArgument("Schaefer's classifier needs a 2-element domain".into()));
    }
    let candidates: Vec<(SchaeferClass, Operation)> = vec![
        (SchaeferClass::Const0, Operation::from_fn(1, 2, |_| 0)?),
        (SchaeferClass::Const1, Operation::from_fn(1, 2, |_| 1)?),
        (SchaeferClass::Horn, Operation::from_fn(2, 2, |a| a[0] & a[1])?),
        (SchaeferClass::DualHorn, Operation::from_fn(2, 2, |a| a[0] | a[1])?),
        (SchaeferClass::Bijunctive, Operation::from_fn(3, 2, |a| {
            usize::from(a[0] + a[1] + a[2] >= 2)
        })?),
        (SchaeferClass::Affine, Operation::from_fn(3, 2, |a| a[0] ^ a[1] ^ a[2])?),
    ];
    let mut passing = Vec::new();
    let mut violations = Vec::new();
    for (class, op) in candidates {
        match find_violation(&op, b) {
            None => passing.push((class, op)),
            Some(v) => violations.push(v),
        }
    }
    Ok(if passing.is_empty() {
        Verdict {
            complexity: Complexity::NpComplete,
            certificate: Certificate::FailedOperations(violations),
        }
    } else {
        Verdict { complexity: Complexity::P, certificate: Certificate::SchaeferClasses(passing) }
    })
}

/// The classes named by a Schaefer verdict, empty for NP-complete.
pub fn schaefer_classes(verdict: &Verdict) -> Vec<SchaeferClass> {
    match &verdict.certificate {
        Certificate::SchaeferClasses(list) => list.iter().map(|(c, _)| *c).collect(),
        _ => Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Hell-Nesetril

/// The dichotomy for undirected graphs: polynomial iff the graph has a
/// loop or is bipartite, NP-complete otherwise. Certificates: the loop
/// vertex, a 2-colouring, or an odd closed walk.
pub fn hell_nesetril(h: &Structure) -> Result<Verdict> {
    let preds = structure_predicates(h)?;
    if !preds.is_symmetric {
        return Err(Error::BadArgument("Hell-Nesetril needs an undirected (symmetric) graph".into()));
    }
    if preds.has_loop {
        let v = h.arcs()?.iter().find(|&&(u, v)| u == v).map(|&(u, _)| u).unwrap();
        return Ok(Verdict { complexity: Complexity::P, certificate: Certificate::Loop(v) });
    }
    // BFS 2-colouring with parent tracking for the odd-walk witness.
    let n = h.size();
    let mut adj = vec![Vec::new(); n];
    for (u, v) in h.arcs()? {
        adj[u].push(v);
    }
    let mut colour: Vec<Option<bool>> = vec![None; n];
    let mut parent: Vec<usize> = (0..n).collect();
    for root in 0..n {
        if colour[root].is_some() {
            continue;
        }
        colour[root] = Some(false);
        let mut queue = alloc::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(!colour[u].unwrap());
                        parent[v] = u;
                        queue.push_back(v);
                    }
                    Some(c) if c == colour[u].unwrap() => {
                        // Odd closed walk: root -> u, edge (u, v),
                        // v -> root.
                        let path_to_root = |mut x: usize| {
                            let mut p = vec![x];
                            while parent[x] != x {
                                x = parent[x];
                                p.push(x);
                            }
                            p
                        };
                        let mut walk: Vec<usize> = path_to_root(u);
                        walk.reverse();
                        walk.extend(path_to_root(v));
                        return Ok(Verdict {
                            complexity: Complexity::NpComplete,
                            certificate: Certificate::OddClosedWalk(walk),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let bipartition = colour.into_iter().map(|c| c.unwrap()).collect();
    Ok(Verdict { complexity: Complexity::P, certificate: Certificate::Bipartition(bipartition) })
}

// ---------------------------------------------------------------------------
// Singleton expansion

/// Expands a structure by one unary singleton relation per element,
/// choosing a symbol prefix that cannot collide.
pub fn singleton_expansion(b: &Structure) -> Structure {
    let mut prefix = String::from("S");
    while (0..b.size()).any(|i| b.signature().index_of(&format!("{prefix}{i}")).is_some()) {
        prefix.push('S');
    }
    let mut symbols: Vec<(String, usize)> =
        b.signature().symbols().iter().map(|(n, a)| (n.clone(), *a)).collect();
    for i in 0..b.size() {
        symbols.push((format!("{prefix}{i}"), 1));
    }
    let mut out = Structure::new(Signature::new(symbols), b.size());
    for (name, _, tuples) in b.relations() {
        for t in tuples {
            out.insert_tuple(name, t.clone()).unwrap();
        }
    }
    for i in 0..b.size() {
        out.insert_tuple(&format!("{prefix}{i}"), vec![i]).unwrap();
    }
    out
}

fn blocked(stage: &str, e: Error) -> Result<Verdict> {
    match e {
        Error::GuardExceeded(msg) => Ok(Verdict {
            complexity: Complexity::Inconclusive,
            certificate: Certificate::Blocked(format!("{stage}: {msg}")),
        }),
        other => Err(other),
    }
}

// ---------------------------------------------------------------------------
// Dichotomy

/// The finite-domain CSP dichotomy: compute the core, expand it with
/// all singleton relations, and search for a 4-ary Siggers
/// polymorphism. Found: P, with the verified operation. Exhausted: the
/// completeness of the search proves NP-completeness. Guard overruns
/// yield an inconclusive verdict naming the stage.
pub fn dichotomy(b: &Structure, limits: &Limits) -> Result<Verdict> {
    let core = match relstruct::core(b, limits) {
        Ok((c, _)) => c,
        Err(e) => return blocked("core computation", e),
    };
    let expansion = singleton_expansion(&core);
    match find_special(&expansion, SpecialKind::Siggers4, false, limits) {
        Ok(SpecialResult::Found(ops)) => Ok(Verdict {
            complexity: Complexity::P,
            certificate: Certificate::Polymorphisms { of: expansion, ops },
        }),
        Ok(SpecialResult::Absent) => Ok(Verdict {
            complexity: Complexity::NpComplete,
            certificate: Certificate::ExhaustedSearch(
                "no 4-ary Siggers polymorphism of the singleton-expanded core".to_string(),
            ),
        }),
        Ok(SpecialResult::Inconclusive) => unreachable!("the Siggers search has no cap verdict"),
        Err(e) => blocked("Siggers-4 indicator search", e),
    }
}

// ---------------------------------------------------------------------------
// Smooth digraphs

/// The dichotomy for smooth digraphs (no sources, no sinks): P iff the
/// core is a disjoint union of directed cycles. The negative
/// certificate is the exhausted Siggers search of [`dichotomy`], which
/// cross-validates the shape test.
pub fn smooth_digraph(h: &Structure, limits: &Limits) -> Result<Verdict> {
    let preds = structure_predicates(h)?;
    if !preds.is_smooth {
        return Err(Error::BadArgument("template has a source or a sink".into()));
    }
    let core = match relstruct::core(h, limits) {
        Ok((c, _)) => c,
        Err(e) => return blocked("core computation", e),
    };
    let core_preds = structure_predicates(&core)?;
    if core_preds.is_disjoint_union_of_directed_cycles {
        return Ok(Verdict {
            complexity: Complexity::P,
            certificate: Certificate::CycleUnionCore(core),
        });
    }
    let inner = dichotomy(&core, limits)?;
    match inner.complexity {
        Complexity::NpComplete => Ok(inner),
        Complexity::Inconclusive => Ok(inner),
        Complexity::P => Err(Error::BadArgument(
            "smooth core is not a cycle union yet has a Siggers polymorphism".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Bounded width

/// Verdict of the bounded-width test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedWidth {
    /// The 3-4 weak near unanimity pair over the singleton-expanded
    /// core.
    Bounded { of: Structure, ops: Vec<(String, Operation)> },
    /// The pair search was exhausted.
    Unbounded,
    /// A guard stopped the named stage.
    Inconclusive(String),
}

impl BoundedWidth {
    pub fn bounded(&self) -> Option<bool> {
        match self {
            BoundedWidth::Bounded { .. } => Some(true),
            BoundedWidth::Unbounded => Some(false),
            BoundedWidth::Inconclusive(_) => None,
        }
    }
}

/// Decides bounded width: the core's singleton expansion has a 3-4
/// weak near unanimity pair iff some (equivalently, the singleton
/// arc-consistency) local-consistency procedure decides the
/// template's CSP.
pub fn bounded_width(b: &Structure, limits: &Limits) -> Result<BoundedWidth> {
    let core = match relstruct::core(b, limits) {
        Ok((c, _)) => c,
        Err(Error::GuardExceeded(m)) => return Ok(BoundedWidth::Inconclusive(m)),
        Err(e) => return Err(e),
    };
    let expansion = singleton_expansion(&core);
    match find_special(&expansion, SpecialKind::Wnu34, false, limits) {
        Ok(SpecialResult::Found(ops)) => Ok(BoundedWidth::Bounded { of: expansion, ops }),
        Ok(SpecialResult::Absent) => Ok(BoundedWidth::Unbounded),
        Ok(SpecialResult::Inconclusive) => unreachable!("the pair search has no cap verdict"),
        Err(Error::GuardExceeded(m)) => Ok(BoundedWidth::Inconclusive(m)),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Cyclic arities

/// For every arity `2..=max_arity`, whether a cyclic polymorphism of
/// that arity exists.
pub fn cyclic_arity_profile(
    b: &Structure,
    max_arity: usize,
    limits: &Limits,
) -> Result<Vec<(usize, bool)>> {
    let mut out = Vec::new();
    for k in 2..=max_arity {
        let found = find_special(b, SpecialKind::Cyclic(k), false, limits)?.is_found();
        out.push((k, found));
    }
    Ok(out)
}

/// Convenience: the arities from the profile that carry a cyclic
/// polymorphism.
pub fn cyclic_arities(profile: &[(usize, bool)]) -> BTreeSet<usize> {
    profile.iter().filter(|(_, found)| *found).map(|(k, _)| *k).collect()
}

// ---------------------------------------------------------------------------

/// Re-validates a verdict's certificate: polymorphism certificates
/// must preserve their structure, structural certificates must hold of
/// the graph they describe.
pub fn validate_certificate(verdict: &Verdict, subject: &Structure, limits: &Limits) -> Result<bool> {
    match &verdict.certificate {
        Certificate::SchaeferClasses(list) => {
            for (_, op) in list {
                if !is_polymorphism_with(op, subject, limits)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Certificate::FailedOperations(violations) => Ok(violations.iter().all(|v| {
            let tuples = subject.relation(&v.relation);
            tuples.is_some_and(|t| {
                v.rows.iter().all(|r| t.contains(r)) && !t.contains(&v.image)
            })
        })),
        Certificate::Loop(v) => {
            Ok(subject.relation("E").is_some_and(|e| e.contains(&vec![*v, *v])))
        }
        Certificate::Bipartition(colour) => Ok(subject
            .arcs()?
            .iter()
            .all(|&(u, v)| colour[u] != colour[v])),
        Certificate::OddClosedWalk(walk) => {
            let edges = subject.relation("E").unwrap();
            let closed = walk.first() == walk.last();
            let odd = (walk.len() - 1) % 2 == 1;
            let connected = walk.windows(2).all(|w| edges.contains(&vec![w[0], w[1]]));
            Ok(closed && odd && connected)
        }
        Certificate::CycleUnionCore(core) => {
            Ok(structure_predicates(core)?.is_disjoint_union_of_directed_cycles
                && crate::homsearch::hom_equivalent(core, subject)?)
        }
        Certificate::Polymorphisms { of, ops } => {
            for (_, op) in ops {
                if !is_polymorphism_with(op, of, limits)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Certificate::ExhaustedSearch(_) | Certificate::Blocked(_) => Ok(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relstruct::{complete, cycle, digraph, directed_cycle, disjoint_union, graph, transitive_tournament};

    fn limits() -> Limits {
        Limits::default()
    }

    fn bool_template(relations: &[(&str, usize, &[&[usize]])]) -> Structure {
        let sig = Signature::new(relations.iter().map(|(n, a, _)| (n.to_string(), *a)));
        let mut s = Structure::new(sig, 2);
        for (name, _, tuples) in relations {
            for t in *tuples {
                s.insert_tuple(name, t.to_vec()).unwrap();
            }
        }
        s
    }

    #[test]
    fn schaefer_horn_fixture() {
        // ({0,1}; {0,1}^3 minus (1,1,0), {0}, {1}) is Horn.
        let horn = bool_template(&[
            (
                "R",
                3,
                &[
                    &[0, 0, 0],
                    &[0, 0, 1],
                    &[0, 1, 0],
                    &[0, 1, 1],
                    &[1, 0, 0],
                    &[1, 0, 1],
                    &[1, 1, 1],
                ],
            ),
            ("Z", 1, &[&[0]]),
            ("O", 1, &[&[1]]),
        ]);
        let verdict = schaefer(&horn).unwrap();
        assert_eq!(verdict.complexity, Complexity::P);
        let classes = schaefer_classes(&verdict);
        assert!(classes.contains(&SchaeferClass::Horn));
        assert!(!classes.contains(&SchaeferClass::DualHorn));
        assert!(validate_certificate(&verdict, &horn, &limits()).unwrap());
    }

    #[test]
    fn schaefer_affine_fixture() {
        let affine = bool_template(&[
            ("L0", 3, &[&[0, 0, 0], &[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]),
            ("L1", 3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]),
        ]);
        let verdict = schaefer(&affine).unwrap();
        assert!(schaefer_classes(&verdict).contains(&SchaeferClass::Affine));
    }

    #[test]
    fn schaefer_one_in_three_hard() {
        let oneinthree = bool_template(&[("R", 3, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]])]);
        let verdict = schaefer(&oneinthree).unwrap();
        assert_eq!(verdict.complexity, Complexity::NpComplete);
        let Certificate::FailedOperations(violations) = &verdict.certificate else {
            panic!("expected failure witnesses")
        };
        assert_eq!(violations.len(), 6);
        assert!(validate_certificate(&verdict, &oneinthree, &limits()).unwrap());
    }

    #[test]
    fn hell_nesetril_fixtures() {
        let v = hell_nesetril(&cycle(5)).unwrap();
        assert_eq!(v.complexity, Complexity::NpComplete);
        assert!(validate_certificate(&v, &cycle(5), &limits()).unwrap());

        let v = hell_nesetril(&cycle(6)).unwrap();
        assert_eq!(v.complexity, Complexity::P);
        assert!(matches!(v.certificate, Certificate::Bipartition(_)));
        assert!(validate_certificate(&v, &cycle(6), &limits()).unwrap());

        let looped = graph(2, [(0, 0), (0, 1)]);
        let v = hell_nesetril(&looped).unwrap();
        assert_eq!(v.complexity, Complexity::P);
        assert!(matches!(v.certificate, Certificate::Loop(0)));

        assert!(hell_nesetril(&transitive_tournament(3)).is_err());
    }

    #[test]
    fn smooth_digraph_fixtures() {
        let cycles = disjoint_union(&directed_cycle(3), &directed_cycle(5)).unwrap();
        let v = smooth_digraph(&cycles, &limits()).unwrap();
        assert_eq!(v.complexity, Complexity::P);
        assert!(validate_certificate(&v, &cycles, &limits()).unwrap());

        let v = smooth_digraph(&directed_cycle(4), &limits()).unwrap();
        assert_eq!(v.complexity, Complexity::P);

        // The complete loopless digraph on 3 vertices is smooth but
        // its core is not a cycle union.
        let k3 = complete(3);
        let v = smooth_digraph(&k3, &limits()).unwrap();
        assert_eq!(v.complexity, Complexity::NpComplete);

        // Not smooth: rejected up front.
        assert!(smooth_digraph(&transitive_tournament(3), &limits()).is_err());
    }

    #[test]
    fn dichotomy_fixtures() {
        let v = dichotomy(&directed_cycle(3), &limits()).unwrap();
        assert_eq!(v.complexity, Complexity::P);
        assert!(validate_certificate(&v, &directed_cycle(3), &limits()).unwrap());

        let v = dichotomy(&transitive_tournament(3), &limits()).unwrap();
        assert_eq!(v.complexity, Complexity::P);

        let v = dichotomy(&complete(3), &limits()).unwrap();
        assert_eq!(v.complexity, Complexity::NpComplete);
    }

    #[test]
    fn bounded_width_tractable_tournament() {
        let v = bounded_width(&transitive_tournament(3), &limits()).unwrap();
        assert_eq!(v.bounded(), Some(true));
        if let BoundedWidth::Bounded { of, ops } = v {
            for (_, op) in &ops {
                assert!(is_polymorphism_with(op, &of, &limits()).unwrap());
            }
            assert!(crate::polymorphism::check_identities(
                &ops,
                &crate::polymorphism::IdentitySystem::wnu_3_4()
            )
            .unwrap());
        }
    }

    #[test]
    fn cyclic_profile_of_directed_triangle() {
        let profile = cyclic_arity_profile(&directed_cycle(3), 5, &limits()).unwrap();
        let arities = cyclic_arities(&profile);
        assert!(arities.contains(&2) && arities.contains(&5));
        assert!(!arities.contains(&3));
    }

    #[test]
    fn cyclic_profile_matches_exhaustive_on_k2() {
        let k2 = complete(2);
        for k in 2..=3usize {
            let found = find_special(&k2, SpecialKind::Cyclic(k), false, &limits())
                .unwrap()
                .is_found();
            let sys = crate::polymorphism::IdentitySystem::cyclic(k).unwrap();
            let exhaustive = crate::polymorphism::all_operations(k, 2, &limits())
                .unwrap()
                .into_iter()
                .any(|op| {
                    crate::polymorphism::is_polymorphism(&op, &k2).unwrap()
                        && crate::polymorphism::check_identities(
                            &[("c".to_string(), op)],
                            &sys,
                        )
                        .unwrap()
                });
            assert_eq!(found, exhaustive, "arity {k}");
        }
    }

    #[test]
    fn singleton_expansion_avoids_collisions() {
        let mut b = Structure::new(Signature::new([("S0", 1)]), 2);
        b.insert_tuple("S0", vec![1]).unwrap();
        let e = singleton_expansion(&b);
        assert_eq!(e.signature().symbols().len(), 3);
        assert!(e.relation("SS0").is_some());
    }

    #[test]
    fn inconclusive_on_guard_overrun() {
        let mut tiny = Limits::default();
        tiny.exhaustive_domain = 2;
        let v = dichotomy(&digraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]), &tiny).unwrap();
        assert_eq!(v.complexity, Complexity::Inconclusive);
        assert!(matches!(v.certificate, Certificate::Blocked(_)));
    }
}
