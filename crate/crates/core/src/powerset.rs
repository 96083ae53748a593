//! The powerset structure, the AC-solvability / tree-duality
//! meta-decision, and extraction of totally symmetric polymorphisms.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::consistency::{ac, UnaryLists};
use crate::polymorphism::Operation;
use crate::relstruct::{self, Mapping, Structure, Tuple};
use crate::{Error, Limits, Result};

/// The powerset structure over `b`: elements are the nonempty subsets
/// of `b`'s domain encoded as bitmasks and ordered by mask value
/// (element `i` is the subset with mask `i + 1`). A tuple of subsets
/// is in a relation iff every member of every component extends to a
/// full template tuple through the other components.
pub fn powerset_structure(b: &Structure, limits: &Limits) -> Result<Structure> {
    let n = b.size();
    if n > limits.powerset_domain {
        return Err(Error::GuardExceeded(format!(
            "powerset needs domain <= {}, got {n}",
            limits.powerset_domain
        )));
    }
    let subsets = (1usize << n) - 1;
    let mut out = Structure::new(b.signature().clone(), subsets);
    for (name, arity, tuples) in b.relations() {
        // Enumerate candidate subset tuples and test the support
        // condition positionwise.
        let mut masks = vec![1usize; arity];
        if subsets == 0 {
            continue;
        }
        'candidates: loop {
            let supported = (0..arity).all(|i| {
                (0..n).filter(|&u| masks[i] >> u & 1 == 1).all(|u| {
                    tuples.iter().any(|t| {
                        t[i] == u
                            && t.iter()
                                .enumerate()
                                .all(|(j, &v)| j == i || masks[j] >> v & 1 == 1)
                    })
                })
            });
            if supported {
                let tuple: Tuple = masks.iter().map(|&m| m - 1).collect();
                out.insert_tuple(name, tuple)?;
            }
            let mut i = arity;
            loop {
                if i == 0 {
                    break 'candidates;
                }
                i -= 1;
                masks[i] += 1;
                if masks[i] <= subsets {
                    break;
                }
                masks[i] = 1;
            }
        }
    }
    Ok(out)
}

/// Verdict of the tree-duality decision, with its certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeDuality {
    /// `P(core(b))` maps to `core(b)`; carries the core and the
    /// verified homomorphism.
    Holds { core: Structure, powerset: Structure, hom: Mapping },
    /// No homomorphism; carries the element whose pinning failed for
    /// every value (`None` when the initial propagation already
    /// rejected) and the values tried.
    Fails { core: Structure, failed_element: Option<usize>, tried: Vec<usize> },
}

impl TreeDuality {
    pub fn holds(&self) -> bool {
        matches!(self, TreeDuality::Holds { .. })
    }
}

/// Decides whether arc consistency solves the template's CSP,
/// equivalently whether the template has tree duality: replaces `b` by
/// its core and decides `P(core) -> core` by arc consistency plus
/// pin-and-propagate. The pinning shortcut is only sound over a core,
/// which is why the core is taken first.
pub fn ac_solvability(b: &Structure, limits: &Limits) -> Result<TreeDuality> {
    let (core, _) = relstruct::core(b, limits)?;
    let p = powerset_structure(&core, limits)?;
    let mut lists = match ac(&p, &core, &UnaryLists::full(p.size(), core.size()))? {
        Some(l) => l,
        None => return Ok(TreeDuality::Fails { core, failed_element: None, tried: Vec::new() }),
    };
    for x in 0..p.size() {
        let candidates: Vec<usize> = lists.get(x).iter().collect();
        if candidates.len() == 1 {
            continue;
        }
        let mut pinned = None;
        for &u in &candidates {
            let mut trial = lists.clone();
            trial.set_singleton(x, u);
            if let Some(next) = ac(&p, &core, &trial)? {
                pinned = Some(next);
                break;
            }
        }
        match pinned {
            Some(next) => lists = next,
            None => {
                return Ok(TreeDuality::Fails { core, failed_element: Some(x), tried: candidates })
            }
        }
    }
    let hom = lists.as_mapping().expect("all lists pinned");
    if !hom.is_homomorphism(&p, &core) {
        return Err(Error::BadArgument("unverified powerset homomorphism".into()));
    }
    Ok(TreeDuality::Holds { core, powerset: p, hom })
}

/// Builds the k-ary totally symmetric polymorphism `f(x_1,...,x_k) :=
/// g({x_1,...,x_k})` from a verified homomorphism `g : P(b) -> b`.
pub fn extract_totally_symmetric(
    b: &Structure,
    hom: &Mapping,
    k: usize,
    limits: &Limits,
) -> Result<Operation> {
    let p = powerset_structure(b, limits)?;
    if !hom.is_homomorphism(&p, b) {
        return Err(Error::BadArgument("map is not a homomorphism from the powerset".into()));
    }
    Operation::from_fn(k, b.size(), |args| {
        let mask: usize = args.iter().fold(0, |m, &x| m | 1 << x);
        hom.apply(mask - 1)
    })
}
