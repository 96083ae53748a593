//! Primitive positive formulas, the canonical query/database round
//! trip, pp-definability through the Inv-Pol connection, relation
//! closure under operation sets, pp-reductions of instances, and the
//! binary (dual) encoding.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::consistency::UnaryLists;
use crate::homsearch::search_hom;
use crate::polymorphism::{is_polymorphism_with, Operation};
use crate::power_csp::PowerCsp;
use crate::relstruct::{power, power_coords, power_index, Signature, Structure, Tuple, TupleSet};
use crate::{Error, Limits, Result};

/// An atom of a primitive positive formula.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    /// `R(x, y, ...)`
    App(String, Vec<String>),
    /// `x = y`
    Eq(String, String),
    True,
    False,
}

/// An existentially quantified conjunction of atoms over a relational
/// signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPFormula {
    signature: Signature,
    free: Vec<String>,
    bound: Vec<String>,
    atoms: Vec<Atom>,
}

impl PPFormula {
    pub fn new(
        signature: Signature,
        free: Vec<String>,
        bound: Vec<String>,
        atoms: Vec<Atom>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in free.iter().chain(&bound) {
            if !seen.insert(v) {
                return Err(Error::BadArgument(format!("variable {v} declared twice")));
            }
        }
        for atom in &atoms {
            match atom {
                Atom::App(name, args) => match signature.arity(name) {
                    Some(a) if a == args.len() => {
                        if let Some(v) = args.iter().find(|v| !seen.contains(v)) {
                            return Err(Error::BadArgument(format!("undeclared variable {v}")));
                        }
                    }
                    Some(a) => {
                        return Err(Error::BadArgument(format!(
                            "symbol {name} has arity {a}, used with {}",
                            args.len()
                        )))
                    }
                    None => return Err(Error::BadArgument(format!("unknown symbol {name}"))),
                },
                Atom::Eq(x, y) => {
                    if !seen.contains(x) || !seen.contains(y) {
                        return Err(Error::BadArgument("undeclared variable in equality".into()));
                    }
                }
                Atom::True | Atom::False => {}
            }
        }
        Ok(PPFormula { signature, free, bound, atoms })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn free_vars(&self) -> &[String] {
        &self.free
    }

    pub fn bound_vars(&self) -> &[String] {
        &self.bound
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn has_false(&self) -> bool {
        self.atoms.iter().any(|a| matches!(a, Atom::False))
    }
}

/// A finite relation over `0..domain-1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Relation {
    arity: usize,
    domain: usize,
    tuples: TupleSet,
}

impl Relation {
    pub fn new(arity: usize, domain: usize, tuples: TupleSet) -> Result<Self> {
        if arity == 0 {
            return Err(Error::BadArgument("relations of arity 0 are unsupported".into()));
        }
        for t in &tuples {
            if t.len() != arity {
                return Err(Error::BadArgument("tuple arity mismatch".into()));
            }
            if t.iter().any(|&e| e >= domain) {
                return Err(Error::BadArgument("tuple entry out of range".into()));
            }
        }
        Ok(Relation { arity, domain, tuples })
    }

    pub fn from_tuples<I, T>(arity: usize, domain: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<Tuple>,
    {
        Relation::new(arity, domain, tuples.into_iter().map(Into::into).collect())
    }

    /// The inequality relation on a domain.
    pub fn disequality(domain: usize) -> Self {
        let tuples = (0..domain)
            .flat_map(|a| (0..domain).filter(move |&b| b != a).map(move |b| vec![a, b]))
            .collect();
        Relation { arity: 2, domain, tuples }
    }

    /// The diagonal relation on a domain.
    pub fn diagonal(domain: usize) -> Self {
        Relation { arity: 2, domain, tuples: (0..domain).map(|a| vec![a, a]).collect() }
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

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Canonical query and canonical database

/// The canonical conjunctive query: one existential variable `v{i}`
/// per element, one atom per tuple, no free variables.
pub fn canonical_query(a: &Structure) -> PPFormula {
    let bound: Vec<String> = (0..a.size()).map(|i| format!("v{i}")).collect();
    let mut atoms = Vec::new();
    for (name, _, tuples) in a.relations() {
        for t in tuples {
            atoms.push(Atom::App(name.to_string(), t.iter().map(|&x| format!("v{x}")).collect()));
        }
    }
    if atoms.is_empty() {
        atoms.push(Atom::True);
    }
    PPFormula::new(a.signature().clone(), Vec::new(), bound, atoms)
        .expect("canonical queries are well-formed")
}

/// The canonical database: equality atoms are eliminated by
/// substituting the later-declared variable by the earlier one, the
/// remaining variables become elements in declaration order, and the
/// relational atoms become tuples. Also returns where each variable
/// ended up.
pub fn canonical_database(phi: &PPFormula) -> Result<(Structure, BTreeMap<String, usize>)> {
    if phi.has_false() {
        return Err(Error::BadArgument("canonical database of a formula containing falsity".into()));
    }
    let vars: Vec<&String> = phi.free.iter().chain(&phi.bound).collect();
    if vars.is_empty() {
        return Err(Error::InvalidStructure(
            "a formula without variables has an empty canonical database".into(),
        ));
    }
    let index_of: BTreeMap<&String, usize> =
        vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();

    // Union-find keyed by declaration position; the representative is
    // the least position, which realises "substitute later by earlier".
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for atom in &phi.atoms {
        if let Atom::Eq(x, y) = atom {
            let (a, b) = (find(&mut parent, index_of[x]), find(&mut parent, index_of[y]));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    let mut element_of: Vec<usize> = vec![0; vars.len()];
    let mut count = 0usize;
    for i in 0..vars.len() {
        if find(&mut parent, i) == i {
            element_of[i] = count;
            count += 1;
        }
    }
    for i in 0..vars.len() {
        let root = find(&mut parent, i);
        element_of[i] = element_of[root];
    }

    let mut db = Structure::new(phi.signature.clone(), count);
    for atom in &phi.atoms {
        if let Atom::App(name, args) = atom {
            let tuple: Tuple = args.iter().map(|v| element_of[index_of[v]]).collect();
            db.insert_tuple(name, tuple)?;
        }
    }
    let placement = vars.iter().enumerate().map(|(i, v)| ((*v).clone(), element_of[i])).collect();
    Ok((db, placement))
}

fn check_formula_against(phi: &PPFormula, b: &Structure) -> Result<()> {
    for (name, arity) in phi.signature.symbols() {
        match b.signature().arity(name) {
            Some(a) if a == *arity => {}
            _ => return Err(Error::SignatureMismatch),
        }
    }
    Ok(())
}

/// Truth of the formula in `b` at the given free-variable assignment,
/// decided by searching for a homomorphism of the canonical database
/// with the free variables precoloured.
pub fn evaluate(
    phi: &PPFormula,
    b: &Structure,
    assignment: &BTreeMap<String, usize>,
) -> Result<bool> {
    check_formula_against(phi, b)?;
    for v in &phi.free {
        match assignment.get(v) {
            Some(&x) if x < b.size() => {}
            Some(_) => return Err(Error::BadArgument(format!("assignment for {v} out of range"))),
            None => return Err(Error::BadArgument(format!("free variable {v} unassigned"))),
        }
    }
    if phi.has_false() {
        return Ok(false);
    }
    if phi.free.is_empty() && phi.bound.is_empty() {
        return Ok(true); // only TRUE atoms remain
    }
    let (db, placement) = canonical_database(phi)?;
    let mut init = UnaryLists::full(db.size(), b.size());
    for v in &phi.free {
        init.restrict(placement[v], [assignment[v]]);
    }
    if init.has_empty() {
        // Merged free variables with conflicting assigned values.
        return Ok(false);
    }
    Ok(search_hom(&db, b, &init)?.is_some())
}

/// All satisfying free-variable assignments.
pub fn defined_relation(phi: &PPFormula, b: &Structure) -> Result<Relation> {
    check_formula_against(phi, b)?;
    let k = phi.free.len();
    if k == 0 {
        return Err(Error::BadArgument("defined relation needs free variables".into()));
    }
    let n = b.size();
    let mut tuples = TupleSet::new();
    for idx in 0..n.pow(k as u32) {
        let values = power_coords(n, k, idx);
        let assignment: BTreeMap<String, usize> =
            phi.free.iter().cloned().zip(values.iter().copied()).collect();
        if evaluate(phi, b, &assignment)? {
            tuples.insert(values);
        }
    }
    Relation::new(k, n, tuples)
}

// ---------------------------------------------------------------------------
// Closure under operations

/// The least superset of `r` closed under every operation applied
/// componentwise (fixed-point iteration).
pub fn closure(r: &Relation, ops: &[Operation]) -> Result<Relation> {
    for op in ops {
        if op.domain() != r.domain {
            return Err(Error::BadArgument("operation domain does not match relation".into()));
        }
    }
    let mut tuples = r.tuples.clone();
    loop {
        let mut fresh: Vec<Tuple> = Vec::new();
        for op in ops {
            let rows: Vec<&Tuple> = tuples.iter().collect();
            let j = op.arity();
            if rows.is_empty() {
                continue;
            }
            let mut choice = vec![0usize; j];
            'combinations: loop {
                let image: Tuple = (0..r.arity)
                    .map(|pos| {
                        let args: Vec<usize> = choice.iter().map(|&c| rows[c][pos]).collect();
                        op.apply(&args)
                    })
                    .collect();
                if !tuples.contains(&image) && !fresh.contains(&image) {
                    fresh.push(image);
                }
                let mut i = j;
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
        if fresh.is_empty() {
            return Relation::new(r.arity, r.domain, tuples);
        }
        tuples.extend(fresh);
    }
}

// ---------------------------------------------------------------------------
// pp-definability via Inv-Pol

/// Verdict of the pp-definability test, with a machine-checkable
/// certificate either way.
#[derive(Clone, Debug)]
pub enum PpDefinability {
    /// A formula whose defined relation is exactly the input.
    Definable(PPFormula),
    /// A polymorphism of the structure that does not preserve the
    /// relation.
    NotDefinable(Operation),
}

impl PpDefinability {
    pub fn is_definable(&self) -> bool {
        matches!(self, PpDefinability::Definable(_))
    }
}

/// The pp-closure of the rows: `{ (h(c_1),...,h(c_k)) : h in
/// Hom(b^w, b) }` where `w` is the number of rows and `c_i` their
/// columns; decided candidate by candidate on the implicit power.
fn generated_closure(b: &Structure, rows: &[Tuple], arity: usize, limits: &Limits) -> Result<TupleSet> {
    let n = b.size();
    let w = rows.len();
    let columns: Vec<usize> = (0..arity)
        .map(|i| {
            let col: Vec<usize> = rows.iter().map(|r| r[i]).collect();
            power_index(n, &col)
        })
        .collect();
    let mut out = TupleSet::new();
    for idx in 0..n.pow(arity as u32) {
        let candidate = power_coords(n, arity, idx);
        let mut engine = PowerCsp::new(b, &[w], limits)?;
        for (i, &c) in columns.iter().enumerate() {
            engine.pin(c, candidate[i]);
        }
        engine.seal();
        let mut budget = limits.engine_states as i64;
        if engine.solve(&mut budget)?.is_some() {
            out.insert(candidate);
        }
    }
    Ok(out)
}

/// One full solution over the implicit power with the columns pinned
/// to `target`, read back as a w-ary operation.
fn generated_witness_operation(
    b: &Structure,
    rows: &[Tuple],
    target: &Tuple,
    limits: &Limits,
) -> Result<Operation> {
    let n = b.size();
    let w = rows.len();
    let mut engine = PowerCsp::new(b, &[w], limits)?;
    for (i, t) in target.iter().enumerate() {
        let col: Vec<usize> = rows.iter().map(|r| r[i]).collect();
        engine.pin(power_index(n, &col), *t);
    }
    engine.seal();
    let mut budget = limits.engine_states as i64;
    let values = engine
        .solve(&mut budget)?
        .ok_or_else(|| Error::BadArgument("witness tuple vanished".into()))?;
    let table: Vec<usize> =
        (0..n.pow(w as u32)).map(|p| values[engine.class_of(p)] as usize).collect();
    Operation::new(w, n, table)
}

/// Decides primitive positive definability of `r` in `b` through the
/// Inv-Pol connection.
///
/// A cheap refuter runs first: the closure of `r` under a sample of
/// polymorphisms of arity at most 3 either already leaves `r` (not
/// definable, with the violating operation as certificate) or the
/// exact construction takes over. The exact side computes the least
/// preserved superset of `r` as the closure generated by a greedily
/// grown generating subset `r0` of `r`, keeping the power `b^|r0|`
/// small; `closure(closure(X)) = closure(X)` makes the greedy subset
/// sound. If the closure equals `r`, the pointed canonical query of
/// `b^|r0|` is emitted as the (un-minimised) witness formula;
/// otherwise the homomorphism sending the columns to an escaping tuple
/// is returned as the violating polymorphism.
pub fn is_pp_definable(r: &Relation, b: &Structure, limits: &Limits) -> Result<PpDefinability> {
    if r.domain != b.size() {
        return Err(Error::BadArgument("relation domain does not match structure".into()));
    }
    // The empty relation is defined by falsity.
    if r.tuples.is_empty() {
        let free: Vec<String> = (0..r.arity).map(|i| format!("x{i}")).collect();
        let phi = PPFormula::new(b.signature().clone(), free, Vec::new(), vec![Atom::False])?;
        return Ok(PpDefinability::Definable(phi));
    }

    // Cheap refuter: closure under sampled low-arity polymorphisms.
    if let Some(f) = refute_by_low_arity(r, b, limits)? {
        return Ok(PpDefinability::NotDefinable(f));
    }

    let (rows, closed) = grow_generating_rows(r, b, limits)?;
    if let Some(extra) = closed.iter().find(|t| !r.tuples.contains(*t)) {
        let f = generated_witness_operation(b, &rows, extra, limits)?;
        if !is_polymorphism_with(&f, b, limits)? || violates(&f, r) != Some(extra.clone()) {
            return Err(Error::BadArgument("unverified violating polymorphism".into()));
        }
        return Ok(PpDefinability::NotDefinable(f));
    }
    let phi = witness_formula(b, &rows, r.arity, limits)?;
    Ok(PpDefinability::Definable(phi))
}

/// The least primitively positively definable relation over `b`
/// containing `r`, via the same generating-subset machinery as
/// [`is_pp_definable`].
pub fn pp_closure(r: &Relation, b: &Structure, limits: &Limits) -> Result<Relation> {
    if r.tuples.is_empty() {
        return Ok(r.clone());
    }
    let (_, closed) = grow_generating_rows(r, b, limits)?;
    Relation::new(r.arity, r.domain, closed)
}

/// Greedily grows a generating subset of `r` until its pp-closure
/// covers `r`; since the closure of a closure adds nothing, the result
/// is exactly the pp-closure of `r` itself.
fn grow_generating_rows(
    r: &Relation,
    b: &Structure,
    limits: &Limits,
) -> Result<(Vec<Tuple>, TupleSet)> {
    let mut rows: Vec<Tuple> = vec![r.tuples.iter().next().unwrap().clone()];
    loop {
        let points = (b.size() as u64).checked_pow(rows.len() as u32);
        if points.is_none_or(|p| p > limits.power_points) {
            return Err(Error::GuardExceeded(format!(
                "pp-definability witness power {}^{} exceeds the budget",
                b.size(),
                rows.len()
            )));
        }
        let closed = generated_closure(b, &rows, r.arity, limits)?;
        if let Some(missing) = r.tuples.iter().find(|t| !closed.contains(*t)) {
            rows.push(missing.clone());
            continue;
        }
        return Ok((rows, closed));
    }
}

/// Does applying `f` to some rows of `r` escape `r`? Returns one
/// escaping image.
pub fn violates(f: &Operation, r: &Relation) -> Option<Tuple> {
    let rows: Vec<&Tuple> = r.tuples.iter().collect();
    if rows.is_empty() {
        return None;
    }
    let j = f.arity();
    let mut choice = vec![0usize; j];
    'combinations: loop {
        let image: Tuple = (0..r.arity)
            .map(|pos| {
                let args: Vec<usize> = choice.iter().map(|&c| rows[c][pos]).collect();
                f.apply(&args)
            })
            .collect();
        if !r.tuples.contains(&image) {
            return Some(image);
        }
        let mut i = j;
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
    None
}

fn refute_by_low_arity(r: &Relation, b: &Structure, limits: &Limits) -> Result<Option<Operation>> {
    const SAMPLE_CAP: usize = 64;
    for arity in 1..=3usize {
        let powered = if arity == 1 { b.clone() } else { power(b, arity)? };
        if powered.size() > 1_000 || powered.total_tuples() > 200_000 {
            continue;
        }
        let init = UnaryLists::full(powered.size(), b.size());
        let (homs, _) = crate::homsearch::enumerate_homs(&powered, b, &init, SAMPLE_CAP)?;
        for h in homs {
            let op = Operation::new(arity, b.size(), h.table().to_vec())?;
            if violates(&op, r).is_some() {
                debug_assert!(is_polymorphism_with(&op, b, limits)?);
                return Ok(Some(op));
            }
        }
    }
    Ok(None)
}

/// The pointed canonical query of `b^w`: existential variables for all
/// power elements, the power's atoms, and equalities binding the free
/// variables to the generating columns.
fn witness_formula(b: &Structure, rows: &[Tuple], arity: usize, limits: &Limits) -> Result<PPFormula> {
    let n = b.size();
    let w = rows.len();
    let powered = power(b, w)?;
    if powered.total_tuples() as u64 > limits.tuples {
        return Err(Error::GuardExceeded("witness formula too large to materialise".into()));
    }
    let free: Vec<String> = (0..arity).map(|i| format!("x{i}")).collect();
    let bound: Vec<String> = (0..powered.size()).map(|i| format!("p{i}")).collect();
    let mut atoms = Vec::new();
    for (name, _, tuples) in powered.relations() {
        for t in tuples {
            atoms.push(Atom::App(name.to_string(), t.iter().map(|&x| format!("p{x}")).collect()));
        }
    }
    for (i, x) in free.iter().enumerate() {
        let col: Vec<usize> = rows.iter().map(|r| r[i]).collect();
        atoms.push(Atom::Eq(x.clone(), format!("p{}", power_index(n, &col))));
    }
    PPFormula::new(b.signature().clone(), free, bound, atoms)
}

// ---------------------------------------------------------------------------
// pp-reduction of instances

/// Rewrites an instance over an expanded template `(B, R)` into an
/// equisatisfiable instance over `B`: every `R`-constraint is replaced
/// by the definition's atoms with fresh bound variables, and equality
/// atoms are eliminated by merging instance variables. Also returns
/// where each original variable went.
pub fn pp_reduce_instance(
    instance: &Structure,
    symbol: &str,
    definition: &PPFormula,
) -> Result<(Structure, Vec<usize>)> {
    let Some(sym_index) = instance.signature().index_of(symbol) else {
        return Err(Error::BadArgument(format!("instance has no symbol {symbol}")));
    };
    let arity = instance.signature().symbols()[sym_index].1;
    if definition.free.len() != arity {
        return Err(Error::BadArgument("definition arity does not match the symbol".into()));
    }
    if definition.has_false() {
        return Err(Error::BadArgument("definitions containing falsity are not supported".into()));
    }

    let constraints: Vec<Tuple> = instance.relation(symbol).unwrap().iter().cloned().collect();
    let n_old = instance.size();
    let total = n_old + constraints.len() * definition.bound.len();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }

    // Instantiated atoms over union-find nodes.
    let mut app_atoms: Vec<(String, Vec<usize>)> = Vec::new();
    for (name, _, tuples) in instance.relations() {
        if name == symbol {
            continue;
        }
        for t in tuples {
            app_atoms.push((name.to_string(), t.clone()));
        }
    }
    for (ci, scope) in constraints.iter().enumerate() {
        let fresh_base = n_old + ci * definition.bound.len();
        let node_of = |v: &String| -> usize {
            if let Some(i) = definition.free.iter().position(|f| f == v) {
                scope[i]
            } else {
                let j = definition.bound.iter().position(|b| b == v).unwrap();
                fresh_base + j
            }
        };
        for atom in &definition.atoms {
            match atom {
                Atom::App(name, args) => {
                    app_atoms.push((name.clone(), args.iter().map(node_of).collect()));
                }
                Atom::Eq(x, y) => {
                    let (a, b) = (find(&mut parent, node_of(x)), find(&mut parent, node_of(y)));
                    if a != b {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        parent[hi] = lo;
                    }
                }
                Atom::True => {}
                Atom::False => unreachable!("rejected above"),
            }
        }
    }

    let mut class_of = vec![0usize; total];
    let mut count = 0usize;
    for x in 0..total {
        if find(&mut parent, x) == x {
            class_of[x] = count;
            count += 1;
        }
    }
    for x in 0..total {
        let root = find(&mut parent, x);
        class_of[x] = class_of[root];
    }

    let reduced_signature = Signature::new(
        instance
            .signature()
            .symbols()
            .iter()
            .filter(|(name, _)| name != symbol)
            .map(|(name, a)| (name.clone(), *a)),
    );
    let mut out = Structure::new(reduced_signature, count);
    for (name, nodes) in app_atoms {
        out.insert_tuple(&name, nodes.iter().map(|&x| class_of[x]).collect())?;
    }
    Ok((out, class_of[..n_old].to_vec()))
}

// ---------------------------------------------------------------------------
// Binary (dual) encoding

/// The d-th full power of a structure in a binary signature: domain
/// `C^d`, one unary relation per original symbol, and coordinate
/// matching relations `E_i_j`, plus the instance translation.
#[derive(Clone, Debug)]
pub struct BinaryEncoding {
    encoded: Structure,
    domain: usize,
    dim: usize,
}

impl BinaryEncoding {
    pub fn encoded(&self) -> &Structure {
        &self.encoded
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The unary symbol standing for an original relation.
    pub fn unary_symbol(name: &str) -> String {
        format!("{name}_u")
    }

    /// The coordinate-matching symbol `E_i_j` (1-based).
    pub fn matching_symbol(i: usize, j: usize) -> String {
        format!("E_{i}_{j}")
    }

    /// Translates an instance over the original signature into an
    /// equisatisfiable instance over the encoded signature: each
    /// original variable keeps its index, and every constraint gets a
    /// fresh variable `y` with `R_u(y)` and `E_1_i(x_i, y)`.
    pub fn translate_instance(&self, instance: &Structure) -> Result<(Structure, Vec<usize>)> {
        let constraint_count: usize = instance.relations().map(|(_, _, t)| t.len()).sum();
        let mut out =
            Structure::new(self.encoded.signature().clone(), instance.size() + constraint_count);
        let mut fresh = instance.size();
        for (name, _, tuples) in instance.relations() {
            let unary = Self::unary_symbol(name);
            for t in tuples {
                out.insert_tuple(&unary, vec![fresh])?;
                for (i, &v) in t.iter().enumerate() {
                    out.insert_tuple(&Self::matching_symbol(1, i + 1), vec![v, fresh])?;
                }
                fresh += 1;
            }
        }
        Ok((out, (0..instance.size()).collect()))
    }

    /// Reads an original-domain value off an encoded solution value:
    /// the first coordinate.
    pub fn decode_value(&self, encoded_value: usize) -> usize {
        power_coords(self.domain, self.dim, encoded_value)[0]
    }
}

/// Builds the binary encoding `c^[d]` for `d` at least the maximal
/// arity of `c`.
pub fn binary_encoding(c: &Structure, d: usize, limits: &Limits) -> Result<BinaryEncoding> {
    let n = c.size();
    let max_arity = c.signature().max_arity();
    if d < max_arity {
        return Err(Error::BadArgument(format!(
            "encoding dimension {d} below maximal arity {max_arity}"
        )));
    }
    let domain = (n as u64)
        .checked_pow(d as u32)
        .filter(|&p| p <= limits.power_points)
        .ok_or_else(|| Error::GuardExceeded("encoded domain too large".into()))?
        as usize;
    let mut symbols: Vec<(String, usize)> = Vec::new();
    for (name, _) in c.signature().symbols() {
        symbols.push((BinaryEncoding::unary_symbol(name), 1));
    }
    for i in 1..=d {
        for j in 1..=d {
            symbols.push((BinaryEncoding::matching_symbol(i, j), 2));
        }
    }
    {
        let names: BTreeSet<&String> = symbols.iter().map(|(n, _)| n).collect();
        if names.len() != symbols.len() {
            return Err(Error::BadArgument("encoded symbol names collide".into()));
        }
    }
    let tuple_estimate = (c.total_tuples() as u64) * (n as u64).pow((d - 1) as u32)
        + (d * d) as u64 * (n as u64).pow((2 * d - 1) as u32);
    if tuple_estimate > limits.tuples {
        return Err(Error::GuardExceeded("encoded relations too large".into()));
    }

    let mut encoded = Structure::new(Signature::new(symbols), domain);
    // R_u: all d-tuples whose prefix lies in R.
    for (name, arity, tuples) in c.relations() {
        let unary = BinaryEncoding::unary_symbol(name);
        let pad = n.pow((d - arity) as u32);
        for t in tuples {
            let base = power_index(n, t) * pad;
            for suffix in 0..pad {
                encoded.insert_tuple(&unary, vec![base + suffix])?;
            }
        }
    }
    // E_i_j: i-th coordinate of x equals j-th coordinate of y.
    for i in 1..=d {
        for j in 1..=d {
            let name = BinaryEncoding::matching_symbol(i, j);
            for x in 0..domain {
                let xi = power_coords(n, d, x)[i - 1];
                for y in 0..domain {
                    if power_coords(n, d, y)[j - 1] == xi {
                        encoded.insert_tuple(&name, vec![x, y])?;
                    }
                }
            }
        }
    }
    Ok(BinaryEncoding { encoded, domain: n, dim: d })
}
