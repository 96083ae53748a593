//! Operation tables, preservation checks, the indicator-instance
//! search for polymorphisms satisfying linear identity systems, and
//! the named special-polymorphism testers.
//!
//! A k-ary polymorphism is a homomorphism from the k-th power of the
//! template back to the template, so each search here is a CSP over
//! that power with variables merged and pinned according to the
//! identity system (the indicator construction). The search itself
//! runs on the implicit power-CSP engine, which explores the same tree
//! as an explicit search on the materialised indicator instance
//! without ever materialising the power's relations.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::consistency::{pc_fixpoint, PairLists, UnaryLists};
use crate::homsearch::enumerate_homs;
use crate::power_csp::PowerCsp;
use crate::relstruct::{power, power_coords, power_index, Structure, Tuple};
use crate::{Error, Limits, Result};

/// A k-ary finite function table; the table is indexed row-major (the
/// first argument is the most significant digit), matching the element
/// encoding of structure powers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Operation {
    arity: usize,
    domain: usize,
    table: Vec<usize>,
}

impl Operation {
    pub fn new(arity: usize, domain: usize, table: Vec<usize>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::BadArgument("operation arity must be >= 1".into()));
        }
        let expected = domain
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::GuardExceeded("operation table overflows".into()))?;
        if table.len() != expected {
            return Err(Error::BadArgument(format!(
                "table length {} does not match {domain}^{arity}",
                table.len()
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v >= domain) {
            return Err(Error::BadArgument(format!("table value {v} out of range")));
        }
        Ok(Operation { arity, domain, table })
    }

    pub fn from_fn(arity: usize, domain: usize, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let size = domain
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::GuardExceeded("operation table overflows".into()))?;
        let table = (0..size).map(|i| f(&power_coords(domain, arity, i))).collect();
        Operation::new(arity, domain, table)
    }

    pub fn projection(arity: usize, domain: usize, coordinate: usize) -> Result<Self> {
        if coordinate >= arity {
            return Err(Error::BadArgument("projection coordinate out of range".into()));
        }
        Operation::from_fn(arity, domain, |args| args[coordinate])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.table[power_index(self.domain, args)]
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.domain).all(|x| self.apply(&vec![x; self.arity]) == x)
    }
}

/// Does `f` preserve every relation of `b`?
///
/// Small relations are checked by enumerating tuple combinations;
/// larger ones go through the power-CSP engine, which decides the same
/// condition without enumerating the `|R|^k` combinations.
pub fn is_polymorphism(f: &Operation, b: &Structure) -> Result<bool> {
    is_polymorphism_with(f, b, &Limits::default())
}

pub fn is_polymorphism_with(f: &Operation, b: &Structure, limits: &Limits) -> Result<bool> {
    if f.domain != b.size() {
        return Err(Error::BadArgument("operation domain does not match structure".into()));
    }
    let k = f.arity as u32;
    let explicit_cost: Option<u64> = b
        .relations()
        .map(|(_, _, tuples)| (tuples.len() as u64).checked_pow(k))
        .try_fold(0u64, |acc, c| c.and_then(|c| acc.checked_add(c)));
    if let Some(cost) = explicit_cost {
        if cost <= 100_000 {
            return Ok(preserves_explicit(f, b));
        }
    }
    let mut engine = PowerCsp::new(b, &[f.arity], limits)?;
    for (p, &v) in f.table.iter().enumerate() {
        engine.pin(p, v);
    }
    engine.seal();
    let mut budget = limits.engine_states as i64;
    engine.propagate(&mut budget)
}

fn preserves_explicit(f: &Operation, b: &Structure) -> bool {
    let k = f.arity;
    for (_, arity, tuples) in b.relations() {
        let rows: Vec<&Tuple> = tuples.iter().collect();
        if rows.is_empty() {
            continue;
        }
        let mut choice = vec![0usize; k];
        'combinations: loop {
            let image: Tuple = (0..arity)
                .map(|j| {
                    let args: Vec<usize> = choice.iter().map(|&c| rows[c][j]).collect();
                    f.apply(&args)
                })
                .collect();
            if !tuples.contains(&image) {
                return false;
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
    true
}

/// True iff `f` depends on at most one argument.
pub fn is_essentially_unary(f: &Operation) -> bool {
    let mut depends = 0usize;
    'args: for i in 0..f.arity {
        for (idx, &value) in f.table.iter().enumerate() {
            let coords = power_coords(f.domain, f.arity, idx);
            for v in 0..f.domain {
                if v == coords[i] {
                    continue;
                }
                let mut other = coords.clone();
                other[i] = v;
                if f.table[power_index(f.domain, &other)] != value {
                    depends += 1;
                    if depends > 1 {
                        return false;
                    }
                    continue 'args;
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Identity systems

/// A height-one or bare-variable term: `f(x, y, x)` or `x`. Nested
/// terms are outside the indicator construction's scope and are
/// unrepresentable by design.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<String>),
}

impl Term {
    pub fn app(sym: &str, args: &[&str]) -> Term {
        Term::App(sym.to_string(), args.iter().map(|a| a.to_string()).collect())
    }

    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }
}

/// Function symbols with arities plus a list of linear identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentitySystem {
    symbols: Vec<(String, usize)>,
    identities: Vec<(Term, Term)>,
}

impl IdentitySystem {
    pub fn new<S: Into<String>>(
        symbols: impl IntoIterator<Item = (S, usize)>,
        identities: impl IntoIterator<Item = (Term, Term)>,
    ) -> Result<Self> {
        let symbols: Vec<(String, usize)> =
            symbols.into_iter().map(|(n, a)| (n.into(), a)).collect();
        let identities: Vec<(Term, Term)> = identities.into_iter().collect();
        let arity_of = |name: &str| symbols.iter().find(|(n, _)| n == name).map(|(_, a)| *a);
        for (lhs, rhs) in &identities {
            for side in [lhs, rhs] {
                if let Term::App(name, args) = side {
                    match arity_of(name) {
                        Some(a) if a == args.len() => {}
                        Some(a) => {
                            return Err(Error::BadArgument(format!(
                                "symbol {name} has arity {a}, used with {}",
                                args.len()
                            )))
                        }
                        None => {
                            return Err(Error::BadArgument(format!("undeclared symbol {name}")))
                        }
                    }
                }
            }
            if let (Term::Var(x), Term::Var(y)) = (lhs, rhs) {
                if x != y {
                    return Err(Error::BadArgument(
                        "an identity between two distinct bare variables collapses the domain"
                            .into(),
                    ));
                }
            }
        }
        Ok(IdentitySystem { symbols, identities })
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn identities(&self) -> &[(Term, Term)] {
        &self.identities
    }

    pub fn majority() -> Self {
        Self::new(
            [("f", 3)],
            [
                (Term::app("f", &["x", "x", "y"]), Term::var("x")),
                (Term::app("f", &["x", "y", "x"]), Term::var("x")),
                (Term::app("f", &["y", "x", "x"]), Term::var("x")),
            ],
        )
        .unwrap()
    }

    pub fn quasi_majority() -> Self {
        Self::new(
            [("f", 3)],
            [
                (Term::app("f", &["x", "x", "y"]), Term::app("f", &["x", "y", "x"])),
                (Term::app("f", &["x", "y", "x"]), Term::app("f", &["y", "x", "x"])),
                (Term::app("f", &["y", "x", "x"]), Term::app("f", &["x", "x", "x"])),
            ],
        )
        .unwrap()
    }

    pub fn maltsev() -> Self {
        Self::new(
            [("m", 3)],
            [
                (Term::app("m", &["y", "x", "x"]), Term::var("y")),
                (Term::app("m", &["x", "x", "y"]), Term::var("y")),
            ],
        )
        .unwrap()
    }

    pub fn minority() -> Self {
        Self::new(
            [("m", 3)],
            [
                (Term::app("m", &["y", "x", "x"]), Term::var("y")),
                (Term::app("m", &["x", "y", "x"]), Term::var("y")),
                (Term::app("m", &["x", "x", "y"]), Term::var("y")),
            ],
        )
        .unwrap()
    }

    /// Commutativity and idempotence; the first stage of the
    /// semilattice search (associativity is not height-one).
    pub fn commutative_idempotent() -> Self {
        Self::new(
            [("f", 2)],
            [
                (Term::app("f", &["x", "y"]), Term::app("f", &["y", "x"])),
                (Term::app("f", &["x", "x"]), Term::var("x")),
            ],
        )
        .unwrap()
    }

    /// Invariance under adjacent transpositions (generating the full
    /// symmetric group) plus a multiplicity-collapse identity; together
    /// they say the value depends only on the set of arguments.
    pub fn totally_symmetric(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadArgument("totally symmetric needs arity >= 2".into()));
        }
        let vars: Vec<String> = (0..k).map(|i| format!("z{i}")).collect();
        let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let mut identities = Vec::new();
        for i in 0..k - 1 {
            let mut swapped = refs.clone();
            swapped.swap(i, i + 1);
            identities.push((Term::app("f", &refs), Term::app("f", &swapped)));
        }
        if k >= 3 {
            // f(x,x,z,...) = f(x,z,z,...): one multiplicity unit moves
            // between arguments that are present, which with symmetry
            // connects all tuples sharing a set of values.
            let mut lhs = refs.clone();
            lhs[1] = lhs[0];
            let mut rhs = refs.clone();
            rhs[1] = rhs[2];
            identities.push((Term::app("f", &lhs), Term::app("f", &rhs)));
        }
        Self::new([("f", k)], identities)
    }

    /// One full rotation; its iterates generate the cyclic group.
    pub fn cyclic(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadArgument("cyclic needs arity >= 2".into()));
        }
        let vars: Vec<String> = (0..k).map(|i| format!("z{i}")).collect();
        let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let mut rotated = refs.clone();
        rotated.rotate_left(1);
        Self::new([("c", k)], [(Term::app("c", &refs), Term::app("c", &rotated))])
    }

    /// All near-constant evaluations agree.
    pub fn wnu(k: usize) -> Result<Self> {
        Self::wnu_named("w", k)
    }

    fn wnu_named(sym: &str, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadArgument("weak near unanimity needs arity >= 2".into()));
        }
        let pattern = |pos: usize| -> Term {
            let args: Vec<String> =
                (0..k).map(|i| if i == pos { "y".to_string() } else { "x".to_string() }).collect();
            Term::App(sym.to_string(), args)
        };
        let identities: Vec<(Term, Term)> =
            (0..k - 1).map(|i| (pattern(i), pattern(i + 1))).collect();
        Self::new([(sym, k)], identities)
    }

    /// All near-constant evaluations equal the repeated argument.
    pub fn near_unanimity(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::BadArgument("near unanimity needs arity >= 3".into()));
        }
        let base = Self::wnu_named("f", k)?;
        let mut identities = base.identities;
        let first: Vec<String> =
            (0..k).map(|i| if i == 0 { "y".to_string() } else { "x".to_string() }).collect();
        identities.push((Term::App("f".to_string(), first), Term::var("x")));
        Self::new([("f", k)], identities)
    }

    /// The 3-4 weak near unanimity pair with its linking identity.
    pub fn wnu_3_4() -> Self {
        let w3 = Self::wnu_named("f", 3).unwrap();
        let w4 = Self::wnu_named("g", 4).unwrap();
        let mut identities: Vec<(Term, Term)> = w3.identities;
        identities.extend(w4.identities);
        identities
            .push((Term::app("f", &["y", "x", "x"]), Term::app("g", &["y", "x", "x", "x"])));
        Self::new([("f", 3), ("g", 4)], identities).unwrap()
    }

    pub fn siggers4() -> Self {
        Self::new(
            [("s", 4)],
            [(Term::app("s", &["x", "x", "y", "z"]), Term::app("s", &["y", "z", "z", "x"]))],
        )
        .unwrap()
    }

    pub fn siggers6() -> Self {
        Self::new(
            [("s", 6)],
            [(
                Term::app("s", &["x", "y", "x", "z", "y", "z"]),
                Term::app("s", &["y", "x", "z", "x", "z", "y"]),
            )],
        )
        .unwrap()
    }

    pub fn pq() -> Self {
        Self::new(
            [("p", 3), ("q", 3)],
            [
                (Term::app("q", &["y", "x", "x"]), Term::app("q", &["x", "x", "y"])),
                (Term::app("q", &["x", "x", "y"]), Term::app("p", &["x", "y", "y"])),
                (Term::app("p", &["x", "y", "x"]), Term::app("q", &["x", "y", "x"])),
            ],
        )
        .unwrap()
    }
}

/// Evaluates every identity pointwise under the given symbol
/// assignment.
pub fn check_identities(assignment: &[(String, Operation)], sys: &IdentitySystem) -> Result<bool> {
    let lookup = |name: &str| -> Result<&Operation> {
        assignment
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, op)| op)
            .ok_or_else(|| Error::BadArgument(format!("no operation assigned to {name}")))
    };
    let domain = match assignment.first() {
        Some((_, op)) => op.domain(),
        None => return Ok(true),
    };
    for (name, arity) in &sys.symbols {
        let op = lookup(name)?;
        if op.arity() != *arity || op.domain() != domain {
            return Err(Error::BadArgument(format!("assignment for {name} has wrong shape")));
        }
    }
    for (lhs, rhs) in &sys.identities {
        let vars = identity_vars(lhs, rhs);
        let eval = |side: &Term, values: &[usize]| -> Result<usize> {
            let value_of = |x: &String| values[vars.iter().position(|v| v == x).unwrap()];
            match side {
                Term::Var(x) => Ok(value_of(x)),
                Term::App(name, args) => {
                    let op = lookup(name)?;
                    let inputs: Vec<usize> = args.iter().map(value_of).collect();
                    Ok(op.apply(&inputs))
                }
            }
        };
        let total = domain.pow(vars.len() as u32);
        for idx in 0..total {
            let values = power_coords(domain, vars.len(), idx);
            if eval(lhs, &values)? != eval(rhs, &values)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn identity_vars(lhs: &Term, rhs: &Term) -> Vec<String> {
    let mut vars: Vec<String> = Vec::new();
    for side in [lhs, rhs] {
        match side {
            Term::Var(x) => {
                if !vars.contains(x) {
                    vars.push(x.clone());
                }
            }
            Term::App(_, args) => {
                for a in args {
                    if !vars.contains(a) {
                        vars.push(a.clone());
                    }
                }
            }
        }
    }
    vars
}

// ---------------------------------------------------------------------------
// Indicator construction and search

struct Compiled {
    /// (block, point, block, point) pairs to merge.
    merges: Vec<(usize, usize, usize, usize)>,
    /// (block, point, value) pins from bare-variable sides and the
    /// idempotence flag.
    pins: Vec<(usize, usize, usize)>,
}

fn compile_identities(sys: &IdentitySystem, n: usize, idempotent: bool) -> Compiled {
    let block_of = |name: &str| sys.symbols.iter().position(|(s, _)| s == name).unwrap();
    let mut merges = Vec::new();
    let mut pins = Vec::new();
    for (lhs, rhs) in &sys.identities {
        let vars = identity_vars(lhs, rhs);
        let total = n.pow(vars.len() as u32);
        for idx in 0..total {
            let values = power_coords(n, vars.len(), idx);
            let value_of = |x: &String| values[vars.iter().position(|v| v == x).unwrap()];
            let point_of = |name: &String, args: &Vec<String>| -> (usize, usize) {
                let coords: Vec<usize> = args.iter().map(value_of).collect();
                (block_of(name), power_index(n, &coords))
            };
            match (lhs, rhs) {
                (Term::App(f, fa), Term::App(g, ga)) => {
                    let (bl, pl) = point_of(f, fa);
                    let (br, pr) = point_of(g, ga);
                    merges.push((bl, pl, br, pr));
                }
                (Term::App(f, fa), Term::Var(x)) | (Term::Var(x), Term::App(f, fa)) => {
                    let (b, p) = point_of(f, fa);
                    pins.push((b, p, value_of(x)));
                }
                (Term::Var(_), Term::Var(_)) => {}
            }
        }
    }
    if idempotent {
        for (block, (_, k)) in sys.symbols.iter().enumerate() {
            for x in 0..n {
                pins.push((block, power_index(n, &vec![x; *k]), x));
            }
        }
    }
    Compiled { merges, pins }
}

/// The materialised indicator instance: the disjoint union of one
/// power block per symbol with identity-merged variables, plus the
/// precolouring induced by bare-variable sides (and the diagonal,
/// under `idempotent`). A map of the precoloured instance into `b` is
/// exactly an assignment of polymorphisms satisfying the system. Also
/// returns the class of each power point, so solutions can be read
/// back as operation tables.
pub fn indicator_instance(
    b: &Structure,
    sys: &IdentitySystem,
    idempotent: bool,
    limits: &Limits,
) -> Result<(Structure, Vec<(usize, usize)>, Vec<usize>)> {
    let n = b.size();
    let mut offsets = Vec::new();
    let mut total_points = 0usize;
    let mut tuple_budget = 0u64;
    for (_, k) in &sys.symbols {
        let points = (n as u64)
            .checked_pow(*k as u32)
            .filter(|&p| p <= limits.power_points)
            .ok_or_else(|| Error::GuardExceeded("indicator instance too large".into()))?;
        for (_, _, tuples) in b.relations() {
            tuple_budget = (tuples.len() as u64)
                .checked_pow(*k as u32)
                .and_then(|c| tuple_budget.checked_add(c))
                .filter(|&c| c <= limits.tuples)
                .ok_or_else(|| {
                    Error::GuardExceeded("indicator relations too large to materialise".into())
                })?;
        }
        offsets.push(total_points);
        total_points += points as usize;
    }

    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut parent: Vec<usize> = (0..total_points).collect();
    let compiled = compile_identities(sys, n, idempotent);
    for &(bl, pl, br, pr) in &compiled.merges {
        let (a, b) = (find(&mut parent, offsets[bl] + pl), find(&mut parent, offsets[br] + pr));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
    }
    let mut class_of = vec![0usize; total_points];
    let mut class_count = 0usize;
    for p in 0..total_points {
        let root = find(&mut parent, p);
        if root == p {
            class_of[p] = class_count;
            class_count += 1;
        } else {
            class_of[p] = class_of[root];
        }
    }

    let mut instance = Structure::new(b.signature().clone(), class_count);
    for (block, (_, k)) in sys.symbols.iter().enumerate() {
        let powered = power(b, *k)?;
        for (name, _, tuples) in powered.relations() {
            for t in tuples {
                let image: Tuple = t.iter().map(|&p| class_of[offsets[block] + p]).collect();
                instance.insert_tuple(name, image)?;
            }
        }
    }
    let precolouring: Vec<(usize, usize)> = compiled
        .pins
        .iter()
        .map(|&(block, p, v)| (class_of[offsets[block] + p], v))
        .collect();
    Ok((instance, precolouring, class_of))
}

/// Searches for operations satisfying the identity system; complete up
/// to the configured guards, and every result is verified (identities
/// and preservation) before it is returned.
pub fn find_polymorphism(
    b: &Structure,
    sys: &IdentitySystem,
    idempotent: bool,
    limits: &Limits,
) -> Result<Option<Vec<(String, Operation)>>> {
    let n = b.size();
    if n == 0 {
        return Err(Error::InvalidStructure("empty domain".into()));
    }
    // Small systems are solved on the materialised indicator; the
    // implicit engine only takes over where materialisation is
    // infeasible. Both routes explore the same tree in the same
    // order, so the witness is identical either way.
    const EXPLICIT_SCOPES: u64 = 2_000_000;
    let explicit_cost: Option<u64> = sys
        .symbols
        .iter()
        .flat_map(|(_, k)| b.relations().map(move |(_, _, tuples)| (tuples.len() as u64, *k)))
        .map(|(t, k)| t.checked_pow(k as u32))
        .try_fold(0u64, |acc, c| c.and_then(|c| acc.checked_add(c)));
    if explicit_cost.is_some_and(|c| c <= EXPLICIT_SCOPES.min(limits.tuples)) {
        return find_polymorphism_explicit(b, sys, idempotent, limits);
    }
    let exponents: Vec<usize> = sys.symbols.iter().map(|(_, k)| *k).collect();
    let mut engine = PowerCsp::new(b, &exponents, limits)?;
    let compiled = compile_identities(sys, n, idempotent);
    for &(bl, pl, br, pr) in &compiled.merges {
        engine.merge(engine.block_offset(bl) + pl, engine.block_offset(br) + pr);
    }
    for &(bl, p, v) in &compiled.pins {
        engine.pin(engine.block_offset(bl) + p, v);
    }
    engine.seal();
    let mut budget = limits.engine_states as i64;
    let Some(values) = engine.solve(&mut budget)? else {
        return Ok(None);
    };
    let mut assignment = Vec::new();
    for (block, (name, k)) in sys.symbols.iter().enumerate() {
        let offset = engine.block_offset(block);
        let table: Vec<usize> = (0..engine.block_points(block))
            .map(|p| values[engine.class_of(offset + p)] as usize)
            .collect();
        assignment.push((name.clone(), Operation::new(*k, n, table)?));
    }
    for (name, op) in &assignment {
        if !is_polymorphism_with(op, b, limits)? {
            return Err(Error::BadArgument(format!("unverified search result for {name}")));
        }
    }
    if !check_identities(&assignment, sys)? {
        return Err(Error::BadArgument("search result fails its identities".into()));
    }
    Ok(Some(assignment))
}

fn find_polymorphism_explicit(
    b: &Structure,
    sys: &IdentitySystem,
    idempotent: bool,
    limits: &Limits,
) -> Result<Option<Vec<(String, Operation)>>> {
    let n = b.size();
    let (instance, precolouring, class_of) = indicator_instance(b, sys, idempotent, limits)?;
    let mut init = UnaryLists::full(instance.size(), n);
    for &(class, v) in &precolouring {
        init.restrict(class, [v]);
    }
    let Some(solution) = crate::homsearch::search_hom(&instance, b, &init)? else {
        return Ok(None);
    };
    let mut assignment = Vec::new();
    let mut offset = 0usize;
    for (name, k) in &sys.symbols {
        let points = n.pow(*k as u32);
        let table: Vec<usize> =
            (0..points).map(|p| solution.apply(class_of[offset + p])).collect();
        assignment.push((name.clone(), Operation::new(*k, n, table)?));
        offset += points;
    }
    for (name, op) in &assignment {
        if !is_polymorphism_with(op, b, limits)? {
            return Err(Error::BadArgument(format!("unverified search result for {name}")));
        }
    }
    if !check_identities(&assignment, sys)? {
        return Err(Error::BadArgument("search result fails its identities".into()));
    }
    Ok(Some(assignment))
}

/// The named polymorphism conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialKind {
    Majority,
    QuasiMajority,
    Maltsev,
    Minority,
    Semilattice,
    TotallySymmetric(usize),
    Cyclic(usize),
    NearUnanimity(usize),
    Wnu(usize),
    Wnu34,
    Siggers4,
    Siggers6,
    Pq,
}

/// Outcome of a named search. `Inconclusive` occurs only where the
/// design permits it: the semilattice search when its enumeration cap
/// is hit without an associative witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecialResult {
    Found(Vec<(String, Operation)>),
    Absent,
    Inconclusive,
}

impl SpecialResult {
    pub fn found(&self) -> Option<&[(String, Operation)]> {
        match self {
            SpecialResult::Found(ops) => Some(ops),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SpecialResult::Found(_))
    }
}

/// Searches for a polymorphism of one of the named kinds.
pub fn find_special(
    b: &Structure,
    kind: SpecialKind,
    idempotent: bool,
    limits: &Limits,
) -> Result<SpecialResult> {
    let sys = match kind {
        SpecialKind::Majority => IdentitySystem::majority(),
        SpecialKind::QuasiMajority => IdentitySystem::quasi_majority(),
        SpecialKind::Maltsev => IdentitySystem::maltsev(),
        SpecialKind::Minority => IdentitySystem::minority(),
        SpecialKind::Semilattice => return find_semilattice(b, limits),
        SpecialKind::TotallySymmetric(k) => IdentitySystem::totally_symmetric(k)?,
        SpecialKind::Cyclic(k) => IdentitySystem::cyclic(k)?,
        SpecialKind::NearUnanimity(k) => IdentitySystem::near_unanimity(k)?,
        SpecialKind::Wnu(k) => IdentitySystem::wnu(k)?,
        SpecialKind::Wnu34 => IdentitySystem::wnu_3_4(),
        SpecialKind::Siggers4 => IdentitySystem::siggers4(),
        SpecialKind::Siggers6 => IdentitySystem::siggers6(),
        SpecialKind::Pq => IdentitySystem::pq(),
    };
    Ok(match find_polymorphism(b, &sys, idempotent, limits)? {
        Some(ops) => SpecialResult::Found(ops),
        None => SpecialResult::Absent,
    })
}

/// Associativity is not height-one, so the semilattice search runs in
/// two stages: enumerate commutative idempotent binary polymorphisms
/// on the materialised indicator and test each for associativity.
fn find_semilattice(b: &Structure, limits: &Limits) -> Result<SpecialResult> {
    const ENUMERATION_CAP: usize = 20_000;
    let sys = IdentitySystem::commutative_idempotent();
    let (instance, precolouring, class_of) = indicator_instance(b, &sys, false, limits)?;
    let mut init = UnaryLists::full(instance.size(), b.size());
    for &(class, v) in &precolouring {
        init.restrict(class, [v]);
    }
    let (solutions, exhausted) = enumerate_homs(&instance, b, &init, ENUMERATION_CAP)?;
    let n = b.size();
    for m in &solutions {
        let table: Vec<usize> = (0..n * n).map(|p| m.apply(class_of[p])).collect();
        let op = Operation::new(2, n, table)?;
        let associative = (0..n).all(|x| {
            (0..n).all(|y| {
                (0..n)
                    .all(|z| op.apply(&[x, op.apply(&[y, z])]) == op.apply(&[op.apply(&[x, y]), z]))
            })
        });
        if associative {
            if !is_polymorphism_with(&op, b, limits)? {
                return Err(Error::BadArgument("unverified semilattice witness".into()));
            }
            return Ok(SpecialResult::Found(vec![("f".to_string(), op)]));
        }
    }
    if exhausted {
        Ok(SpecialResult::Absent)
    } else {
        Ok(SpecialResult::Inconclusive)
    }
}

// ---------------------------------------------------------------------------
// The polynomial-time majority test

/// Outcome of the path-consistency self-reduction for majority
/// polymorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MajorityTest {
    Yes(Operation),
    No,
}

/// Decides whether a digraph has a majority polymorphism by running
/// the precoloured path-consistency procedure on its cube and pinning
/// diagonal lists one vertex at a time; on success the witness is
/// reconstructed from the singleton lists and verified.
pub fn majority_test_pc(h: &Structure) -> Result<MajorityTest> {
    if !h.is_digraph() {
        return Err(Error::NotADigraph);
    }
    let n = h.size();
    let cube = power(h, 3)?;
    let mut lists = PairLists::initial(&cube, h)?;
    // Precolour (u,u,v), (u,v,u), (v,u,u) and (u,u,u) with u.
    for u in 0..n {
        for v in 0..n {
            lists.pin(power_index(n, &[u, u, v]), u);
            lists.pin(power_index(n, &[u, v, u]), u);
            lists.pin(power_index(n, &[v, u, u]), u);
        }
    }
    let Some(mut lists) = pc_fixpoint(lists) else {
        return Ok(MajorityTest::No);
    };
    for x in 0..cube.size() {
        let candidates: Vec<usize> = lists.pairs(x, x).map(|(u, _)| u).collect();
        if candidates.len() == 1 {
            continue;
        }
        let mut found = false;
        for u in candidates {
            let mut trial = lists.clone();
            trial.pin(x, u);
            if let Some(next) = crate::consistency::pc_fixpoint_from(trial, &[(x, x)]) {
                lists = next;
                found = true;
                break;
            }
        }
        if !found {
            return Ok(MajorityTest::No);
        }
    }
    let table: Vec<usize> = (0..cube.size())
        .map(|x| lists.pairs(x, x).next().expect("pinned to a singleton").0)
        .collect();
    let op = Operation::new(3, n, table)?;
    if !is_polymorphism(&op, h)?
        || !check_identities(&[("f".to_string(), op.clone())], &IdentitySystem::majority())?
    {
        return Ok(MajorityTest::No);
    }
    Ok(MajorityTest::Yes(op))
}

// ---------------------------------------------------------------------------

/// All operation tables of the given arity over a domain; only
/// feasible for tiny domains, used by exhaustiveness cross-checks.
pub fn all_operations(arity: usize, domain: usize, limits: &Limits) -> Result<Vec<Operation>> {
    let cells = domain.pow(arity as u32);
    let count = (domain as u64).checked_pow(cells as u32);
    if count.is_none_or(|c| c > limits.brute_force) {
        return Err(Error::GuardExceeded("operation space too large".into()));
    }
    let mut out = Vec::new();
    let mut table = vec![0usize; cells];
    loop {
        out.push(Operation::new(arity, domain, table.clone())?);
        let mut i = cells;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            table[i] += 1;
            if table[i] < domain {
                break;
            }
            table[i] = 0;
        }
    }
}
