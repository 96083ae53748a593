//! Shared fixtures and oracles for the integration and acceptance
//! suites: named templates, deterministic random corpora, and an
//! independent Gaussian-elimination oracle for affine instances.

#![allow(dead_code)]

use homlab_core::relstruct::{digraph, Signature, Structure};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// The mod-p linear template (Z_p; R0, ..., R_{p-1}) with
/// R_c = { (x,y,z) : x + y + z = c }.
pub fn zp_sum_template(p: usize) -> Structure {
    let sig = Signature::new((0..p).map(|c| (format!("R{c}"), 3)));
    let mut s = Structure::new(sig, p);
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                s.insert_tuple(&format!("R{}", (x + y + z) % p), vec![x, y, z]).unwrap();
            }
        }
    }
    s
}

/// The paper-scissors-stone template ({0,1,2}; C3, Req) where C3 is
/// the graph of x -> x+1 mod 3 and Req(x,y,z) holds for x in {0,1}
/// with x = 0 forcing y = z.
pub fn pss_template() -> Structure {
    let sig = Signature::new([("C3", 2), ("Req", 3)]);
    let mut s = Structure::new(sig, 3);
    for a in 0..3usize {
        s.insert_tuple("C3", vec![a, (a + 1) % 3]).unwrap();
    }
    for y in 0..3usize {
        for z in 0..3usize {
            s.insert_tuple("Req", vec![1, y, z]).unwrap();
            if y == z {
                s.insert_tuple("Req", vec![0, y, z]).unwrap();
            }
        }
    }
    s
}

/// The graph of m(x,y,z) = x - y + z mod n as a 4-ary relation,
/// expanded with all singletons.
pub fn graph_of_affine_maltsev(n: usize) -> Structure {
    let mut symbols = vec![("G".to_string(), 4usize)];
    symbols.extend((0..n).map(|a| (format!("S{a}"), 1)));
    let mut s = Structure::new(Signature::new(symbols), n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                s.insert_tuple("G", vec![x, y, z, (x + n + z - y) % n]).unwrap();
            }
        }
    }
    for a in 0..n {
        s.insert_tuple(&format!("S{a}"), vec![a]).unwrap();
    }
    s
}

/// Satisfiability of a linear system over GF(p) by Gaussian
/// elimination; rows are (coefficients, constant).
pub fn gaussian_solvable(p: u64, rows: &[(Vec<u64>, u64)], vars: usize) -> bool {
    let inv = |a: u64| -> u64 {
        // p is prime and a != 0.
        let mut result = 1u64;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        result
    };
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|(coeffs, c)| {
            let mut r: Vec<u64> = coeffs.iter().map(|&a| a % p).collect();
            r.resize(vars, 0);
            r.push(c % p);
            r
        })
        .collect();
    let mut rank = 0usize;
    for col in 0..vars {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let scale = inv(m[rank][col]);
        for v in m[rank].iter_mut() {
            *v = *v * scale % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..=vars {
                    m[r][c] = (m[r][c] + (p - factor) * m[rank][c]) % p;
                }
            }
        }
        rank += 1;
    }
    m.iter().all(|row| row[..vars].iter().any(|&a| a != 0) || row[vars] == 0)
}

/// A deterministic random digraph with the given vertex count;
/// `density` out of 100.
pub fn random_digraph(rng: &mut StdRng, n: usize, density: u32, loops: bool) -> Structure {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if (u != v || loops) && rng.gen_range(0..100) < density {
                arcs.push((u, v));
            }
        }
    }
    digraph(n, arcs)
}

/// A deterministic random instance over the template's signature with
/// the given variable and constraint counts; scopes are uniform.
pub fn random_instance(
    rng: &mut StdRng,
    template: &Structure,
    vars: usize,
    constraints: usize,
) -> Structure {
    let symbols: Vec<(String, usize)> =
        template.signature().symbols().iter().cloned().collect();
    let mut s = Structure::new(template.signature().clone(), vars);
    for _ in 0..constraints {
        let (name, arity) = &symbols[rng.gen_range(0..symbols.len())];
        let scope: Vec<usize> = (0..*arity).map(|_| rng.gen_range(0..vars)).collect();
        s.insert_tuple(name, scope).unwrap();
    }
    s
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Canonical form of a digraph on up to `n <= 8` vertices under
/// vertex permutations, as the minimal arc code.
pub fn canonical_digraph_code(g: &Structure) -> u64 {
    let n = g.size();
    assert!(n <= 8);
    let arcs = g.arcs().unwrap();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    loop {
        let mut code = 0u64;
        for &(u, v) in &arcs {
            code |= 1 << (perm[u] * n + perm[v]);
        }
        best = best.min(code);
        // Next permutation in lexicographic order.
        let mut i = n.saturating_sub(1);
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    best
}

/// All digraphs on exactly `n` vertices (arc codes), deduplicated up
/// to isomorphism.
pub fn all_digraphs_up_to_iso(n: usize, loops: bool) -> Vec<Structure> {
    use std::collections::BTreeSet;
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| loops || u != v)
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for code in 0..1u64 << cells.len() {
        let arcs: Vec<(usize, usize)> = cells
            .iter()
            .enumerate()
            .filter(|(i, _)| code >> i & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        let g = digraph(n, arcs);
        if seen.insert(canonical_digraph_code(&g)) {
            out.push(g);
        }
    }
    out
}

/// All undirected loopless graphs on exactly `n` vertices up to
/// isomorphism.
pub fn all_graphs_up_to_iso(n: usize) -> Vec<Structure> {
    use std::collections::BTreeSet;
    let cells: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for code in 0..1u64 << cells.len() {
        let edges: Vec<(usize, usize)> = cells
            .iter()
            .enumerate()
            .filter(|(i, _)| code >> i & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        let g = homlab_core::relstruct::graph(n, edges);
        if seen.insert(canonical_digraph_code(&g)) {
            out.push(g);
        }
    }
    out
}
