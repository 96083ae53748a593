//! Cross-module property tests: every pruned or clever algorithm is
//! held against an independent oracle (brute force, exhaustive
//! enumeration, Gaussian elimination), and the structural invariants
//! that connect the modules are exercised on deterministic random
//! corpora.

mod common;

use std::collections::BTreeMap;

use common::*;
use homlab_core::consistency::{ac, k_consistency, pc, sac, Consistency, UnaryLists};
use homlab_core::homsearch::{brute_force_hom, construct_solution, hom_exists, search_hom};
use homlab_core::maltsev::{self, compact_representation, MaltsevOutcome};
use homlab_core::polymorphism::{
    self, check_identities, find_special, is_polymorphism, majority_test_pc, IdentitySystem,
    MajorityTest, Operation, SpecialKind,
};
use homlab_core::powerset::ac_solvability;
use homlab_core::pplogic::{self, closure, pp_closure, Relation};
use homlab_core::relstruct::{
    self, complete, cycle, digraph, directed_cycle, disjoint_union, transitive_tournament,
};
use homlab_core::{Limits, Structure};
use rand::Rng;

fn limits() -> Limits {
    Limits::default()
}

fn full(i: &Structure, t: &Structure) -> UnaryLists {
    UnaryLists::full(i.size(), t.size())
}

#[test]
fn search_agrees_with_brute_force_on_random_pairs() {
    let mut rng = seeded(0x5EA12C4);
    for round in 0..200 {
        let n = rng.gen_range(1..=4);
        let t = random_digraph(&mut rng, n, 40, true);
        let n = rng.gen_range(1..=8);
        let g = random_digraph(&mut rng, n, 35, false);
        let init = full(&g, &t);
        let fast = search_hom(&g, &t, &init).unwrap();
        let slow = brute_force_hom(&g, &t, &init, &limits()).unwrap();
        assert_eq!(fast.is_some(), slow.is_some(), "round {round}");
        if let Some(m) = fast {
            assert!(m.is_homomorphism(&g, &t));
        }
    }
}

#[test]
fn product_is_the_meet_and_union_the_join() {
    let mut rng = seeded(0x4EE7);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let a = random_digraph(&mut rng, n, 50, true);
        let n = rng.gen_range(1..=3);
        let b = random_digraph(&mut rng, n, 50, true);
        let n = rng.gen_range(1..=4);
        let g = random_digraph(&mut rng, n, 40, false);
        let prod = relstruct::direct_product(&a, &b).unwrap();
        if prod.size() == 0 {
            continue;
        }
        let to_prod = hom_exists(&g, &prod).unwrap();
        let to_both = hom_exists(&g, &a).unwrap() && hom_exists(&g, &b).unwrap();
        assert_eq!(to_prod, to_both);

        let union = disjoint_union(&a, &b).unwrap();
        let to_union = hom_exists(&g, &union).unwrap();
        let to_either = hom_exists(&g, &a).unwrap() || hom_exists(&g, &b).unwrap();
        // One direction always; the converse for connected instances.
        assert!(!to_either || to_union);
        if relstruct::weakly_connected_components(&g).unwrap().len() == 1 {
            assert_eq!(to_union, to_either);
        }
    }
}

#[test]
fn core_has_no_more_orbits() {
    for a in [cycle(6), complete(3), disjoint_union(&complete(2), &cycle(4)).unwrap()] {
        let (c, _) = relstruct::core(&a, &limits()).unwrap();
        for k in 1..=2usize {
            let orbits_a = relstruct::orbits(&a, k, &limits()).unwrap().len();
            let orbits_c = relstruct::orbits(&c, k, &limits()).unwrap().len();
            assert!(orbits_c <= orbits_a);
        }
    }
}

#[test]
fn power_projections_are_homomorphisms() {
    let a = directed_cycle(3);
    let p = relstruct::power(&a, 2).unwrap();
    for coord in 0..2usize {
        let table: Vec<usize> = (0..p.size())
            .map(|i| relstruct::power_coords(a.size(), 2, i)[coord])
            .collect();
        let m = relstruct::Mapping::new(table, a.size()).unwrap();
        assert!(m.is_homomorphism(&p, &a));
    }
    assert_eq!(p.size(), a.size() * a.size());
}

#[test]
fn two_consistency_matches_ac_and_three_matches_pc() {
    // Corpus of orientations of simple graphs: no loops, at most one
    // arc per unordered pair.
    let mut rng = seeded(0xD15C);
    for round in 0..50 {
        let nt = rng.gen_range(2..=4);
        let template = {
            let mut arcs = Vec::new();
            for u in 0..nt {
                for v in 0..nt {
                    if u < v && rng.gen_range(0..100) < 50 {
                        if rng.gen_bool(0.5) {
                            arcs.push((u, v));
                        } else {
                            arcs.push((v, u));
                        }
                    }
                }
            }
            digraph(nt, arcs)
        };
        let ni = rng.gen_range(2..=5);
        let instance = {
            let mut arcs = Vec::new();
            for u in 0..ni {
                for v in u + 1..ni {
                    if rng.gen_range(0..100) < 45 {
                        if rng.gen_bool(0.5) {
                            arcs.push((u, v));
                        } else {
                            arcs.push((v, u));
                        }
                    }
                }
            }
            digraph(ni, arcs)
        };
        let ac_verdict = ac(&instance, &template, &full(&instance, &template)).unwrap().is_some();
        let k2 = k_consistency(&instance, &template, 2).unwrap() == Consistency::Accept;
        assert_eq!(ac_verdict, k2, "round {round}");

        let pc_verdict = pc(&instance, &template).unwrap().is_some();
        let k3 = k_consistency(&instance, &template, 3).unwrap() == Consistency::Accept;
        assert_eq!(pc_verdict, k3, "round {round}");
    }
}

#[test]
fn three_consistency_misses_a_parity_contradiction() {
    // The vertex/edge incidence system of K_{3,3} over GF(3) with
    // constants summing to a nonzero value on one side: brute force
    // refutes it, 3-consistency accepts it.
    let t = zp_sum_template(3);
    let mut inst = Structure::new(t.signature().clone(), 9);
    for i in 0..3usize {
        inst.insert_tuple("R0", vec![3 * i, 3 * i + 1, 3 * i + 2]).unwrap();
    }
    inst.insert_tuple("R0", vec![0, 3, 6]).unwrap();
    inst.insert_tuple("R0", vec![1, 4, 7]).unwrap();
    inst.insert_tuple("R1", vec![2, 5, 8]).unwrap();

    let bf = brute_force_hom(&inst, &t, &full(&inst, &t), &limits()).unwrap();
    assert!(bf.is_none(), "the instance is unsatisfiable");
    assert_eq!(k_consistency(&inst, &t, 3).unwrap(), Consistency::Accept);
}

#[test]
fn pc_decides_majority_templates() {
    // Templates with verified majority polymorphisms: PC's verdict
    // equals brute-force existence.
    let mut rng = seeded(0xBADA);
    for template in [transitive_tournament(3), directed_cycle(3), directed_cycle(5)] {
        let found = find_special(&template, SpecialKind::Majority, false, &limits()).unwrap();
        let ops = found.found().expect("majority exists");
        assert!(is_polymorphism(&ops[0].1, &template).unwrap());
        for _ in 0..30 {
            let n = rng.gen_range(1..=6);
        let g = random_digraph(&mut rng, n, 40, false);
            let pc_accepts = pc(&g, &template).unwrap().is_some();
            let hom = brute_force_hom(&g, &template, &full(&g, &template), &limits())
                .unwrap()
                .is_some();
            assert_eq!(pc_accepts, hom);
        }
    }
}

#[test]
fn pc_lists_are_preserved_by_polymorphisms() {
    // Lemma pres: the final PC lists are closed under every template
    // polymorphism, applied componentwise to pairs.
    let template = transitive_tournament(3);
    let median = Operation::from_fn(3, 3, |a| {
        let mut s = [a[0], a[1], a[2]];
        s.sort_unstable();
        s[1]
    })
    .unwrap();
    assert!(is_polymorphism(&median, &template).unwrap());
    let mut rng = seeded(0x9E5);
    for _ in 0..20 {
        let g = random_digraph(&mut rng, 4, 40, false);
        let Some(lists) = pc(&g, &template).unwrap() else {
            continue;
        };
        for x in 0..g.size() {
            for z in 0..g.size() {
                let pairs: Vec<(usize, usize)> = lists.pairs(x, z).collect();
                for &(u1, w1) in &pairs {
                    for &(u2, w2) in &pairs {
                        for &(u3, w3) in &pairs {
                            let u = median.apply(&[u1, u2, u3]);
                            let w = median.apply(&[w1, w2, w3]);
                            assert!(lists.contains(x, z, u, w));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn sac_is_sound_and_between_ac_and_k_consistency() {
    let mut rng = seeded(0x5AC);
    for _ in 0..40 {
        let n = rng.gen_range(2..=3);
        let template = random_digraph(&mut rng, n, 55, true);
        let n = rng.gen_range(2..=5);
        let g = random_digraph(&mut rng, n, 40, false);
        let init = full(&g, &template);
        let sac_out = sac(&g, &template, &init).unwrap();
        let hom = brute_force_hom(&g, &template, &init, &limits()).unwrap();
        if let Some(h) = &hom {
            // Soundness: the surviving lists contain every solution.
            let lists = sac_out.as_ref().expect("sac cannot reject a satisfiable instance");
            for x in 0..g.size() {
                assert!(lists.get(x).contains(h.apply(x)));
            }
        }
        if sac_out.is_none() {
            // A SAC refutation is simulated by (2, k)-consistency.
            assert_eq!(k_consistency(&g, &template, 3).unwrap(), Consistency::Reject);
        }
        // Monotone and idempotent.
        if let Some(lists) = &sac_out {
            assert!(lists.is_within(&init));
            assert_eq!(sac(&g, &template, lists).unwrap().as_ref(), Some(lists));
        }
    }
}

#[test]
fn construct_solution_counts_calls() {
    let c5 = cycle(5);
    let k3 = complete(3);
    let mut calls = 0usize;
    let m = construct_solution(&c5, &k3, &limits(), &mut |lists| {
        calls += 1;
        Ok(search_hom(&c5, &k3, lists)?.is_some())
    })
    .unwrap()
    .unwrap();
    assert!(m.is_homomorphism(&c5, &k3));
    assert!(calls <= 1 + c5.size() * k3.size());
}

#[test]
fn low_arity_closure_equals_pp_closure_on_small_relations() {
    // For relations with at most 3 tuples the pp-closure is generated
    // in arity <= 3, so closing under all polymorphisms of arity <= 3
    // is exact.
    let mut rng = seeded(0xC105);
    for template in [transitive_tournament(2), directed_cycle(3)] {
        // All polymorphisms of arity <= 3, by exhaustive solution
        // enumeration over the explicit powers.
        let mut pols: Vec<Operation> = Vec::new();
        for arity in 1..=3usize {
            let powered = if arity == 1 {
                template.clone()
            } else {
                relstruct::power(&template, arity).unwrap()
            };
            let (homs, exhausted) = homlab_core::homsearch::enumerate_homs(
                &powered,
                &template,
                &full(&powered, &template),
                100_000,
            )
            .unwrap();
            assert!(exhausted);
            for h in homs {
                pols.push(Operation::new(arity, template.size(), h.table().to_vec()).unwrap());
            }
        }
        for _ in 0..25 {
            let arity = rng.gen_range(1..=2);
            let count = rng.gen_range(1..=3);
            let tuples: Vec<Vec<usize>> = (0..count)
                .map(|_| (0..arity).map(|_| rng.gen_range(0..template.size())).collect())
                .collect();
            let r = Relation::from_tuples(arity, template.size(), tuples).unwrap();
            let by_ops = closure(&r, &pols).unwrap();
            let by_pp = pp_closure(&r, &template, &limits()).unwrap();
            assert_eq!(by_ops, by_pp);
        }
    }
}

#[test]
fn binary_encoding_equisatisfiable_on_corpus() {
    let mut rng = seeded(0xB1A);
    let template = pss_template();
    let enc = pplogic::binary_encoding(&template, 3, &limits()).unwrap();
    for _ in 0..12 {
        let instance = { let v = rng.gen_range(1..=3); let c = rng.gen_range(1..=3); random_instance(&mut rng, &template, v, c) };
        let (translated, _) = enc.translate_instance(&instance).unwrap();
        let direct =
            brute_force_hom(&instance, &template, &full(&instance, &template), &limits())
                .unwrap()
                .is_some();
        let encoded = hom_exists(&translated, enc.encoded()).unwrap();
        assert_eq!(direct, encoded);
    }
}

#[test]
fn semilattice_implies_ac_solvable() {
    for h in all_digraphs_up_to_iso(2, true).into_iter().chain([
        transitive_tournament(3),
        directed_cycle(3),
    ]) {
        if h.size() == 0 {
            continue;
        }
        let semilattice = find_special(&h, SpecialKind::Semilattice, false, &limits()).unwrap();
        if semilattice.is_found() {
            assert!(
                ac_solvability(&h, &limits()).unwrap().holds(),
                "semilattice polymorphism without tree duality on {h:?}"
            );
        }
    }
}

#[test]
fn siggers4_implies_siggers6_and_prime_cyclic() {
    for h in all_digraphs_up_to_iso(3, true) {
        if h.size() == 0 {
            continue;
        }
        let s4 = find_special(&h, SpecialKind::Siggers4, false, &limits()).unwrap();
        if s4.is_found() {
            let s6 = find_special(&h, SpecialKind::Siggers6, false, &limits()).unwrap();
            assert!(s6.is_found(), "Siggers-4 without Siggers-6 on {h:?}");
            // The first prime above the domain size carries a cyclic
            // polymorphism.
            let p = 5; // domain <= 3
            let cyc = find_special(&h, SpecialKind::Cyclic(p), false, &limits()).unwrap();
            assert!(cyc.is_found(), "Siggers-4 without {p}-ary cyclic on {h:?}");
        }
    }
}

#[test]
fn cyclic_composition_stays_cyclic() {
    // Composing a found cyclic operation with a polymorphism whose
    // arity divides it, rotation by rotation, stays cyclic.
    let c3 = directed_cycle(3);
    let cyclic4 = find_special(&c3, SpecialKind::Cyclic(4), false, &limits())
        .unwrap()
        .found()
        .expect("4-ary cyclic exists on the directed triangle")[0]
        .1
        .clone();
    let cyclic2 = find_special(&c3, SpecialKind::Cyclic(2), false, &limits())
        .unwrap()
        .found()
        .expect("binary cyclic exists")[0]
        .1
        .clone();
    // s = cyclic4 (k = 4), t = cyclic2 (l = 2 divides 4): the cyclic
    // composition has arity l and feeds s the rotations of t.
    let composed = Operation::from_fn(2, 3, |args| {
        let rot = |i: usize| {
            let rotated: Vec<usize> = (0..2).map(|j| args[(j + i) % 2]).collect();
            cyclic2.apply(&rotated)
        };
        cyclic4.apply(&[rot(0), rot(1), rot(0), rot(1)])
    })
    .unwrap();
    assert!(check_identities(
        &[("c".to_string(), composed.clone())],
        &IdentitySystem::cyclic(2).unwrap()
    )
    .unwrap());
    assert!(is_polymorphism(&composed, &c3).unwrap());
}

#[test]
fn majority_test_agrees_with_indicator_search() {
    for h in all_digraphs_up_to_iso(3, true) {
        if h.size() == 0 {
            continue;
        }
        let by_pc = matches!(majority_test_pc(&h).unwrap(), MajorityTest::Yes(_));
        let by_search = find_special(&h, SpecialKind::Majority, false, &limits())
            .unwrap()
            .is_found();
        assert_eq!(by_pc, by_search, "on {h:?}");
    }
}

#[test]
fn maltsev_solver_agrees_with_brute_force_on_gf3() {
    let template = zp_sum_template(3);
    let m = Operation::from_fn(3, 3, |a| (a[0] + 3 + a[2] - a[1]) % 3).unwrap();
    let mut rng = seeded(0x6F3);
    for _ in 0..25 {
        let instance =
            { let v = rng.gen_range(2..=6); let c = rng.gen_range(1..=5); random_instance(&mut rng, &template, v, c) };
        let solved = maltsev::solve(&instance, &template, &m, &limits()).unwrap();
        let brute = brute_force_hom(&instance, &template, &full(&instance, &template), &limits())
            .unwrap();
        assert_eq!(solved.witness().is_some(), brute.is_some());
        if let MaltsevOutcome::Sat(w) = &solved {
            assert!(w.is_homomorphism(&instance, &template));
        }
    }
}

#[test]
fn compact_representation_law_small() {
    let m = Operation::from_fn(3, 2, |a| a[0] ^ a[1] ^ a[2]).unwrap();
    let mut rng = seeded(0xC0);
    for _ in 0..30 {
        let arity = rng.gen_range(1..=3);
        let seeds: Vec<Vec<usize>> = (0..rng.gen_range(1..=3))
            .map(|_| (0..arity).map(|_| rng.gen_range(0..2)).collect())
            .collect();
        let seeded_rep =
            maltsev::CompactRep::new(arity, 2, seeds.into_iter().collect()).unwrap();
        let r = maltsev::closure_under_maltsev(&seeded_rep, &m).unwrap();
        let rep = compact_representation(&r);
        let back = maltsev::closure_under_maltsev(&rep, &m).unwrap();
        assert_eq!(back.tuples(), r.tuples());
        assert!(rep.tuples().len() <= 2 * maltsev::forks(&r).len());
    }
}

#[test]
fn pss_two_semilattice_identity_holds() {
    // The pss operation is an idempotent commutative polymorphism of
    // the pss template satisfying restricted associativity.
    let table = |x: usize, y: usize| -> usize {
        match (x, y) {
            (0, 1) | (1, 0) => 1,
            (1, 2) | (2, 1) => 2,
            (2, 0) | (0, 2) => 0,
            (a, _) => a,
        }
    };
    let op = Operation::from_fn(2, 3, |a| table(a[0], a[1])).unwrap();
    assert!(is_polymorphism(&op, &pss_template()).unwrap());
    assert!(op.is_idempotent());
    for x in 0..3 {
        for y in 0..3 {
            assert_eq!(
                op.apply(&[x, op.apply(&[x, y])]),
                op.apply(&[op.apply(&[x, x]), y]),
                "restricted associativity"
            );
            assert_eq!(op.apply(&[x, y]), op.apply(&[y, x]));
        }
    }
}

#[test]
fn evaluate_matches_canonical_query_semantics() {
    // B satisfies CQ(A) iff A maps into B, over a random corpus.
    let mut rng = seeded(0xC0DE);
    for _ in 0..30 {
        let n = rng.gen_range(1..=4);
        let a = random_digraph(&mut rng, n, 40, false);
        let n = rng.gen_range(1..=3);
        let b = random_digraph(&mut rng, n, 50, true);
        let cq = pplogic::canonical_query(&a);
        let truth = pplogic::evaluate(&cq, &b, &BTreeMap::new()).unwrap();
        assert_eq!(truth, hom_exists(&a, &b).unwrap());
    }
}
