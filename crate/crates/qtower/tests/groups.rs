use proptest::prelude::*;
use qtower::group2::*;

fn orders(g: &TableGroup) -> Vec<usize> {
    g.lower_central_series().iter().map(|s| s.order()).collect()
}

fn cyclic_maximals(g: &TableGroup) -> usize {
    g.maximal_subgroups()
        .iter()
        .filter(|m| m.elements().iter().any(|&x| g.element_order(x) == m.order()))
        .count()
}

#[test]
fn small_group_invariants() {
    let q8 = quaternion();
    assert_eq!(q8.order(), 8);
    assert_eq!(cyclic_maximals(&q8), 3);
    assert_eq!(q8.center().order(), 2);
    let d4 = dihedral(8);
    assert_eq!(cyclic_maximals(&d4), 1);
    assert_eq!(d4.derived_subgroup().order(), 2);
    assert_eq!(orders(&dihedral(16)), vec![16, 4, 2, 1]);
    assert_eq!(orders(&semidihedral(16)), vec![16, 4, 2, 1]);
    assert_eq!(generalized_quaternion(16).center().order(), 2);
    assert_eq!(elementary_abelian(3).frattini().order(), 1);
    assert_eq!(abelian(&[2, 4]).frattini_rank(), 2);
    assert_eq!(g_invariants(&abelian(&[4, 2, 8])), vec![2, 4, 8]);
}

fn g_invariants(g: &TableGroup) -> Vec<u64> {
    let mut v = g.abelian_quotient_invariants(&g.whole(), &g.trivial());
    v.sort_unstable();
    v
}

#[test]
fn model_of_64_150() {
    let e = build_64_150();
    e.check_cocycle().unwrap();
    let g = e.to_table_group();
    assert_eq!(g.order(), 64);
    assert!(g.is_two_group());
    let dg = g.derived_subgroup();
    assert_eq!(dg.order(), 8);
    assert_eq!(g.abelian_quotient_invariants(&dg, &g.trivial()), vec![2, 2, 2]);
    assert_eq!(g_invariants(&g.quotient(&dg).unwrap()), vec![2, 2, 2]);
    assert_eq!(orders(&g), vec![64, 8, 1]);
    assert_eq!(g.frattini_rank(), 3);

    let p11 = check_prop11(&g).unwrap();
    assert!(p11.applicable && p11.holds(), "{p11:?}");
    assert!(p11.steps.iter().all(|s| s.equal));
    let p12 = check_prop12(&g).unwrap();
    assert!(p12.holds() && p12.metabelian);
    assert!(check_prop10(&g).holds());
    assert!(find_64_150_triple(&g).unwrap().is_some());
}

#[test]
fn class_three_covers_satisfy_the_series_checks() {
    for (extra, lcs, derived) in [(1, vec![128, 16, 2, 1], vec![2, 2, 4]), (2, vec![256, 32, 4, 1], vec![2, 4, 4])] {
        let g = class3_cover_64_150(extra).unwrap();
        assert_eq!(orders(&g), lcs);
        let p11 = check_prop11(&g).unwrap();
        assert!(p11.holds(), "{p11:?}");
        let mut inv = p11.derived_invariants.clone();
        inv.sort_unstable();
        assert_eq!(inv, derived);
        assert!(check_prop12(&g).unwrap().holds());
        assert!(check_commutator_filtration(&g));
    }
}

#[test]
fn triple_check_over_library() {
    let lib = rank3_library();
    assert!(lib.len() >= 10);
    for (name, g) in &lib {
        assert!(g.order() <= 64, "{name}");
        let r = check_prop10(g);
        assert!(r.applicable, "{name}");
        assert!(r.holds(), "{name}: {r:?}");
        if !g.is_abelian() {
            assert_eq!(r.qualifying_triples, 0, "{name}");
        }
    }
    assert_eq!(central_quotients(&build_64_150().to_table_group()).unwrap().len(), 15);
}

#[test]
fn not_applicable_outside_rank_three() {
    let d4 = dihedral(8);
    assert!(!check_prop11(&d4).unwrap().applicable);
    assert!(!check_prop10(&d4).applicable);
    assert_eq!(find_64_150_triple(&d4).unwrap(), None);
}

#[test]
fn table_text_round_trip() {
    let g = build_64_150().to_table_group();
    let h = TableGroup::from_table_text(&g.to_table_text()).unwrap();
    assert_eq!(h.order(), 64);
    assert_eq!(h.to_table_text(), g.to_table_text());
    assert!(TableGroup::from_table_text("3\n0 1 2\n1 2 0\n2 0 0\n").is_err());
}

fn small_group() -> impl Strategy<Value = TableGroup> {
    prop_oneof![
        (1usize..5).prop_map(|k| cyclic(1 << k)),
        (2usize..6).prop_map(|k| dihedral(1 << k)),
        (3usize..6).prop_map(|k| generalized_quaternion(1 << k)),
        (4usize..6).prop_map(|k| semidihedral(1 << k)),
        (1usize..4).prop_map(elementary_abelian),
        Just(direct_product(&quaternion(), &cyclic(2))),
        Just(direct_product(&dihedral(8), &cyclic(4))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_axioms_and_series(g in small_group(), a in 0usize..64, b in 0usize..64) {
        let n = g.order();
        let (a, b) = (a % n, b % n);
        prop_assert_eq!(g.mul(a, g.inv(a)), 0);
        prop_assert_eq!(g.inv(g.mul(a, b)), g.mul(g.inv(b), g.inv(a)));
        prop_assert_eq!(n % g.element_order(a), 0);
        let lcs = g.lower_central_series();
        for w in lcs.windows(2) {
            prop_assert!(w[1].is_subset(&w[0]));
            prop_assert!(g.is_normal(&w[1]));
        }
        prop_assert!(g.derived_subgroup().is_subset(&g.frattini()));
        prop_assert_eq!(n / g.frattini().order(), 1 << g.frattini_rank());
        prop_assert!(g.center().contains(0));
    }

    #[test]
    fn direct_products_multiply_orders(g in small_group(), h in small_group()) {
        prop_assume!(g.order() * h.order() <= 128);
        let p = direct_product(&g, &h);
        prop_assert_eq!(p.order(), g.order() * h.order());
        prop_assert_eq!(p.derived_subgroup().order(), g.derived_subgroup().order() * h.derived_subgroup().order());
    }
}
