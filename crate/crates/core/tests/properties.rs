use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use leveltree::blowup::{bundle_identity, is_stable, psi2_chart_check, yk_pullback};
use leveltree::chart::{ChartFrame, TwistedChart};
use leveltree::contraction::{contract, transport_subset, verify_equivalence_compat, verify_nested};
use leveltree::io::{read_level_tree, TreeFile};
use leveltree::level::{ascent_sequence, canonical_form, default_special, equiv_key, is_equivalent, Level, LevelTree};
use leveltree::monomial::{compose, equal_on_stratum, Monomial, MonomialMap, Stratum, Symbol};
use leveltree::suite::relevelings;
use leveltree::tree::Order;

const NAMES: [&str; 8] = ["o", "a", "b", "c", "d", "e", "f", "g"];

/// Random level tree on `2..=max` vertices: parent of vertex `k` is some
/// earlier vertex, levels drop by a random positive rational along each edge.
fn level_tree(max: usize) -> impl Strategy<Value = LevelTree> {
    (2..=max)
        .prop_flat_map(|n| {
            (
                (1..n).map(|k| 0..k).collect::<Vec<_>>(),
                prop::collection::vec(0u32..=2, n),
                prop::collection::vec((1i64..=4, 1i64..=2), n - 1),
            )
        })
        .prop_map(|(parents, mut weights, drops)| {
            let n = weights.len();
            if weights.iter().all(|w| *w == 0) {
                weights[n - 1] = 1;
            }
            let mut level = vec![Level::from_integer(0); n];
            for k in 1..n {
                level[k] = level[parents[k - 1]] - Level::new(drops[k - 1].0, drops[k - 1].1);
            }
            let parent_map: BTreeMap<String, String> = (1..n).map(|k| (NAMES[k].to_string(), NAMES[parents[k - 1]].to_string())).collect();
            let weight_map: BTreeMap<String, u32> = (0..n).map(|k| (NAMES[k].to_string(), weights[k])).collect();
            let level_map: BTreeMap<String, Level> = (1..n).map(|k| (NAMES[k].to_string(), level[k])).collect();
            LevelTree::from_maps("o", &parent_map, &weight_map, &level_map).expect("strictly decreasing levels")
        })
}

fn symbol(k: usize) -> Symbol {
    Symbol::u(["p", "q", "r"][k])
}

fn monomial_in(exponents: std::ops::RangeInclusive<i32>) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(exponents, 3).prop_map(|ex| Monomial::from_factors(ex.into_iter().enumerate().map(|(k, e)| (symbol(k), e))))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    monomial_in(-3..=3)
}

fn endo() -> impl Strategy<Value = MonomialMap> {
    endo_in(-3..=3)
}

/// Maps of `u_p, u_q, u_r` into themselves.
fn endo_in(exponents: std::ops::RangeInclusive<i32>) -> impl Strategy<Value = MonomialMap> {
    prop::collection::vec(monomial_in(exponents), 3).prop_map(|ms| {
        let source: BTreeSet<Symbol> = (0..3).map(symbol).collect();
        MonomialMap::new(source, ms.into_iter().enumerate().map(|(k, m)| (symbol(k), m)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn edge_order_and_endpoints(t in level_tree(8)) {
        let tree = t.tree();
        for e in tree.edges() {
            let (_, lower) = tree.endpoints(e).unwrap();
            prop_assert_eq!(lower, e);
            let geq = tree.descendants_geq(e);
            prop_assert!(geq.contains(&e));
            for f in &geq {
                prop_assert!(tree.compare_edges(*f, e).is_geq());
            }
            for f in tree.edges() {
                if tree.compare_edges(e, f) == Order::Greater {
                    prop_assert!(tree.compare_vertices(e, tree.upper(f)).is_geq());
                }
            }
        }
    }

    #[test]
    fn cross_sections_and_ascents(t in level_tree(8)) {
        let ld = t.level_data().unwrap();
        let special = default_special(&t, &ld);
        for i in ld.i_plus() {
            let section: BTreeSet<_> = ld.cross_section(i).unwrap().into_iter().collect();
            for v in t.vertices_at(i) {
                prop_assert!(section.contains(&v));
            }
            let asc = ascent_sequence(&t, &special, i).unwrap();
            prop_assert_eq!(*asc.last().unwrap(), Level::from_integer(0));
            prop_assert!(asc.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn equivalence_is_level_order_only(t in level_tree(8)) {
        let c = canonical_form(&t).unwrap();
        prop_assert!(is_equivalent(&t, &c) && is_equivalent(&c, &t));
        prop_assert_eq!(canonical_form(&c).unwrap(), c.clone());
        for t2 in relevelings(&t).unwrap() {
            prop_assert!(is_equivalent(&t, &t2));
            prop_assert_eq!(equiv_key(&t).unwrap(), equiv_key(&t2).unwrap());
            // m corresponds to m under the level identification
            prop_assert_eq!(t.vertices_at(t.level_data().unwrap().m), t2.vertices_at(t2.level_data().unwrap().m));
        }
    }

    #[test]
    fn equivalence_key_agrees_with_relation(a in level_tree(5), b in level_tree(5)) {
        let same_key = equiv_key(&a).unwrap() == equiv_key(&b).unwrap();
        prop_assert_eq!(same_key, is_equivalent(&a, &b));
        prop_assert_eq!(is_equivalent(&a, &b), is_equivalent(&b, &a));
    }

    #[test]
    fn contraction_conserves_weight(t in level_tree(8), mask in any::<u64>()) {
        let part = t.level_data().unwrap().index_partition();
        let sub = part.subset(mask & ((1u64 << part.len()) - 1));
        let res = contract(&t, &sub).unwrap();
        prop_assert_eq!(res.tree.base.total_weight(), t.base.total_weight());
        let full = contract(&t, &part.full()).unwrap();
        prop_assert_eq!(full.tree.tree().len(), 1);
        prop_assert_eq!(full.tree.base.total_weight(), t.base.total_weight());
        for t2 in relevelings(&t).unwrap() {
            prop_assert!(verify_equivalence_compat(&t, &t2, &sub).unwrap());
        }
    }

    #[test]
    fn nested_contractions(t in level_tree(7), a in any::<u64>(), b in any::<u64>()) {
        let part = t.level_data().unwrap().index_partition();
        let all = (1u64 << part.len()) - 1;
        let i = part.subset(a & all);
        let j = part.subset(b & all & !(a & all));
        let first = contract(&t, &i).unwrap();
        // I′ must survive as an index set of t₍I₎
        prop_assume!(transport_subset(&t, &first, &j).is_ok());
        prop_assert!(verify_nested(&t, &i, &j).unwrap());
    }

    #[test]
    fn composition_is_associative(f in endo(), g in endo(), h in endo()) {
        let left = compose(&compose(&f, &g).unwrap(), &h).unwrap();
        let right = compose(&f, &compose(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let id = MonomialMap::identity(&f.source);
        prop_assert_eq!(compose(&f, &id).unwrap(), f.clone());
        prop_assert_eq!(compose(&id, &f).unwrap(), f.clone());
    }

    #[test]
    fn monomial_arithmetic(a in monomial(), b in monomial()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a.clone());
        prop_assert_eq!(a.to_string().parse::<Monomial>().unwrap(), a.clone());
    }

    #[test]
    fn equal_on_stratum_is_an_equivalence(f in endo_in(0..=1), g in endo_in(0..=1), h in endo_in(0..=1), zero in 0usize..3) {
        // no negative exponents, so every value on the stratum is defined
        let s = Stratum::new([symbol(zero)].into_iter().collect(), BTreeSet::new()).unwrap();
        let eq = |x: &MonomialMap, y: &MonomialMap| equal_on_stratum(x, y, &s).ok();
        prop_assert_eq!(eq(&f, &f), Some(true));
        prop_assert_eq!(eq(&f, &g), eq(&g, &f));
        if eq(&f, &g) == Some(true) && eq(&g, &h) == Some(true) {
            prop_assert_eq!(eq(&f, &h), Some(true));
        }
    }

    #[test]
    fn tree_files_round_trip(t in level_tree(8)) {
        let text = TreeFile::from_level_tree(&t).to_json();
        prop_assert_eq!(read_level_tree(&text).unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn charts_verify_on_random_trees(t in level_tree(6)) {
        let f = ChartFrame::with_default_special(t, vec!["j".into()]).unwrap();
        for sub in f.partition().subsets() {
            let v = f.verify_round_trip(&sub).unwrap();
            prop_assert!(v.ok(), "{:?}", v.failures);
            let v = f.check_mu_vanishing(&sub).unwrap();
            prop_assert!(v.ok(), "{:?}", v.failures);
            let v = f.verify_stratum_transition(&sub).unwrap();
            prop_assert!(v.ok(), "{:?}", v.failures);
        }
        let v = f.verify_parameter_transition(true).unwrap();
        prop_assert!(v.ok(), "{:?}", v.failures);
    }

    #[test]
    fn blowup_identities_on_random_trees(t in level_tree(7)) {
        let f = ChartFrame::with_default_special(t.clone(), vec![]).unwrap();
        prop_assert!(bundle_identity(&f).unwrap().ok());
        prop_assert!(psi2_chart_check(&f).unwrap().ok());
        prop_assume!(is_stable(&t.base));
        let chart = TwistedChart::new(f);
        let mut previous = Monomial::one();
        for k in 1..=t.tree().edge_count() {
            let (d, v) = yk_pullback(&chart, k).unwrap();
            prop_assert!(v.ok(), "k={}: {:?}", k, v.failures);
            let q = d.div(&previous).unwrap();
            prop_assert!(q.factors().iter().all(|(_, e)| *e > 0), "Y_{} = {} after {}", k, d, previous);
            previous = d;
        }
    }
}
