mod common;

use std::collections::BTreeMap;

use common::count_planar_trees;
use hpt::trees::{
    enumerate_planar_trees, enumerate_q_trees, epsilon_tree, expand_p, expand_q, theta_tree, PlanarTree, QTree,
};

const FIG: &str = "((.(..)).(...))";

#[test]
fn planar_counts_match_the_recursion() {
    for n in 1..=9 {
        assert_eq!(enumerate_planar_trees(n).len() as u64, count_planar_trees(n), "n = {n}");
    }
}

#[test]
fn q_tree_counts() {
    let counts: Vec<usize> = (2..=4).map(|n| enumerate_q_trees(n).len()).collect();
    assert_eq!(&counts[..2], [2, 10]);
    assert!(counts[2] > counts[1]);
}

#[test]
fn sample_tree_sign_and_word() {
    let t: PlanarTree = FIG.parse().unwrap();
    assert_eq!(t.to_string(), FIG);
    assert_eq!(t.leaves(), 7);
    assert!(theta_tree(&t));
    assert_eq!(t.monomial(), "m3(hm2(1,hm2(1,1)),1,hm3(1,1,1))");
}

#[test]
fn text_round_trip() {
    for n in 1..=6 {
        for t in enumerate_planar_trees(n) {
            assert_eq!(t.to_string().parse::<PlanarTree>().unwrap(), t);
        }
    }
    for n in 2..=4 {
        for s in enumerate_q_trees(n) {
            assert_eq!(s.to_string().parse::<QTree>().unwrap(), s);
        }
    }
    assert!("(.".parse::<PlanarTree>().is_err());
    assert!("(o..)".parse::<PlanarTree>().is_err());
    assert!("(.)".parse::<PlanarTree>().is_err());
}

/// Unfolding the recursion for p_n yields every tree exactly once, with sign ϑ(T).
#[test]
fn p_expansion_is_signed_by_theta() {
    for n in 2..=7 {
        let mut seen = BTreeMap::new();
        for (sign, t) in expand_p(n) {
            assert_eq!(sign, theta_tree(&t), "{t}");
            *seen.entry(t.to_string()).or_insert(0) += 1;
        }
        assert!(seen.values().all(|&c| c == 1));
        assert_eq!(seen.len(), enumerate_planar_trees(n).len());
    }
}

/// Same for q_n: every decorated tree once, with the sign from its level decomposition.
#[test]
fn q_expansion_is_signed_by_epsilon() {
    for n in 2..=5 {
        let mut seen = BTreeMap::new();
        for (sign, s) in expand_q(n) {
            assert_eq!(sign, epsilon_tree(&s).unwrap(), "{s}");
            *seen.entry(s.to_string()).or_insert(0) += 1;
        }
        assert!(seen.values().all(|&c| c == 1), "n = {n}");
        let listed: Vec<String> = enumerate_q_trees(n).iter().map(|s| s.to_string()).collect();
        assert_eq!(seen.keys().cloned().collect::<Vec<_>>(), listed);
    }
}

#[test]
fn seven_leaf_decorated_tree() {
    let s: QTree = "(*(o(*.*.)o(*.o.))o(o...))".parse().unwrap();
    assert_eq!(s.leaves(), 7);
    let listed = expand_q(7).into_iter().find(|(_, t)| *t == s).expect("tree occurs in q_7");
    assert_eq!(listed.0, epsilon_tree(&s).unwrap());
    assert!(listed.0);
}
