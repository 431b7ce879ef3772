//! Randomized group laws for finite-depth tree automorphisms, exercised
//! through the portrait encoding.

use arborab::treeaut::TreeAut;
use proptest::prelude::*;

/// Uniform element of depth `depth` ≤ 6 (node count stays within u64).
fn aut_at(depth: usize, bits: u64) -> TreeAut {
    let nodes = (1u64 << depth) - 1;
    let mask = if nodes >= 64 {
        u64::MAX
    } else {
        (1u64 << nodes) - 1
    };
    TreeAut::from_index(depth, bits & mask)
}

fn one_aut() -> impl Strategy<Value = TreeAut> {
    (1usize..=6, any::<u64>()).prop_map(|(d, b)| aut_at(d, b))
}

fn two_auts() -> impl Strategy<Value = (TreeAut, TreeAut)> {
    (1usize..=6, any::<u64>(), any::<u64>()).prop_map(|(d, b1, b2)| (aut_at(d, b1), aut_at(d, b2)))
}

fn three_auts() -> impl Strategy<Value = (TreeAut, TreeAut, TreeAut)> {
    (1usize..=6, any::<u64>(), any::<u64>(), any::<u64>())
        .prop_map(|(d, b1, b2, b3)| (aut_at(d, b1), aut_at(d, b2), aut_at(d, b3)))
}

proptest! {
    #[test]
    fn parse_display_roundtrip(t in one_aut()) {
        prop_assert_eq!(TreeAut::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn leaf_action_is_a_bijection(t in one_aut()) {
        let mut perm = t.leaf_permutation();
        perm.sort_unstable();
        let expected: Vec<usize> = (1..=1usize << t.depth()).collect();
        prop_assert_eq!(perm, expected);
    }

    #[test]
    fn composition_acts_as_function_composition((s, t) in two_auts()) {
        let st = s.compose(&t);
        for leaf in 1..=1usize << s.depth() {
            prop_assert_eq!(st.act_on_leaf(leaf), s.act_on_leaf(t.act_on_leaf(leaf)));
        }
    }

    #[test]
    fn composition_is_associative((s, t, u) in three_auts()) {
        prop_assert_eq!(s.compose(&t).compose(&u), s.compose(&t.compose(&u)));
    }

    #[test]
    fn inverses_cancel(t in one_aut()) {
        prop_assert!(t.compose(&t.inverse()).is_identity());
        prop_assert!(t.inverse().compose(&t).is_identity());
        // Inverting twice is the identity map on elements.
        prop_assert_eq!(t.inverse().inverse(), t);
    }

    #[test]
    fn psi_is_a_homomorphism((s, t) in two_auts()) {
        prop_assert_eq!(s.compose(&t).psi(), s.psi().xor(&t.psi()));
    }

    #[test]
    fn phi_components_match_psi((s, _) in two_auts()) {
        let psi = s.psi();
        for (k, bit) in psi.bits().iter().enumerate() {
            prop_assert_eq!(s.phi(k + 1), *bit);
        }
    }
}
