//! Randomized invariants for the exact layer: square classes, F2 spans,
//! valuations, factoring, and kernel membership.

use arborab::exactnum::{
    self, factor, is_prime, is_rational_square, padic_valuation, squarefree_part,
};
use arborab::obstruct;
use arborab::{Integer, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational(num_mag: i64, den_mag: i64) -> impl Strategy<Value = Rational> {
    (-num_mag..=num_mag, 1..=den_mag)
        .prop_map(|(n, d)| Rational::new(Integer::from(n), Integer::from(d)))
}

fn nonzero_rational(num_mag: i64, den_mag: i64) -> impl Strategy<Value = Rational> {
    rational(num_mag, den_mag).prop_filter("nonzero", |q| !q.is_zero())
}

proptest! {
    #[test]
    fn squarefree_part_ignores_square_factors(
        q in nonzero_rational(1000, 1000),
        r in nonzero_rational(60, 60),
    ) {
        let scaled = &q * &r * &r;
        prop_assert_eq!(squarefree_part(&scaled), squarefree_part(&q));
    }

    #[test]
    fn quotient_by_the_class_representative_is_a_square(
        q in nonzero_rational(100_000, 100_000),
    ) {
        let class = squarefree_part(&q);
        let k = class.value().expect("nonzero input has a representative");
        // The representative itself is squarefree.
        let f = factor(k).unwrap();
        prop_assert!(f.factors.values().all(|e| *e == 1));
        let ratio = &q / Rational::from_integer(k.clone());
        prop_assert!(is_rational_square(&ratio));
    }

    #[test]
    fn span_dimension_counts_square_subset_products(
        qs in prop::collection::vec(nonzero_rational(50, 50), 1..6),
    ) {
        let classes: Vec<_> = qs.iter().map(squarefree_part).collect();
        let (dim, witness) = exactnum::f2_span_dimension(&classes);
        prop_assert_eq!(witness.len(), dim);
        // Subsets multiplying to a square form the kernel of the span map,
        // a subspace of index 2^dim.
        let n = qs.len();
        let mut kernel = 0u32;
        for mask in 0..1u32 << n {
            let mut prod = Rational::one();
            for (i, q) in qs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    prod *= q;
                }
            }
            if is_rational_square(&prod) {
                kernel += 1;
            }
        }
        prop_assert_eq!(kernel, 1 << (n - dim));
    }

    #[test]
    fn valuations_add_under_multiplication(
        a in nonzero_rational(10_000, 10_000),
        b in nonzero_rational(10_000, 10_000),
        p_idx in 0usize..6,
    ) {
        let p = Integer::from([2i64, 3, 5, 7, 11, 13][p_idx]);
        let va = padic_valuation(&a, &p).unwrap();
        let vb = padic_valuation(&b, &p).unwrap();
        prop_assert_eq!(padic_valuation(&(&a * &b), &p).unwrap(), va + vb);
    }

    #[test]
    fn valuation_recovers_pure_powers(k in -20i64..=20, p_idx in 0usize..4) {
        let p = [2i64, 3, 5, 7][p_idx];
        let q = if k >= 0 {
            Rational::from_integer(Integer::from(p).pow(k as u32))
        } else {
            Rational::new(Integer::one(), Integer::from(p).pow(-k as u32))
        };
        prop_assert_eq!(padic_valuation(&q, &Integer::from(p)).unwrap(), k);
    }

    #[test]
    fn factoring_reconstructs_and_lists_primes(n in -1_000_000_000i64..=1_000_000_000) {
        prop_assume!(n != 0);
        let n = Integer::from(n);
        let f = factor(&n).unwrap();
        prop_assert_eq!(f.reconstruct(), n.clone());
        prop_assert_eq!(i64::from(f.sign), if n < Integer::zero() { -1 } else { 1 });
        for p in f.factors.keys() {
            prop_assert!(is_prime(p.magnitude()), "{p} listed as prime");
        }
    }

    #[test]
    fn membership_respects_symmetric_differences(
        c in rational(8, 4),
        alpha in rational(8, 4),
        a_mask in 1u8..32,
        b_mask in 1u8..32,
    ) {
        let to_set = |mask: u8| -> Vec<usize> {
            (0..5).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
        };
        let (sa, sb, sx) = (to_set(a_mask), to_set(b_mask), to_set(a_mask ^ b_mask));
        if sx.is_empty() {
            return Ok(());
        }
        // Degenerate levels (vanishing adjusted orbit) void the statement.
        let (Ok(ma), Ok(mb), Ok(mx)) = (
            obstruct::prop_b_membership(&c, &alpha, &sa),
            obstruct::prop_b_membership(&c, &alpha, &sb),
            obstruct::prop_b_membership(&c, &alpha, &sx),
        ) else {
            return Ok(());
        };
        // ∏_{AΔB} differs from ∏_A · ∏_B by the square (∏_{A∩B})², so
        // membership transfers one-sidedly: two squares multiply to a
        // square, and a square times a nonsquare never is one. Two
        // nonsquares decide nothing.
        if ma && mb {
            prop_assert!(mx);
        } else if ma != mb {
            prop_assert!(!mx);
        }
    }
}
