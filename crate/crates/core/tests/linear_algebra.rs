mod common;

use alexcover::exactlin::{
    self, cyclic_substitute, elementary_ops_normalize, minor_gcd_laurent, LaurentMatrixZ, Matrix,
};
use alexcover::laurent::canonical_rep;
use alexcover::LaurentPolyZ;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn laurent() -> impl Strategy<Value = LaurentPolyZ> {
    (-2i64..=2, prop::collection::vec(-3i64..=3, 1..4)).prop_map(|(m, c)| LaurentPolyZ::from_i64s(m, &c))
}

fn laurent_matrix(max: usize) -> impl Strategy<Value = LaurentMatrixZ> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(laurent(), r * c).prop_map(move |v| Matrix::from_fn(r, c, |i, j| v[i * c + j].clone()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_matches_determinantal_divisors(entries in prop::collection::vec(-9i64..=9, 16)) {
        let rows: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
        let m = exactlin::IntMatrix::from_i64(&rows).unwrap();
        prop_assert_eq!(common::check_snf_against_minors(&m), Ok(()));
    }

    #[test]
    fn rank_of_circulant_block(coeffs in prop::collection::vec(-4i64..=4, 1..7), n in 1usize..=40) {
        let h = LaurentPolyZ::from_i64s(0, &coeffs);
        prop_assume!(!h.is_zero());
        let rank = exactlin::rank(&cyclic_substitute(&Matrix::from_fn(1, 1, |_, _| h.clone()), n));
        prop_assert_eq!(rank, n - common::gcd_degree_with_unity(&h, n));
        prop_assert!(rank + common::cyclotomic_degree(&h) >= n);
    }

    #[test]
    fn block_diagonal_multiplies_deltas(a in laurent_matrix(2), b in laurent_matrix(2)) {
        let whole = minor_gcd_laurent(&a.block_diag(&b, &LaurentPolyZ::zero()));
        let (da, db) = (minor_gcd_laurent(&a), minor_gcd_laurent(&b));
        prop_assert_eq!(whole.rank, da.rank + db.rank);
        prop_assert_eq!(whole.delta, canonical_rep(&(da.delta.poly() * db.delta.poly())).unwrap());
    }

    #[test]
    fn free_summands_do_not_change_delta(a in laurent_matrix(3), extra_rows in 0usize..3, extra_cols in 0usize..3) {
        let padded = Matrix::from_fn(a.rows() + extra_rows, a.cols() + extra_cols, |i, j| {
            if i < a.rows() && j < a.cols() { a.get(i, j).clone() } else { LaurentPolyZ::zero() }
        });
        prop_assert_eq!(minor_gcd_laurent(&padded), minor_gcd_laurent(&a));
    }

    #[test]
    fn delta_is_invariant_under_elementary_operations(a in laurent_matrix(3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops = common::random_ops(&mut rng, a.rows(), a.cols(), 6);
        let b = elementary_ops_normalize(&a, &ops).unwrap();
        prop_assert_eq!(minor_gcd_laurent(&b), minor_gcd_laurent(&a));
    }
}

#[test]
fn cofactor_oracle_agrees_with_bareiss() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let m = common::random_int_matrix(&mut rng, 4, 4, 20);
        let rows = m.to_rows();
        assert_eq!(common::cofactor_det(&rows), exactlin::determinant(&m, &num_bigint::BigInt::from(1)));
    }
}
