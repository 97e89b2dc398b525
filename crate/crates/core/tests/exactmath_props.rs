use cubiclab::cubicforms::{reduce_form, BinaryCubicForm, Gl2};
use cubiclab::exactmath::{
    enumerate_short_vectors, factor_mod_p, hermite_normal_form, lll_reduce, poly_discriminant,
    smith_normal_form, IntMatrix, IntPoly, Interval, ModPoly,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(-20i64..=20, cols), rows)
}

fn to_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    let r: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    IntMatrix::from_i64(&r)
}

fn norm_sq(row: &[BigInt]) -> BigInt {
    row.iter().map(|x| x * x).sum()
}

fn gl2_mul(x: &Gl2, y: &Gl2) -> Gl2 {
    let mut z = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    z
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn smith_form_is_a_unimodular_diagonalisation(rows in 1usize..5, cols in 1usize..5, seed in matrix(4, 4)) {
        let m = to_matrix(&seed[..rows].iter().map(|r| r[..cols].to_vec()).collect::<Vec<_>>());
        let (d, u, v) = smith_normal_form(&m);
        prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
        prop_assert!(u.determinant().abs().is_one());
        prop_assert!(v.determinant().abs().is_one());
        let diag: Vec<BigInt> = (0..rows.min(cols)).map(|i| d.get(i, i).clone()).collect();
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    prop_assert!(d.get(i, j).is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn hermite_form_keeps_the_determinant(seed in matrix(3, 3)) {
        let m = to_matrix(&seed);
        let h = hermite_normal_form(&m);
        let det = m.determinant();
        if det.is_zero() {
            prop_assert!(h.cols() < 3 || h.determinant().is_zero());
        } else {
            prop_assert_eq!(h.determinant().abs(), det.abs());
        }
    }

    #[test]
    fn lll_keeps_the_lattice_and_shortens(seed in matrix(3, 3)) {
        let m = to_matrix(&seed);
        prop_assume!(!m.determinant().is_zero());
        let r = lll_reduce(&m).unwrap();
        prop_assert_eq!(r.determinant().abs(), m.determinant().abs());
        let first = norm_sq(r.row(0));
        for i in 0..3 {
            prop_assert!(first <= norm_sq(m.row(i)) * BigInt::from(4));
        }
    }

    #[test]
    fn discriminant_matches_root_differences(r in proptest::collection::vec(-30i64..=30, 3)) {
        let f = IntPoly::from_i64(&[-r[0], 1])
            .mul(&IntPoly::from_i64(&[-r[1], 1]))
            .mul(&IntPoly::from_i64(&[-r[2], 1]));
        let mut expected = BigInt::one();
        for i in 0..3 {
            for j in (i + 1)..3 {
                expected *= BigInt::from((r[i] - r[j]) * (r[i] - r[j]));
            }
        }
        prop_assert_eq!(poly_discriminant(&f).unwrap(), expected);
    }

    #[test]
    fn factors_mod_p_multiply_back(c in proptest::collection::vec(-50i64..=50, 3), pi in 0usize..6) {
        let p = [2u64, 3, 5, 7, 11, 101][pi];
        let f = IntPoly::from_i64(&[c[2], c[1], c[0], 1]);
        let mut product = ModPoly::one(p);
        let mut degree = 0;
        for (g, e) in factor_mod_p(&f, p).unwrap() {
            let g = ModPoly::from_int_poly(&g, p);
            degree += g.degree().unwrap() * e as usize;
            for _ in 0..e {
                product = product.mul(&g);
            }
        }
        prop_assert_eq!(degree, 3);
        prop_assert_eq!(product, ModPoly::from_int_poly(&f, p));
    }

    #[test]
    fn short_vectors_match_a_box_search(
        a in 1i64..8, b in -3i64..=3, c in 1i64..8, bound in 1i64..30,
    ) {
        prop_assume!(a * c - b * b > 0);
        let gram = vec![vec![a as f64, b as f64], vec![b as f64, c as f64]];
        let found = enumerate_short_vectors(&gram, bound as f64).unwrap();
        let q = |x: i64, y: i64| a * x * x + 2 * b * x * y + c * y * y;
        // q >= (ac - b^2)/c x^2 >= x^2 / 7, and symmetrically for y
        let r = 15;
        let mut expected = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                let first_positive = x > 0 || (x == 0 && y > 0);
                if first_positive && q(x, y) <= bound {
                    expected.push(vec![x, y]);
                }
            }
        }
        expected.sort();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn interval_arithmetic_encloses_samples(
        a in -1e3f64..1e3, wa in 0f64..10.0, b in -1e3f64..1e3, wb in 0f64..10.0,
        s in 0f64..=1.0, t in 0f64..=1.0,
    ) {
        let x = Interval::new(a, a + wa);
        let y = Interval::new(b, b + wb);
        let (u, v) = (a + s * wa, b + t * wb);
        prop_assert!((x + y).contains(u + v));
        prop_assert!((x - y).contains(u - v));
        prop_assert!((x * y).contains(u * v));
        if !y.contains_zero() {
            prop_assert!((x / y).contains(u / v));
        }
        if a > 0.0 {
            prop_assert!(x.ln().contains(u.ln()));
        }
    }

    #[test]
    fn reduction_is_a_class_invariant(
        c in proptest::collection::vec(-6i64..=6, 4),
        moves in proptest::collection::vec((0u8..3, -3i64..=3), 0..6),
    ) {
        let f = BinaryCubicForm::new(c[0], c[1], c[2], c[3]);
        prop_assume!(!f.discriminant().is_zero());
        let mut g: Gl2 = [[1, 0], [0, 1]];
        for (kind, k) in moves {
            let e = match kind {
                0 => [[1, k], [0, 1]],
                1 => [[1, 0], [k, 1]],
                _ => [[0, 1], [1, 0]],
            };
            g = gl2_mul(&g, &e);
        }
        let h = f.act(&g);
        prop_assert_eq!(h.discriminant(), f.discriminant());
        // reducible forms are rejected throughout the orbit
        match (reduce_form(&f), reduce_form(&h)) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "{:?} vs {:?}", x, y),
        }
    }
}
