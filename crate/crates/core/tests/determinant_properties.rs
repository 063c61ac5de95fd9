use darboux_core::detkit::*;
use darboux_core::CMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, shift: bool) -> CMatrix {
    CMatrix::from_fn(rows, cols, |r, c| {
        let z = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if shift && r == c {
            z + Complex64::new(2.0, 0.0)
        } else {
            z
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn determinant_is_multiplicative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, 6, 6, false);
        let b = random_matrix(&mut rng, 6, 6, false);
        let prod = det(&a) * det(&b);
        prop_assert!((det(&(&a * &b)) - prod).norm() <= 1e-9 * (1.0 + prod.norm()));
    }

    #[test]
    fn row_swap_flips_sign_on_integers(entries in prop::collection::vec(-9i32..=9, 25), r1 in 0usize..5, r2 in 0usize..5) {
        prop_assume!(r1 != r2);
        let m = CMatrix::from_fn(5, 5, |r, c| Complex64::new(entries[5 * r + c] as f64, 0.0));
        let mut s = m.clone();
        s.swap_rows(r1, r2);
        let (d, ds) = (det(&m), det(&s));
        prop_assert!((d + ds).norm() <= 1e-9 * (1.0 + d.norm()));
        prop_assert!((d.re - d.re.round()).abs() < 1e-7);
    }

    #[test]
    fn embordering_minor_is_the_assembled_determinant(seed in any::<u64>(), p in 1usize..4, q in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = p + q;
        let a = random_matrix(&mut rng, dim, dim, false);
        let row = rng.gen_range(0..q);
        let col = rng.gen_range(0..q);
        let minor = embordering_minor(&BorderLayout { full: &a, p, row, col }).unwrap();
        let rows: Vec<usize> = (0..p).chain(std::iter::once(p + row)).collect();
        let cols: Vec<usize> = (0..p).chain(std::iter::once(p + col)).collect();
        let assembled = CMatrix::from_fn(p + 1, p + 1, |r, c| a[(rows[r], cols[c])]);
        prop_assert_eq!(minor, det(&assembled));
    }
}

#[test]
fn sylvester_over_a_thousand_trials() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let dim = rng.gen_range(2..=8);
        let p = rng.gen_range(1..dim);
        let a = random_matrix(&mut rng, dim, dim, true);
        worst = worst.max(sylvester_residual(&a, p).unwrap().residual);
    }
    assert!(worst <= 1e-10, "worst Sylvester residual {worst:e}");
}

#[test]
fn lemma_over_a_thousand_trials() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let p = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=3);
        let input = LemmaInput {
            a: random_matrix(&mut rng, p, p, true),
            b_rows: random_matrix(&mut rng, 2, p + n, false),
            a_cols: random_matrix(&mut rng, p, n, false),
        };
        let j = rng.gen_range(0..2);
        let idx = LemmaIndices { k: rng.gen_range(0..n), s: rng.gen_range(0..p), j, t: 1 - j };
        worst = worst.max(lemma_residual(&input, idx).unwrap());
    }
    assert!(worst <= 1e-10, "worst lemma residual {worst:e}");
}

#[test]
fn lemma_rejects_equal_rows_and_singular_block() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let input = LemmaInput {
        a: random_matrix(&mut rng, 2, 2, true),
        b_rows: random_matrix(&mut rng, 2, 3, false),
        a_cols: random_matrix(&mut rng, 2, 1, false),
    };
    assert!(lemma_residual(&input, LemmaIndices { k: 0, s: 0, j: 1, t: 1 }).is_err());
    let singular = LemmaInput { a: CMatrix::zeros(2, 2), ..input };
    assert!(lemma_residual(&singular, LemmaIndices { k: 0, s: 0, j: 0, t: 1 }).is_err());
}
