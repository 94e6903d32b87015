//! Commutator ranks checked against Gaussian elimination on the two cut
//! blocks, independently of the SVD used by the library.

use jacobi_spectra::tridiag::{filtration_degree_window, BandedMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rank by Gaussian elimination with full pivoting.
fn ge_rank(mut m: Vec<Vec<f64>>, tol: f64) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    let mut used_cols = vec![false; cols];
    for _ in 0..rows.min(cols) {
        let mut best = (0.0, 0, 0);
        for (r, row) in m.iter().enumerate().skip(rank) {
            for (c, &v) in row.iter().enumerate() {
                if !used_cols[c] && v.abs() > best.0 {
                    best = (v.abs(), r, c);
                }
            }
        }
        if best.0 <= tol {
            break;
        }
        let (_, pr, pc) = best;
        m.swap(rank, pr);
        used_cols[pc] = true;
        let pivot_row = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            let f = row[pc] / pivot_row[pc];
            for c in 0..cols {
                row[c] -= f * pivot_row[c];
            }
        }
        rank += 1;
    }
    rank
}

fn block(a: &BandedMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<Vec<f64>> {
    rows.map(|i| cols.clone().map(|j| a.get(i, j)).collect()).collect()
}

fn random_tridiagonal(rng: &mut ChaCha8Rng, n: usize) -> BandedMatrix {
    let mut v = |len| (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    let (l, d, u) = (v(n - 1), v(n), v(n - 1));
    BandedMatrix::tridiagonal(l, d, u).unwrap()
}

#[test]
fn svd_ranks_match_elimination_oracle() {
    let n = 24;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let s = random_tridiagonal(&mut rng, n);
        let t = random_tridiagonal(&mut rng, n);
        for a in [s.clone(), s.mul(&t).unwrap(), s.mul(&t).unwrap().mul(&s).unwrap()] {
            let rep = filtration_degree_window(&a, n - 1).unwrap();
            for k in 1..n {
                let upper = ge_rank(block(&a, 0..k, k..n), rep.rank_tol);
                let lower = ge_rank(block(&a, k..n, 0..k), rep.rank_tol);
                assert_eq!(rep.ranks[k - 1], upper + lower, "k={k}");
                assert_eq!(rep.lower_ranks[k - 1], lower, "k={k}");
                assert!(lower <= a.bandwidth() && upper <= a.bandwidth());
            }
        }
    }
}

#[test]
fn degree_is_subadditive_under_products() {
    let n = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        let s = random_tridiagonal(&mut rng, n);
        let t = random_tridiagonal(&mut rng, n);
        let deg = |a: &BandedMatrix| filtration_degree_window(a, n - 1).unwrap().degree_window;
        let st = s.mul(&t).unwrap();
        assert!(deg(&st) <= deg(&s) + deg(&t));
        // Generic tridiagonals: commutator rank 2, product rank 4 = 2 + 2.
        assert_eq!(deg(&s), 2);
        assert_eq!(deg(&st), 4);
        let lower = |a: &BandedMatrix| *filtration_degree_window(a, n - 1).unwrap().lower_ranks.iter().max().unwrap();
        assert_eq!(lower(&s), 1);
        assert_eq!(lower(&st), 2);
    }
}
