//! Smith normal form over the integers with both transforms and their inverses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal, its nonzero
/// diagonal entries positive and forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    u_inv: IntMatrix,
    v_inv: IntMatrix,
    rank: usize,
}

impl SnfDecomposition {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The nonzero diagonal entries, including any leading ones.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn u_inverse(&self) -> &IntMatrix {
        &self.u_inv
    }

    pub fn v_inverse(&self) -> &IntMatrix {
        &self.v_inv
    }
}

struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_row_multiple(dst, src, c);
        self.u.add_row_multiple(dst, src, c);
        self.u_inv.add_col_multiple(src, dst, &-c);
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_col_multiple(dst, src, c);
        self.v.add_col_multiple(dst, src, c);
        self.v_inv.add_row_multiple(src, dst, &-c);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn pivot_candidate(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                    best = Some((i, j, ax));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Clears row and column `t` outside the pivot. Returns false when a
    /// remainder appeared and a smaller pivot was swapped in.
    fn clear_cross(&mut self, t: usize) -> bool {
        let rows = self.a.rows();
        let cols = self.a.cols();
        for i in t + 1..rows {
            if self.a.get(i, t).is_zero() {
                continue;
            }
            let q = self.a.get(i, t).div_floor(self.a.get(t, t));
            self.add_row(i, t, &-q);
            if !self.a.get(i, t).is_zero() {
                self.swap_rows(i, t);
                return false;
            }
        }
        for j in t + 1..cols {
            if self.a.get(t, j).is_zero() {
                continue;
            }
            let q = self.a.get(t, j).div_floor(self.a.get(t, t));
            self.add_col(j, t, &-q);
            if !self.a.get(t, j).is_zero() {
                self.swap_cols(j, t);
                return false;
            }
        }
        true
    }

    fn run(&mut self) -> usize {
        let limit = self.a.rows().min(self.a.cols());
        let mut t = 0;
        while t < limit {
            let Some((pi, pj)) = self.pivot_candidate(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                if !self.clear_cross(t) {
                    continue;
                }
                // divisibility of the remaining block by the pivot
                let p = self.a.get(t, t).clone();
                let offender = (t + 1..self.a.rows()).find(|&i| {
                    (t + 1..self.a.cols()).any(|j| !self.a.get(i, j).is_multiple_of(&p))
                });
                match offender {
                    Some(i) => {
                        let one = BigInt::from(1);
                        self.add_row(t, i, &one);
                    }
                    None => break,
                }
            }
            if self.a.get(t, t).is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }
}

/// Smith normal form of an arbitrary (possibly empty) integer matrix.
pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut r = Reducer {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    let rank = r.run();
    SnfDecomposition { u: r.u, d: r.a, v: r.v, u_inv: r.u_inv, v_inv: r.v_inv, rank }
}

/// Basis of the integer kernel `{x : a x = 0}` as the columns of the result.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    snf.v.submatrix(0, a.cols(), snf.rank(), a.cols())
}

/// Some integer solution of `a x = b`, if one exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len());
    let snf = smith_normal_form(a);
    solve_with(&snf, a.cols(), b)
}

pub(crate) fn solve_with(snf: &SnfDecomposition, cols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let w = snf.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); cols];
    for (i, wi) in w.iter().enumerate() {
        if i < snf.rank() {
            let (q, r) = wi.div_rem(snf.d.get(i, i));
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !wi.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgab::matrix::determinant;
    use proptest::prelude::*;

    fn check(a: &IntMatrix) -> SnfDecomposition {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.d.is_diagonal());
        let diag = s.invariant_factors();
        for w in diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]), "chain broken: {diag:?}");
        }
        assert!(diag.iter().all(|x| x.is_positive()));
        assert_eq!(s.u.mul(s.u_inverse()), IntMatrix::identity(a.rows()));
        assert_eq!(s.v.mul(s.v_inverse()), IntMatrix::identity(a.cols()));
        s
    }

    #[test]
    fn identity_case() {
        let s = check(&IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
    }

    #[test]
    fn zero_case() {
        let s = check(&IntMatrix::zeros(2, 3));
        assert_eq!(s.d, IntMatrix::zeros(2, 3));
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn two_by_two_example() {
        // |det| = 8 and gcd of entries = 2 force diag(2, 4)
        let a = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let s = check(&a);
        assert_eq!(s.d, IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        let prod: BigInt = s.invariant_factors().iter().product();
        assert_eq!(prod, determinant(&a).abs());
    }

    #[test]
    fn empty_dimensions() {
        check(&IntMatrix::zeros(0, 3));
        check(&IntMatrix::zeros(3, 0));
        check(&IntMatrix::zeros(0, 0));
    }

    #[test]
    fn kernel_and_solve() {
        let a = IntMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        let b = vec![BigInt::from(4), BigInt::from(8)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(solve(&a, &[BigInt::from(1), BigInt::from(1)]).is_none());
        let two = IntMatrix::from_i64(&[&[2]]);
        assert!(solve(&two, &[BigInt::from(3)]).is_none());
    }

    fn arb_matrix() -> impl Strategy<Value = IntMatrix> {
        (0usize..6, 0usize..6).prop_flat_map(|(m, n)| {
            proptest::collection::vec(-20i64..=20, m * n).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(n.max(1)).take(m).map(|c| c.to_vec()).collect();
                if n == 0 {
                    IntMatrix::zeros(m, 0)
                } else {
                    IntMatrix::from_rows(n, &rows)
                }
            })
        })
    }

    proptest! {
        #[test]
        fn decomposition_holds(a in arb_matrix()) {
            let s = check(&a);
            prop_assert_eq!(determinant(&s.u).abs(), BigInt::from(1));
            prop_assert_eq!(determinant(&s.v).abs(), BigInt::from(1));
        }

        #[test]
        fn normal_form_is_idempotent(a in arb_matrix()) {
            let d = smith_normal_form(&a).d;
            prop_assert_eq!(smith_normal_form(&d).d, d);
        }

        #[test]
        fn rank_nullity(a in arb_matrix()) {
            let k = kernel_basis(&a);
            prop_assert!(a.mul(&k).is_zero());
            prop_assert_eq!(k.cols() + smith_normal_form(&a).rank(), a.cols());
        }
    }
}
