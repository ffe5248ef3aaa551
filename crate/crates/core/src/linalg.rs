//! Sparse Gaussian elimination over an exact [`Field`].
//!
//! Pivots are chosen Markowitz-style: the live column with the fewest
//! nonzeros, then the sparsest row in it. DOF matrices in the monomial basis
//! are close to block-triangular, so this keeps fill-in (and rational
//! coefficient growth) small. The row operations are recorded so that the
//! same factorization can solve any number of right-hand sides afterwards.

use std::collections::BTreeSet;

use crate::arith::Field;

pub type SparseRow<E> = Vec<(usize, E)>;

#[derive(Debug, Clone)]
pub struct Factorization<E> {
    nrows: usize,
    ncols: usize,
    /// `(row, col)` in the order they were eliminated.
    pivots: Vec<(usize, usize)>,
    rows: Vec<SparseRow<E>>,
    /// `row[target] -= factor * row[source]`, in application order.
    ops: Vec<(usize, usize, E)>,
}

fn entry<E>(row: &SparseRow<E>, col: usize) -> Option<&E> {
    row.binary_search_by_key(&col, |(c, _)| *c)
        .ok()
        .map(|i| &row[i].1)
}

/// `a - f * b`, both sorted by column.
fn axpy<F: Field>(field: &F, a: &SparseRow<F::Elem>, f: &F::Elem, b: &SparseRow<F::Elem>) -> SparseRow<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            let v = field.neg(&field.mul(f, &b[j].1));
            if !field.is_zero(&v) {
                out.push((cb, v));
            }
            j += 1;
        } else {
            let v = field.sub(&a[i].1, &field.mul(f, &b[j].1));
            if !field.is_zero(&v) {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn factorize<F: Field>(field: &F, rows: Vec<SparseRow<F::Elem>>, ncols: usize) -> Factorization<F::Elem> {
    let nrows = rows.len();
    let mut rows: Vec<SparseRow<F::Elem>> = rows
        .into_iter()
        .map(|mut r| {
            r.retain(|(_, v)| !field.is_zero(v));
            r.sort_by_key(|e| e.0);
            r
        })
        .collect();

    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for (c, _) in r {
            col_rows[*c].insert(i);
        }
    }
    let mut col_live = vec![true; ncols];
    let mut pivots = Vec::new();
    let mut ops = Vec::new();

    while let Some(col) = (0..ncols)
        .filter(|&c| col_live[c] && !col_rows[c].is_empty())
        .min_by_key(|&c| col_rows[c].len())
    {
        let prow = *col_rows[col]
            .iter()
            .min_by_key(|&&r| (rows[r].len(), r))
            .expect("column has a live row");
        let pval = entry(&rows[prow], col).expect("pivot entry").clone();
        let pinv = field.inv(&pval).expect("nonzero pivot");

        let targets: Vec<usize> = col_rows[col].iter().copied().filter(|&r| r != prow).collect();
        for t in targets {
            let f = field.mul(entry(&rows[t], col).expect("target entry"), &pinv);
            let updated = axpy(field, &rows[t], &f, &rows[prow]);
            for (c, _) in &rows[prow] {
                let had = entry(&rows[t], *c).is_some();
                let has = entry(&updated, *c).is_some();
                if had && !has {
                    col_rows[*c].remove(&t);
                } else if !had && has {
                    col_rows[*c].insert(t);
                }
            }
            rows[t] = updated;
            ops.push((t, prow, f));
        }
        for (c, _) in &rows[prow] {
            col_rows[*c].remove(&prow);
        }
        col_live[col] = false;
        pivots.push((prow, col));
    }

    Factorization {
        nrows,
        ncols,
        pivots,
        rows,
        ops,
    }
}

pub fn rank<F: Field>(field: &F, rows: Vec<SparseRow<F::Elem>>, ncols: usize) -> usize {
    factorize(field, rows, ncols).rank()
}

impl<E: Clone> Factorization<E> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_nonsingular(&self) -> bool {
        self.nrows == self.ncols && self.rank() == self.ncols
    }

    /// Original row indices that ended up as pivots; they form a basis of the row space.
    pub fn pivot_rows(&self) -> Vec<usize> {
        self.pivots.iter().map(|p| p.0).collect()
    }

    /// Determinant of a square matrix (zero when singular).
    pub fn determinant<F: Field<Elem = E>>(&self, field: &F) -> E {
        assert_eq!(self.nrows, self.ncols, "determinant of a non-square matrix");
        if !self.is_nonsingular() {
            return field.zero();
        }
        let mut perm = vec![0usize; self.nrows];
        let mut det = field.one();
        for (r, c) in &self.pivots {
            perm[*r] = *c;
            det = field.mul(&det, entry(&self.rows[*r], *c).expect("pivot"));
        }
        let mut seen = vec![false; perm.len()];
        let mut odd = false;
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                odd = !odd;
            }
        }
        if odd {
            field.neg(&det)
        } else {
            det
        }
    }

    fn back_substitute<F: Field<Elem = E>>(&self, field: &F, b: &[E], x: &mut [E]) {
        for (r, c) in self.pivots.iter().rev() {
            let mut acc = b[*r].clone();
            let mut piv = None;
            for (j, a) in &self.rows[*r] {
                if j == c {
                    piv = Some(a);
                } else {
                    acc = field.sub(&acc, &field.mul(a, &x[*j]));
                }
            }
            x[*c] = field.div(&acc, piv.expect("pivot")).expect("nonzero pivot");
        }
    }

    /// Solves `A x = b`. Returns `None` when the system is inconsistent.
    /// For rank-deficient but consistent systems the free variables are zero.
    pub fn solve<F: Field<Elem = E>>(&self, field: &F, b: &[E]) -> Option<Vec<E>> {
        assert_eq!(b.len(), self.nrows);
        let mut b = b.to_vec();
        for (t, s, f) in &self.ops {
            b[*t] = field.sub(&b[*t], &field.mul(f, &b[*s]));
        }
        let pivot_rows: BTreeSet<usize> = self.pivots.iter().map(|p| p.0).collect();
        if (0..self.nrows).any(|r| !pivot_rows.contains(&r) && !field.is_zero(&b[r])) {
            return None;
        }
        let mut x = vec![field.zero(); self.ncols];
        self.back_substitute(field, &b, &mut x);
        Some(x)
    }

    /// A nonzero `x` with `A x = 0`, if one exists.
    pub fn kernel_vector<F: Field<Elem = E>>(&self, field: &F) -> Option<Vec<E>> {
        let pivot_cols: BTreeSet<usize> = self.pivots.iter().map(|p| p.1).collect();
        let free = (0..self.ncols).find(|c| !pivot_cols.contains(c))?;
        let mut x = vec![field.zero(); self.ncols];
        x[free] = field.one();
        let zero = vec![field.zero(); self.nrows];
        for (r, c) in self.pivots.iter().rev() {
            let mut acc = zero[*r].clone();
            let mut piv = None;
            for (j, a) in &self.rows[*r] {
                if j == c {
                    piv = Some(a);
                } else {
                    acc = field.sub(&acc, &field.mul(a, &x[*j]));
                }
            }
            x[*c] = field.div(&acc, piv.expect("pivot")).expect("nonzero pivot");
        }
        Some(x)
    }
}

pub fn dense_to_sparse<F: Field>(field: &F, dense: &[Vec<F::Elem>]) -> Vec<SparseRow<F::Elem>> {
    dense
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !field.is_zero(v))
                .map(|(c, v)| (c, v.clone()))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qr, PrimeField, Rationals, Q};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn mat(v: &[&[i64]]) -> Vec<Vec<Q>> {
        v.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    /// Cofactor expansion, only for tiny matrices.
    fn det_oracle(m: &[Vec<Q>]) -> Q {
        let n = m.len();
        if n == 0 {
            return q(1);
        }
        let mut acc = Q::zero();
        for j in 0..n {
            let minor: Vec<Vec<Q>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let term = &m[0][j] * det_oracle(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn determinant_with_row_swaps() {
        let m = mat(&[&[0, 2, 1], &[3, 0, 0], &[1, 1, 1]]);
        let f = factorize(&Rationals, dense_to_sparse(&Rationals, &m), 3);
        assert_eq!(f.determinant(&Rationals), det_oracle(&m));
    }

    #[test]
    fn singular_matrix_has_kernel() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let f = factorize(&Rationals, dense_to_sparse(&Rationals, &m), 3);
        assert_eq!(f.rank(), 2);
        assert!(f.determinant(&Rationals).is_zero());
        let x = f.kernel_vector(&Rationals).unwrap();
        assert!(x.iter().any(|v| !v.is_zero()));
        for row in &m {
            let s: Q = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn solve_multiple_rhs() {
        let m = mat(&[&[2, 1], &[1, 3]]);
        let f = factorize(&Rationals, dense_to_sparse(&Rationals, &m), 2);
        let x = f.solve(&Rationals, &[q(1), q(0)]).unwrap();
        assert_eq!(x, vec![qr(3, 5), qr(-1, 5)]);
        let x = f.solve(&Rationals, &[q(0), q(1)]).unwrap();
        assert_eq!(x, vec![qr(-1, 5), qr(2, 5)]);
    }

    #[test]
    fn inconsistent_system_is_rejected() {
        let m = mat(&[&[1, 1], &[2, 2]]);
        let f = factorize(&Rationals, dense_to_sparse(&Rationals, &m), 2);
        assert!(f.solve(&Rationals, &[q(1), q(3)]).is_none());
        assert!(f.solve(&Rationals, &[q(1), q(2)]).is_some());
    }

    proptest! {
        #[test]
        fn determinant_matches_cofactor_oracle(entries in prop::collection::vec(-4i64..=4, 16)) {
            let m: Vec<Vec<Q>> = entries.chunks(4).map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            let f = factorize(&Rationals, dense_to_sparse(&Rationals, &m), 4);
            prop_assert_eq!(f.determinant(&Rationals), det_oracle(&m));
        }

        #[test]
        fn modular_determinant_is_reduction(entries in prop::collection::vec(-9i64..=9, 9)) {
            let m: Vec<Vec<Q>> = entries.chunks(3).map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            let p = PrimeField::new(1_000_000_007).unwrap();
            let mp: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|v| p.image(v).unwrap()).collect()).collect();
            let f = factorize(&p, dense_to_sparse(&p, &mp), 3);
            prop_assert_eq!(f.determinant(&p), p.image(&det_oracle(&m)).unwrap());
        }
    }
}
