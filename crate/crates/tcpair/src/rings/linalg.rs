//! Small dense exact linear algebra over a coefficient field: reduced row
//! echelon form, rank, and nullspace bases. Matrix sizes here are the
//! per-degree ranks of the rings involved, so dense is the right shape.

use crate::scalar::Field;

/// Row-major dense matrix.
pub struct DenseMatrix<K: Field> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<K::Elem>>,
}

impl<K: Field> DenseMatrix<K> {
    pub fn new(field: &K, rows: usize, cols: usize) -> DenseMatrix<K> {
        DenseMatrix {
            rows,
            cols,
            data: vec![vec![field.zero(); cols]; rows],
        }
    }

    pub fn from_rows(rows: Vec<Vec<K::Elem>>, cols: usize) -> DenseMatrix<K> {
        DenseMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref<K: Field>(field: &K, m: &mut DenseMatrix<K>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(pivot_row) = (row..m.rows).find(|&r| !field.is_zero(&m.data[r][col])) else {
            continue;
        };
        m.data.swap(row, pivot_row);
        let inv = field
            .inv(&m.data[row][col])
            .expect("pivot entry is nonzero");
        for c in col..m.cols {
            m.data[row][c] = field.mul(&m.data[row][c], &inv);
        }
        for r in 0..m.rows {
            if r != row && !field.is_zero(&m.data[r][col]) {
                let factor = m.data[r][col].clone();
                for c in col..m.cols {
                    let delta = field.mul(&factor, &m.data[row][c]);
                    m.data[r][c] = field.sub(&m.data[r][c], &delta);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<K: Field>(field: &K, rows: Vec<Vec<K::Elem>>, cols: usize) -> usize {
    let mut m = DenseMatrix::<K>::from_rows(rows, cols);
    rref(field, &mut m).len()
}

/// Basis of `ker(M)` for the linear map with the matrix's columns as the
/// domain coordinates (rows are codomain coordinates).
pub fn nullspace<K: Field>(field: &K, rows: Vec<Vec<K::Elem>>, cols: usize) -> Vec<Vec<K::Elem>> {
    let mut m = DenseMatrix::<K>::from_rows(rows, cols);
    let pivots = rref(field, &mut m);
    let pivot_row_of_col: Vec<Option<usize>> = {
        let mut v = vec![None; cols];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = Some(r);
        }
        v
    };
    let mut kernel = Vec::new();
    for free in 0..cols {
        if pivot_row_of_col[free].is_some() {
            continue;
        }
        let mut vec = vec![field.zero(); cols];
        vec[free] = field.one();
        for (c, slot) in pivot_row_of_col.iter().enumerate() {
            if let Some(r) = slot {
                vec[c] = field.neg(&m.data[*r][free]);
            }
        }
        kernel.push(vec);
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, Rationals};

    #[test]
    fn rank_and_kernel_over_q() {
        let f = Rationals;
        let one = || f.one();
        let two = || f.from_i64(2);
        // [1 2; 2 4] has rank 1, kernel spanned by (-2, 1).
        let rows = vec![vec![one(), two()], vec![two(), f.from_i64(4)]];
        assert_eq!(rank(&f, rows.clone(), 2), 1);
        let kernel = nullspace(&f, rows, 2);
        assert_eq!(kernel.len(), 1);
        assert_eq!(kernel[0], vec![f.from_i64(-2), one()]);
    }

    #[test]
    fn kernel_over_f2() {
        let f = PrimeField::new(2);
        // x + y = 0 over F2: kernel spanned by (1,1).
        let rows = vec![vec![1u64, 1u64]];
        let kernel = nullspace(&f, rows, 2);
        assert_eq!(kernel, vec![vec![1, 1]]);
    }
}
