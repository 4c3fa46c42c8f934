//! Dense matrices over a prime field with exact rank computation.

use alloc::vec::Vec;

use crate::fp::{mul_mod, sub_mod};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        Self {
            p,
            rows,
            cols,
            data: alloc::vec![0; rows * cols],
        }
    }

    pub fn from_rows(p: u64, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut m = Self::zero(p, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            m.data[i * cols..(i + 1) * cols].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn at(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn push_rows(&mut self, rows: &[Vec<u64>]) {
        for row in rows {
            assert_eq!(row.len(), self.cols);
            self.data.extend_from_slice(row);
            self.rows += 1;
        }
    }

    /// Exact rank by fraction-free forward elimination, pivoting on the
    /// first nonzero entry of each column.
    pub fn rank(&self) -> usize {
        let p = self.p;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0usize;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let pivot_row = (rank..rows).find(|&r| m[r * cols + col] != 0);
            let Some(pr) = pivot_row else { continue };
            if pr != rank {
                for c in 0..cols {
                    m.swap(rank * cols + c, pr * cols + c);
                }
            }
            let pivot = m[rank * cols + col];
            for r in (rank + 1)..rows {
                let factor = m[r * cols + col];
                if factor == 0 {
                    continue;
                }
                for c in col..cols {
                    let a = mul_mod(pivot, m[r * cols + c], p);
                    let b = mul_mod(factor, m[rank * cols + c], p);
                    m[r * cols + c] = sub_mod(a, b, p);
                }
            }
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const P: u64 = 1_000_003;

    #[test]
    fn rank_of_identity_and_singular() {
        let id = FpMatrix::from_rows(P, 3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(id.rank(), 3);
        let sing = FpMatrix::from_rows(P, 3, &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(sing.rank(), 2);
        let z = FpMatrix::zero(P, 4, 5);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn rank_of_wide_and_tall() {
        let wide = FpMatrix::from_rows(P, 4, &[vec![1, 1, 1, 1], vec![1, 2, 3, 4]]);
        assert_eq!(wide.rank(), 2);
        let tall = FpMatrix::from_rows(
            P,
            2,
            &[vec![1, 0], vec![0, 1], vec![1, 1], vec![5, 7]],
        );
        assert_eq!(tall.rank(), 2);
    }

    #[test]
    fn rank_mod_p_differs_from_rational_rank() {
        // Rows [1, 1] and [1, 1 + P] coincide mod P.
        let m = FpMatrix::from_rows(P, 2, &[vec![1, 1], vec![1, 1]]);
        assert_eq!(m.rank(), 1);
    }
}
