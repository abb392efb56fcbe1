//! Compressed sparse row matrices with pattern-first assembly.

use std::io::Write;
use std::ops::Range;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseMatrix {
    /// Sums duplicate entries. Rows keep their columns sorted.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
        symmetric: bool,
    ) -> SparseMatrix {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) outside {nrows}x{ncols}");
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..nrows {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|k| (cols[k], vals[k])));
            scratch.sort_by_key(|e| e.0);
            for &(j, v) in &scratch {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix { nrows, ncols, row_ptr, col_idx, values, symmetric }
    }

    /// Zero matrix carrying the union pattern of the given dense index blocks.
    /// Each block couples every index in it with every other.
    pub fn with_block_pattern<'a>(
        n: usize,
        blocks: impl Iterator<Item = &'a [usize]> + Clone,
        symmetric: bool,
    ) -> SparseMatrix {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for block in blocks {
            for &i in block {
                rows[i].extend_from_slice(block);
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
            *row = Vec::new();
        }
        let values = vec![0.0; col_idx.len()];
        SparseMatrix { nrows: n, ncols: n, row_ptr, col_idx, values, symmetric }
    }

    /// Adds a dense element block into an existing pattern.
    pub fn scatter_add<const N: usize>(&mut self, dofs: &[usize; N], block: &[[f64; N]; N]) {
        for (a, &i) in dofs.iter().enumerate() {
            let start = self.row_ptr[i];
            let cols = &self.col_idx[start..self.row_ptr[i + 1]];
            for (b, &j) in dofs.iter().enumerate() {
                let pos = cols.binary_search(&j).expect("entry outside the assembled pattern");
                self.values[start + pos] += block[a][b];
            }
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric_flag(&self) -> bool {
        self.symmetric
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = Aᵀ x`.
    pub fn transpose_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
        y
    }

    /// `xᵀ A x` for square matrices.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                x[i] * cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum::<f64>()
            })
            .sum()
    }

    /// Contiguous block `A[rows, cols]`.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> SparseMatrix {
        let symmetric = self.symmetric && rows == cols;
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in rows.clone() {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                if cols.contains(&j) {
                    col_idx.push(j - cols.start);
                    values.push(x);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix { nrows: rows.len(), ncols: cols.len(), row_ptr, col_idx, values, symmetric }
    }

    /// Largest `|A_ij - A_ji|` over the stored pattern.
    pub fn asymmetry(&self) -> f64 {
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] += v;
        }
        d
    }

    /// Coordinate text dump, one `i j value` line per stored entry.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i} {j} {v:.17e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 2, 1.0), (0, 2, 2.0), (1, 0, -1.0), (0, 0, 4.0)], false);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 2), 3.0);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![7.0, -1.0]);
        assert_eq!(a.transpose_mul_vec(&[1.0, 2.0]), vec![2.0, 0.0, 3.0]);
    }

    #[test]
    fn block_pattern_and_submatrix() {
        let blocks: Vec<[usize; 2]> = vec![[0, 1], [1, 2]];
        let mut a = SparseMatrix::with_block_pattern(3, blocks.iter().map(|b| &b[..]), true);
        for b in &blocks {
            a.scatter_add(b, &[[2.0, -1.0], [-1.0, 2.0]]);
        }
        assert_eq!(a.get(1, 1), 4.0);
        assert_eq!(a.get(0, 2), 0.0);
        assert_eq!(a.asymmetry(), 0.0);
        let s = a.submatrix(1..3, 0..2);
        assert_eq!(s.to_dense(), vec![vec![-1.0, 4.0], vec![0.0, -1.0]]);
        assert_eq!(a.quad_form(&[1.0, 1.0, 1.0]), 4.0);
    }
}
