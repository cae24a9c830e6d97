//! Dense matrices over `GF(p)` with exact row reduction.
//!
//! Rows are the primary axis: a subspace is stored as the row space of its
//! basis matrix, and kernels are returned as row bases.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, PrimeField, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

/// Output of [`Matrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.entries[i * size + i] = 1 % field.modulus();
        }
        m
    }

    /// Build from signed integer rows, reducing every entry modulo `p`.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, cols: usize, rows: &[R]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::WrongLength {
                    expected: cols,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| field.reduce(x)));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Build from row-major residues; entries are reduced modulo `p`.
    pub fn from_residues(field: PrimeField, rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        let p = field.modulus();
        Ok(Matrix {
            field,
            rows,
            cols,
            entries: entries.into_iter().map(|x| x % p).collect(),
        })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u32) {
        self.entries[r * self.cols + c] = value % self.field.modulus();
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Columns selected in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.entries[r * cols.len() + j] = self.get(r, c);
            }
        }
        m
    }

    /// Stack `self` above `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.modulus(), other.field.modulus()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.field.modulus() as u64;
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u64;
                for t in 0..self.cols {
                    acc = (acc + self.get(i, t) as u64 * other.get(t, j) as u64) % p;
                }
                out.entries[i * other.cols + j] = acc as u32;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} plus {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Matrix {
            entries,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        let f = self.field;
        let negated = Matrix {
            entries: other.entries.iter().map(|&x| f.neg(x)).collect(),
            ..other.clone()
        };
        self.add(&negated)
    }

    /// Reduced row echelon form; pivots are the leftmost nonzero column of each row.
    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(pr) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(pr, lead);
            let inv = f.inverse(m.get(lead, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(lead, j), inv);
                m.entries[lead * m.cols + j] = v;
            }
            for r in 0..m.rows {
                if r != lead {
                    let factor = m.get(r, c);
                    if factor != 0 {
                        for j in c..m.cols {
                            let v = f.sub(m.get(r, j), f.mul(factor, m.get(lead, j)));
                            m.entries[r * m.cols + j] = v;
                        }
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        Rref {
            reduced: m,
            rank: pivots.len(),
            pivots,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        rank_in_place(self.field, &mut self.entries.clone(), self.rows, self.cols)
    }

    /// The first `rank` rows of the RREF: the canonical basis of the row space.
    pub fn row_space_basis(&self) -> Matrix {
        let Rref { reduced, rank, .. } = self.rref();
        Matrix {
            field: self.field,
            rows: rank,
            cols: self.cols,
            entries: reduced.entries[..rank * self.cols].to_vec(),
        }
    }

    /// Canonical row basis of the right null space `{x : self * x = 0}`.
    pub fn kernel_basis(&self) -> Matrix {
        let f = self.field;
        let Rref { reduced, pivots, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(f, free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            k.entries[i * self.cols + fc] = 1 % f.modulus();
            for (r, &pc) in pivots.iter().enumerate() {
                k.entries[i * self.cols + pc] = f.neg(reduced.get(r, fc));
            }
        }
        k.row_space_basis()
    }
}

/// Rank of a row-major `rows x cols` buffer, destroying its contents.
///
/// Allocation-free so hot search loops can reuse a scratch buffer.
pub fn rank_in_place(field: PrimeField, buf: &mut [u32], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pr) = (rank..rows).find(|&r| buf[r * cols + c] != 0) else {
            continue;
        };
        if pr != rank {
            for j in 0..cols {
                buf.swap(pr * cols + j, rank * cols + j);
            }
        }
        let inv = field.inverse(buf[rank * cols + c]).expect("pivot is nonzero");
        for r in rank + 1..rows {
            let factor = field.mul(buf[r * cols + c], inv);
            if factor != 0 {
                for j in c..cols {
                    buf[r * cols + j] = field.sub(buf[r * cols + j], field.mul(factor, buf[rank * cols + j]));
                }
            }
        }
        rank += 1;
    }
    rank
}
