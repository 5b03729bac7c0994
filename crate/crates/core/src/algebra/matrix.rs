//! Dense matrices over a prime field.
//!
//! Rows are downloaded answer symbols, columns are source symbols (message
//! symbols followed by common-randomness symbols). The rank of a row subset is
//! the q-ary entropy of those answers, because every source is uniform and
//! independent.

use std::fmt;

use crate::algebra::field::PrimeField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>, // row-major, every entry reduced
}

impl FieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from explicit rows. Entries are reduced modulo `q`.
    pub fn from_rows(field: PrimeField, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row of length {} in a matrix with {} columns",
                    row.len(),
                    cols
                )));
            }
            data.extend(row.iter().map(|v| v % field.modulus()));
        }
        Ok(Self { field, rows: rows.len(), cols, data })
    }

    /// Parse rows written as bit strings, e.g. `["110", "011"]`. Binary field only.
    pub fn from_bit_rows(rows: &[&str]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.bytes().map(|b| u64::from(b == b'1')).collect())
            .collect();
        Self::from_rows(PrimeField::binary(), cols, &rows).expect("ragged bit rows")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.field.modulus();
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: &[u64]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!(
                "pushing row of length {} onto {} columns",
                row.len(),
                self.cols
            )));
        }
        self.data.extend(row.iter().map(|v| v % self.field.modulus()));
        self.rows += 1;
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Keep only the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self { field: self.field, rows: rows.len(), cols: self.cols, data }
    }

    /// Keep only the columns whose mask entry is `true`.
    pub fn select_columns(&self, keep: &[bool]) -> Self {
        assert_eq!(keep.len(), self.cols, "column mask length");
        let cols = keep.iter().filter(|&&k| k).count();
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend(
                self.row(r)
                    .iter()
                    .zip(keep)
                    .filter(|(_, &k)| k)
                    .map(|(&v, _)| v),
            );
        }
        Self { field: self.field, rows: self.rows, cols, data }
    }

    /// `x · M` for a row vector `x`.
    pub fn left_mul(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.rows {
            return Err(Error::Dimension(format!(
                "left vector of length {} against {} rows",
                x.len(),
                self.rows
            )));
        }
        let f = self.field;
        let mut out = vec![0u64; self.cols];
        for (r, &coeff) in x.iter().enumerate() {
            if coeff == 0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(coeff % f.modulus(), v));
            }
        }
        Ok(out)
    }

    /// Row rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..cols {
                    m.swap(p * cols + k, rank * cols + k);
                }
            }
            let inv = f.inv(m[rank * cols + c]).expect("nonzero pivot");
            for k in c..cols {
                m[rank * cols + k] = f.mul(m[rank * cols + k], inv);
            }
            for r in rank + 1..rows {
                let factor = m[r * cols + c];
                if factor == 0 {
                    continue;
                }
                for k in c..cols {
                    let v = f.mul(factor, m[rank * cols + k]);
                    m[r * cols + k] = f.sub(m[r * cols + k], v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Find `x` with `x · M = target`, or `None` when `target` is outside the row space.
    pub fn solve_left(&self, target: &[u64]) -> Result<Option<Vec<u64>>> {
        if target.len() != self.cols {
            return Err(Error::Dimension(format!(
                "target of length {} against {} columns",
                target.len(),
                self.cols
            )));
        }
        let f = self.field;
        let (rows, cols) = (self.rows, self.cols);
        // Each working row carries the combination of original rows that produced it.
        let mut work: Vec<(Vec<u64>, Vec<u64>)> = (0..rows)
            .map(|r| {
                let mut comb = vec![0u64; rows];
                comb[r] = 1;
                (self.row(r).to_vec(), comb)
            })
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (column, working row)
        let mut next = 0;
        for c in 0..cols {
            let Some(p) = (next..rows).find(|&r| work[r].0[c] != 0) else {
                continue;
            };
            work.swap(p, next);
            let inv = f.inv(work[next].0[c]).expect("nonzero pivot");
            scale(f, &mut work[next], inv);
            for r in 0..rows {
                if r != next && work[r].0[c] != 0 {
                    let factor = work[r].0[c];
                    let (pivot, other) = pick_two(&mut work, next, r);
                    axpy(f, other, pivot, factor);
                }
            }
            pivots.push((c, next));
            next += 1;
            if next == rows {
                break;
            }
        }

        let mut residual = target.iter().map(|v| v % f.modulus()).collect::<Vec<_>>();
        let mut x = vec![0u64; rows];
        for &(c, r) in &pivots {
            let factor = residual[c];
            if factor == 0 {
                continue;
            }
            let (vals, comb) = &work[r];
            for (res, &v) in residual.iter_mut().zip(vals) {
                *res = f.sub(*res, f.mul(factor, v));
            }
            for (xi, &v) in x.iter_mut().zip(comb) {
                *xi = f.add(*xi, f.mul(factor, v));
            }
        }
        if residual.iter().any(|&v| v != 0) {
            return Ok(None);
        }
        Ok(Some(x))
    }
}

fn scale(f: PrimeField, row: &mut (Vec<u64>, Vec<u64>), by: u64) {
    for v in row.0.iter_mut().chain(row.1.iter_mut()) {
        *v = f.mul(*v, by);
    }
}

/// `other -= factor * pivot` on both halves.
fn axpy(f: PrimeField, other: &mut (Vec<u64>, Vec<u64>), pivot: &(Vec<u64>, Vec<u64>), factor: u64) {
    for (o, &p) in other.0.iter_mut().zip(&pivot.0) {
        *o = f.sub(*o, f.mul(factor, p));
    }
    for (o, &p) in other.1.iter_mut().zip(&pivot.1) {
        *o = f.sub(*o, f.mul(factor, p));
    }
}

fn pick_two<T>(v: &mut [T], a: usize, b: usize) -> (&T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(u64::to_string).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Size of the largest linearly independent row subset, found by trying
    /// every subset and checking that no nontrivial combination vanishes.
    fn brute_force_rank(m: &FieldMatrix) -> usize {
        let q = m.field().modulus();
        let f = m.field();
        let rows = m.rows();
        let mut best = 0;
        for mask in 0u32..(1 << rows) {
            let subset: Vec<usize> = (0..rows).filter(|r| mask >> r & 1 == 1).collect();
            if subset.len() <= best {
                continue;
            }
            // Enumerate all coefficient vectors over the subset.
            let n = subset.len() as u32;
            let total = q.pow(n);
            let independent = (1..total).all(|mut code| {
                let mut acc = vec![0u64; m.cols()];
                for &r in &subset {
                    let c = code % q;
                    code /= q;
                    for (a, &v) in acc.iter_mut().zip(m.row(r)) {
                        *a = f.add(*a, f.mul(c, v));
                    }
                }
                acc.iter().any(|&v| v != 0)
            });
            if independent {
                best = subset.len();
            }
        }
        best
    }

    /// All vectors in the span of the rows, for small binary matrices.
    fn span_size_binary(rows: &[u32]) -> usize {
        let mut span = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << rows.len()) {
            let v = rows
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u32, |acc, (_, &r)| acc ^ r);
            span.insert(v);
        }
        span.len()
    }

    #[test]
    fn rank_examples() {
        let f = PrimeField::binary();
        assert_eq!(FieldMatrix::zeros(f, 3, 3).rank(), 0);
        assert_eq!(FieldMatrix::identity(f, 4).rank(), 4);

        // {110, 011, 101} spans 4 vectors of F_2^3, so its rank is 2.
        assert_eq!(span_size_binary(&[0b110, 0b011, 0b101]), 4);
        let m = FieldMatrix::from_bit_rows(&["110", "011", "101"]);
        assert_eq!(m.rank(), 2);
        assert_eq!(brute_force_rank(&m), 2);
    }

    #[test]
    fn solve_left_examples() {
        let m = FieldMatrix::from_bit_rows(&["110", "011", "001"]);
        assert_eq!(m.solve_left(m.row(1)).unwrap(), Some(vec![0, 1, 0]));

        let m = FieldMatrix::from_bit_rows(&["110", "011"]);
        assert_eq!(m.solve_left(&[0, 0, 1]).unwrap(), None);

        // Exhaustive over the four combinations: only {1,1} reaches 101.
        let hits: Vec<(u64, u64)> = (0..4u64)
            .map(|c| (c & 1, c >> 1))
            .filter(|&(x0, x1)| m.left_mul(&[x0, x1]).unwrap() == vec![1, 0, 1])
            .collect();
        assert_eq!(hits, vec![(1, 1)]);
        assert_eq!(m.solve_left(&[1, 0, 1]).unwrap(), Some(vec![1, 1]));
    }

    #[test]
    fn dimension_errors() {
        let m = FieldMatrix::identity(PrimeField::binary(), 2);
        assert!(m.solve_left(&[1, 0, 0]).is_err());
        assert!(m.left_mul(&[1]).is_err());
        assert!(FieldMatrix::from_rows(PrimeField::binary(), 2, &[vec![1]]).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = FieldMatrix> {
        (prop::sample::select(vec![2u64, 3, 5]), 1usize..=6, 1usize..=6).prop_flat_map(|(q, r, c)| {
            prop::collection::vec(prop::collection::vec(0..q, c), r).prop_map(move |rows| {
                FieldMatrix::from_rows(PrimeField::new(q).unwrap(), c, &rows).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rank_matches_subset_enumeration(m in arb_matrix()) {
            let r = m.rank();
            prop_assert_eq!(r, brute_force_rank(&m));
            prop_assert!(r <= m.rows().min(m.cols()));
            prop_assert_eq!(r, m.transpose().rank());
        }

        #[test]
        fn solve_left_iff_rank_stays(m in arb_matrix(), seed in any::<u64>()) {
            let q = m.field().modulus();
            let target: Vec<u64> = (0..m.cols())
                .map(|i| (seed >> (i * 3)) % q)
                .collect();
            let mut stacked = m.clone();
            stacked.push_row(&target).unwrap();
            let grows = stacked.rank() == m.rank() + 1;
            match m.solve_left(&target).unwrap() {
                Some(x) => {
                    prop_assert!(!grows);
                    prop_assert_eq!(m.left_mul(&x).unwrap(), target);
                }
                None => prop_assert!(grows),
            }
        }
    }
}
