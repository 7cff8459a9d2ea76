//! Square matrices over a prime field acting on coordinate vectors.
//!
//! A vector of F_p^n is the base-p integer `sum v_i p^i`, the same encoding
//! as [`crate::field::Elem`], so a matrix acts directly on field elements
//! viewed through the basis 1, x, ..., x^{n-1}.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MatrixRecord", into = "MatrixRecord")]
pub struct LinearMap {
    p: u32,
    n: usize,
    /// Row-major.
    entries: Vec<u32>,
}

/// Wire form: `{"p": 11, "rows": [[2, 1], [1, 4]]}`. Entries may be
/// negative and are reduced modulo p.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub p: u32,
    pub rows: Vec<Vec<i64>>,
}

impl TryFrom<MatrixRecord> for LinearMap {
    type Error = Error;

    fn try_from(rec: MatrixRecord) -> Result<Self> {
        LinearMap::from_rows(rec.p, &rec.rows)
    }
}

impl From<LinearMap> for MatrixRecord {
    fn from(m: LinearMap) -> Self {
        MatrixRecord {
            p: m.p,
            rows: m.rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect(),
        }
    }
}

impl LinearMap {
    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix must be square and nonempty".into()));
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|&x| x.rem_euclid(p as i64) as u32)
            .collect();
        Ok(LinearMap { p, n, entries })
    }

    /// Builds the matrix whose j-th column is the coordinate vector `cols[j]`.
    pub fn from_column_vectors(p: u32, n: usize, cols: &[u32]) -> Self {
        assert_eq!(cols.len(), n);
        let mut entries = vec![0; n * n];
        for (j, &c) in cols.iter().enumerate() {
            let mut v = c;
            for i in 0..n {
                entries[i * n + j] = v % p;
                v /= p;
            }
        }
        LinearMap { p, n, entries }
    }

    /// The `index`-th matrix in the enumeration of all `p^{n^2}` matrices.
    pub fn from_index(p: u32, n: usize, mut index: u64) -> Self {
        let entries = (0..n * n)
            .map(|_| {
                let c = (index % p as u64) as u32;
                index /= p as u64;
                c
            })
            .collect();
        LinearMap { p, n, entries }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        Self::scalar(p, n, 1)
    }

    pub fn scalar(p: u32, n: usize, c: u32) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = c % p;
        }
        LinearMap { p, n, entries }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n).map(<[u32]>::to_vec).collect()
    }

    /// Column `j` as an encoded vector.
    pub fn column(&self, j: usize) -> u32 {
        (0..self.n).rev().fold(0, |acc, i| acc * self.p + self.get(i, j))
    }

    pub fn columns(&self) -> Vec<u32> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    /// Image of the encoded vector `v`.
    pub fn apply_index(&self, v: u32) -> u32 {
        let p = self.p;
        let mut coords = [0u32; 32];
        let mut x = v;
        for c in coords.iter_mut().take(self.n) {
            *c = x % p;
            x /= p;
        }
        let mut out = 0u32;
        for i in (0..self.n).rev() {
            let row = &self.entries[i * self.n..(i + 1) * self.n];
            let s = row
                .iter()
                .zip(&coords)
                .fold(0u64, |acc, (&a, &b)| acc + a as u64 * b as u64)
                % p as u64;
            out = out * p + s as u32;
        }
        out
    }

    pub fn apply(&self, v: Elem) -> Elem {
        Elem(self.apply_index(v.0))
    }

    pub fn check_field(&self, field: &FieldTable) -> Result<()> {
        if self.p != field.p() || self.n != field.r() as usize {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix over F_{} cannot act on GF({}^{})",
                self.n,
                self.n,
                self.p,
                field.p(),
                field.r()
            )));
        }
        Ok(())
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        assert_eq!((self.p, self.n), (other.p, other.n));
        let n = self.n;
        let p = self.p as u64;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let s: u64 = (0..n)
                    .map(|t| self.get(i, t) as u64 * other.get(t, j) as u64)
                    .sum();
                entries[i * n + j] = (s % p) as u32;
            }
        }
        LinearMap { p: self.p, n, entries }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.rows();
        gauss(&mut m, self.p, None)
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn inverse(&self) -> Option<LinearMap> {
        let n = self.n;
        let mut m = self.rows();
        let mut aug: Vec<Vec<u32>> = (0..n)
            .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
            .collect();
        if gauss(&mut m, self.p, Some(&mut aug)) != n {
            return None;
        }
        Some(LinearMap {
            p: self.p,
            n,
            entries: aug.into_iter().flatten().collect(),
        })
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut acc, mut base, mut exp) = (1u64, a as u64, p as u64 - 2);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// Reduced row echelon form in place; returns the rank. Row operations are
/// mirrored on `aug` when given.
#[allow(clippy::needless_range_loop)]
fn gauss(m: &mut [Vec<u32>], p: u32, mut aug: Option<&mut Vec<Vec<u32>>>) -> usize {
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let pp = p as u64;
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(pivot) = (rank..n_rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        if let Some(a) = aug.as_deref_mut() {
            a.swap(rank, pivot);
        }
        let inv = inv_mod(m[rank][col], p) as u64;
        for x in m[rank].iter_mut() {
            *x = (*x as u64 * inv % pp) as u32;
        }
        if let Some(a) = aug.as_deref_mut() {
            for x in a[rank].iter_mut() {
                *x = (*x as u64 * inv % pp) as u32;
            }
        }
        for i in 0..n_rows {
            if i == rank || m[i][col] == 0 {
                continue;
            }
            let f = m[i][col] as u64;
            for j in 0..n_cols {
                m[i][j] = ((m[i][j] as u64 + pp * pp - f * m[rank][j] as u64) % pp) as u32;
            }
            if let Some(a) = aug.as_deref_mut() {
                for j in 0..a[i].len() {
                    a[i][j] = ((a[i][j] as u64 + pp * pp - f * a[rank][j] as u64) % pp) as u32;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// |GL_n(p)| = prod_{i<n} (p^n - p^i), saturating.
pub fn gl_order(p: u32, n: usize) -> u128 {
    let pn = (p as u128).saturating_pow(n as u32);
    (0..n as u32).fold(1u128, |acc, i| {
        acc.saturating_mul(pn - (p as u128).pow(i))
    })
}

impl fmt::Display for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}
