//! Dense max-plus matrices.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::TropScalar;

/// A dense row-major matrix over `Q ∪ {-inf}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TropScalar>,
}

impl TropMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<TropScalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols} has no entries")));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(TropMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<TropScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidShape("ragged rows".into()));
        }
        TropMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix from integers, with `None` standing for `-inf`.
    pub fn from_ints<R: AsRef<[Option<i64>]>>(rows: &[R]) -> Result<Self> {
        TropMatrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.as_ref()
                        .iter()
                        .map(|e| e.map_or(TropScalar::BOTTOM, TropScalar::int))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> TropScalar) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        TropMatrix { rows, cols, entries }
    }

    pub fn identity(n: usize) -> Self {
        TropMatrix::from_fn(n, n, |i, j| if i == j { TropScalar::UNIT } else { TropScalar::BOTTOM })
    }

    pub fn bottom(rows: usize, cols: usize) -> Self {
        TropMatrix::from_fn(rows, cols, |_, _| TropScalar::BOTTOM)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn order(&self, op: &'static str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { op, rows: self.rows, cols: self.cols })
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> TropScalar {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: TropScalar) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[TropScalar] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[TropScalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<TropScalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_all_bottom(&self) -> bool {
        self.entries.iter().all(TropScalar::is_bottom)
    }

    pub fn transpose(&self) -> TropMatrix {
        TropMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> TropMatrix {
        TropMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    pub fn map(&self, f: impl Fn(TropScalar) -> TropScalar) -> TropMatrix {
        TropMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|&x| f(x)).collect() }
    }

    /// Tropical scalar multiple: adds `alpha` to every entry.
    pub fn shift(&self, alpha: TropScalar) -> TropMatrix {
        self.map(|x| x + alpha)
    }

    /// Iterator over `(i, j, value)` for finite entries.
    pub fn finite_entries(&self) -> impl Iterator<Item = (usize, usize, TropScalar)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, x)| x.is_finite())
            .map(move |(k, &x)| (k / self.cols, k % self.cols, x))
    }

    /// Max-plus product.
    pub fn otimes(&self, rhs: &TropMatrix) -> Result<TropMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { op: "mat_mul", left: self.shape(), right: rhs.shape() });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &TropMatrix) -> TropMatrix {
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![TropScalar::BOTTOM; n * p];
        for i in 0..n {
            let row = &self.entries[i * m..(i + 1) * m];
            let acc = &mut out[i * p..(i + 1) * p];
            for (k, &a) in row.iter().enumerate() {
                if a.is_bottom() {
                    continue;
                }
                let rrow = &rhs.entries[k * p..(k + 1) * p];
                for (slot, &b) in acc.iter_mut().zip(rrow) {
                    let v = a + b;
                    if v > *slot {
                        *slot = v;
                    }
                }
            }
        }
        TropMatrix { rows: n, cols: p, entries: out }
    }

    /// Entrywise maximum (tropical sum).
    pub fn oplus(&self, rhs: &TropMatrix) -> Result<TropMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch { op: "mat_max", left: self.shape(), right: rhs.shape() });
        }
        Ok(TropMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| (*a).max(*b)).collect(),
        })
    }

    /// `t`-fold product by iterated multiplication; `A^0 = I`.
    pub fn pow(&self, t: u64) -> Result<TropMatrix> {
        let n = self.order("mat_pow")?;
        let mut acc = TropMatrix::identity(n);
        for _ in 0..t {
            acc = acc.mul_unchecked(self);
        }
        Ok(acc)
    }

    /// Same value as [`TropMatrix::pow`], by repeated squaring.
    pub fn pow_by_squaring(&self, mut t: u64) -> Result<TropMatrix> {
        let n = self.order("mat_pow")?;
        let mut acc = TropMatrix::identity(n);
        let mut base = self.clone();
        while t > 0 {
            if t & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            t >>= 1;
            if t > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(acc)
    }

    /// Ordinary sum of the diagonal; bottom if any diagonal entry is bottom.
    pub fn trace(&self) -> Result<TropScalar> {
        let n = self.order("trace")?;
        Ok((0..n).fold(TropScalar::UNIT, |acc, i| acc + self.get(i, i)))
    }

    /// First entry where `self` and `other` differ, if any.
    pub fn first_difference(&self, other: &TropMatrix) -> Option<(usize, usize)> {
        if self.shape() != other.shape() {
            return Some((0, 0));
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .position(|(a, b)| a != b)
            .map(|k| (k / self.cols, k % self.cols))
    }

    /// Column vector `col` times row vector `row`.
    pub fn outer(col: &[TropScalar], row: &[TropScalar]) -> TropMatrix {
        TropMatrix::from_fn(col.len(), row.len(), |i, j| col[i] + row[j])
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect(),
        }
    }

    pub fn from_file(file: &MatrixFile) -> Result<Self> {
        if file.entries.len() != file.rows || file.entries.iter().any(|r| r.len() != file.cols) {
            return Err(Error::InvalidShape(format!(
                "declared {}x{} does not match the entry array",
                file.rows, file.cols
            )));
        }
        let rows = file
            .entries
            .iter()
            .map(|r| r.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        TropMatrix::from_rows(rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("matrix serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(s)?;
        TropMatrix::from_file(&file)
    }
}

/// On-disk matrix format: entries are `"-inf"`, integers, or `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl Serialize for TropMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TropMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = MatrixFile::deserialize(deserializer)?;
        TropMatrix::from_file(&file).map_err(serde::de::Error::custom)
    }
}

/// Panics on a dimension mismatch; use [`TropMatrix::otimes`] for the checked form.
impl Mul for &TropMatrix {
    type Output = TropMatrix;

    fn mul(self, rhs: &TropMatrix) -> TropMatrix {
        assert_eq!(self.cols, rhs.rows, "max-plus product dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

/// Compact text form: rows separated by `;`, entries by whitespace or commas,
/// e.g. `"0 1; -inf 0"`.
impl FromStr for TropMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split(';')
            .map(|row| {
                row.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(str::parse)
                    .collect::<Result<Vec<TropScalar>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        TropMatrix::from_rows(rows)
    }
}

impl fmt::Display for TropMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

/// `mat_mul` in functional form.
pub fn mat_mul(a: &TropMatrix, b: &TropMatrix) -> Result<TropMatrix> {
    a.otimes(b)
}

/// `mat_max` in functional form.
pub fn mat_max(a: &TropMatrix, b: &TropMatrix) -> Result<TropMatrix> {
    a.oplus(b)
}
