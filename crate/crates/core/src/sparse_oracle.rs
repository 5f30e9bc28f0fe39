//! Succinctly represented sparse matrices.
//!
//! A [`RowOracleMatrix`] never stores its entries. It holds a procedure that,
//! given a row index, returns the nonzero entries of that row together with
//! the bounds (`sparsity_d`, `entry_bound_k`) that the rest of the crate relies
//! on. Entries are exact integers; floating point only appears once a matrix
//! is handed to a spectral routine.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{ensure, Error, Result};

/// Largest dimension [`RowOracleMatrix::materialize`] accepts by default.
pub const DEFAULT_DENSE_CAP: usize = 1 << 14;

/// Environment variable overriding [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "EXPGAP_DENSE_CAP";

/// The dense materialization cap in effect, honouring [`DENSE_CAP_ENV`].
pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_DENSE_CAP)
}

/// A nonzero entry of a row (or column): `(index, value)`.
pub type Entry = (usize, i64);

/// Procedure returning the nonzero entries of one line of a matrix.
pub type LineFn = dyn Fn(usize) -> Vec<Entry> + Send + Sync;

/// A `dim × dim` integer matrix given by a row-lookup procedure.
#[derive(Clone)]
pub struct RowOracleMatrix {
    dim: usize,
    sparsity_d: usize,
    entry_bound_k: i64,
    column_ones_bound: Option<usize>,
    row_fn: Arc<LineFn>,
    column_fn: Option<Arc<LineFn>>,
}

impl fmt::Debug for RowOracleMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RowOracleMatrix")
            .field("dim", &self.dim)
            .field("sparsity_d", &self.sparsity_d)
            .field("entry_bound_k", &self.entry_bound_k)
            .field("column_ones_bound", &self.column_ones_bound)
            .field("column_oracle", &self.column_fn.is_some())
            .finish()
    }
}

impl RowOracleMatrix {
    pub fn new<F>(dim: usize, sparsity_d: usize, entry_bound_k: i64, row_fn: F) -> Result<Self>
    where
        F: Fn(usize) -> Vec<Entry> + Send + Sync + 'static,
    {
        ensure!(dim > 0, Contract, "matrix dimension must be positive");
        ensure!(sparsity_d > 0, Contract, "sparsity must be positive");
        ensure!(entry_bound_k > 0, Contract, "entry bound must be positive");
        Ok(Self { dim, sparsity_d, entry_bound_k, column_ones_bound: None, row_fn: Arc::new(row_fn), column_fn: None })
    }

    /// Declares the maximum number of `1` entries in any column.
    pub fn with_column_ones_bound(mut self, bound: usize) -> Self {
        self.column_ones_bound = Some(bound);
        self
    }

    /// Attaches a column-lookup procedure (entries `(row, value)` of a column).
    /// Without one, column access falls back to scanning every row.
    pub fn with_column_oracle<F>(mut self, column_fn: F) -> Self
    where
        F: Fn(usize) -> Vec<Entry> + Send + Sync + 'static,
    {
        self.column_fn = Some(Arc::new(column_fn));
        self
    }

    /// Builds an explicit matrix from `(row, column, value)` triples. Zero
    /// values are dropped; repeated coordinates are rejected.
    pub fn from_entries(dim: usize, triples: &[(usize, usize, i64)]) -> Result<Self> {
        ensure!(dim > 0, Contract, "matrix dimension must be positive");
        let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); dim];
        for &(i, j, v) in triples {
            ensure!(i < dim && j < dim, Range, "entry ({i},{j}) outside a {dim}×{dim} matrix");
            ensure!(rows[i].insert(j, v).is_none(), Contract, "duplicate entry at ({i},{j})");
        }
        let rows: Vec<Vec<Entry>> =
            rows.into_iter().map(|r| r.into_iter().filter(|&(_, v)| v != 0).collect()).collect();
        Ok(Self::from_row_lists(rows))
    }

    /// Builds an explicit matrix from fully materialized row lists, deriving
    /// every bound from the data.
    pub(crate) fn from_row_lists(rows: Vec<Vec<Entry>>) -> Self {
        let dim = rows.len();
        let columns = transpose_lists(&rows, dim);
        let sparsity_d = rows.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let entry_bound_k = rows.iter().flatten().map(|&(_, v)| v.abs()).max().unwrap_or(0).max(1);
        let ones = columns.iter().map(|c| c.iter().filter(|&&(_, v)| v == 1).count()).max().unwrap_or(0);
        let rows = Arc::new(rows);
        let columns = Arc::new(columns);
        Self {
            dim,
            sparsity_d,
            entry_bound_k,
            column_ones_bound: Some(ones),
            row_fn: Arc::new(move |i| rows[i].clone()),
            column_fn: Some(Arc::new(move |j| columns[j].clone())),
        }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Ok(Self::new(dim, 1, 1, |i| vec![(i, 1)])?.with_column_ones_bound(1).with_column_oracle(|j| vec![(j, 1)]))
    }

    /// The `ell × ell` lower-bidiagonal adjacency of a self-looped path: row
    /// `i` holds the self-loop `(i, 1)` and the path edge `(i - 1, 1)`.
    pub fn path_adjacency(ell: usize) -> Result<Self> {
        ensure!(ell >= 1, Range, "path block needs ell >= 1, got {ell}");
        Ok(Self::new(ell, 2, 1, |i| if i == 0 { vec![(0, 1)] } else { vec![(i - 1, 1), (i, 1)] })?
            .with_column_ones_bound(2)
            .with_column_oracle(move |j| if j + 1 < ell { vec![(j, 1), (j + 1, 1)] } else { vec![(j, 1)] }))
    }

    /// The `ell × ell` adjacency of the cycle through the start and accept
    /// vertices: vertex `0` plays the accepting configuration (its only edge
    /// goes back to the start vertex `ell - 1`), vertex `ell - 1` is the start
    /// (no self-loop), and every vertex in between carries a self-loop.
    pub fn cycle_adjacency(ell: usize) -> Result<Self> {
        ensure!(ell >= 3, Range, "cycle block needs ell >= 3, got {ell}");
        let last = ell - 1;
        Ok(Self::new(ell, 2, 1, move |i| match i {
            0 => vec![(last, 1)],
            i if i == last => vec![(i - 1, 1)],
            i => vec![(i - 1, 1), (i, 1)],
        })?
        .with_column_ones_bound(2)
        .with_column_oracle(move |j| match j {
            j if j == last => vec![(0, 1)],
            j if j + 1 == last => vec![(j, 1), (last, 1)],
            j if j == 0 => vec![(1, 1)],
            j => vec![(j, 1), (j + 1, 1)],
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sparsity_d(&self) -> usize {
        self.sparsity_d
    }

    pub fn entry_bound_k(&self) -> i64 {
        self.entry_bound_k
    }

    pub fn column_ones_bound(&self) -> Option<usize> {
        self.column_ones_bound
    }

    /// Nonzero entries of row `i`, checked against the declared bounds.
    pub fn row(&self, i: usize) -> Result<Vec<Entry>> {
        ensure!(i < self.dim, Range, "row {i} of a {}×{} matrix", self.dim, self.dim);
        let row = (self.row_fn)(i);
        self.check_line(&row, "row", i)?;
        Ok(row)
    }

    /// Nonzero entries `(row, value)` of column `j`.
    pub fn column(&self, j: usize) -> Result<Vec<Entry>> {
        ensure!(j < self.dim, Range, "column {j} of a {}×{} matrix", self.dim, self.dim);
        match &self.column_fn {
            Some(f) => Ok(f(j)),
            None => {
                let mut col = Vec::new();
                for i in 0..self.dim {
                    if let Some(&(_, v)) = self.row(i)?.iter().find(|&&(c, _)| c == j) {
                        col.push((i, v));
                    }
                }
                Ok(col)
            }
        }
    }

    fn check_line(&self, line: &[Entry], what: &str, at: usize) -> Result<()> {
        ensure!(
            line.len() <= self.sparsity_d,
            Contract,
            "{what} {at} has {} entries, sparsity bound is {}",
            line.len(),
            self.sparsity_d
        );
        for &(j, v) in line {
            ensure!(j < self.dim, Contract, "{what} {at} references index {j} >= {}", self.dim);
            ensure!(
                v != 0 && v.abs() <= self.entry_bound_k,
                Contract,
                "{what} {at} entry {v} violates entry bound {}",
                self.entry_bound_k
            );
        }
        Ok(())
    }

    /// Every row, in order.
    pub fn rows(&self) -> Result<Vec<Vec<Entry>>> {
        (0..self.dim).map(|i| self.row(i)).collect()
    }

    /// Upper bound `entry_bound_k · sparsity_d` on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        self.entry_bound_k as f64 * self.sparsity_d as f64
    }

    pub fn materialize(&self) -> Result<DenseMatrix> {
        self.materialize_with_cap(dense_cap())
    }

    pub fn materialize_with_cap(&self, cap: usize) -> Result<DenseMatrix> {
        ensure!(self.dim <= cap, Resource, "dimension {} exceeds the dense cap {cap}", self.dim);
        let mut m = DMatrix::<i64>::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i)? {
                m[(i, j)] = v;
            }
        }
        if let Some(limit) = self.column_ones_bound {
            for j in 0..self.dim {
                let ones = m.column(j).iter().filter(|&&v| v == 1).count();
                ensure!(ones <= limit, Contract, "column {j} has {ones} ones, declared bound is {limit}");
            }
        }
        Ok(DenseMatrix::new(m))
    }

    /// Row oracle for `Aᵀ A`.
    ///
    /// Requires 0/1 entries and a declared column bound of at most two ones.
    /// Row `j` of the product is assembled from column `j` of `A`: every row
    /// `i` hitting column `j` contributes `A[i][j] · A[i][·]`. When no column
    /// oracle is attached, a transpose index is built once up front.
    pub fn ata_oracle(&self) -> Result<RowOracleMatrix> {
        ensure!(
            self.entry_bound_k == 1,
            Contract,
            "Aᵀ A oracle needs 0/1 entries, entry bound is {}",
            self.entry_bound_k
        );
        let ones = self
            .column_ones_bound
            .ok_or_else(|| Error::Contract("Aᵀ A oracle needs a declared column ones bound".into()))?;
        ensure!(ones <= 2, Contract, "Aᵀ A oracle needs at most two ones per column, bound is {ones}");

        let column: Arc<LineFn> = match &self.column_fn {
            Some(f) => Arc::clone(f),
            None => {
                let columns = Arc::new(transpose_lists(&self.rows()?, self.dim));
                Arc::new(move |j| columns[j].clone())
            }
        };
        let row = Arc::clone(&self.row_fn);
        let product = move |j: usize| -> Vec<Entry> {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (i, a_ij) in column(j) {
                for (k, a_ik) in row(i) {
                    *acc.entry(k).or_insert(0) += a_ij * a_ik;
                }
            }
            acc.into_iter().filter(|&(_, v)| v != 0).collect()
        };
        let product = Arc::new(product);
        let as_column = Arc::clone(&product);
        let sparsity = (self.sparsity_d * ones.max(1)).max(1);
        Ok(RowOracleMatrix {
            dim: self.dim,
            sparsity_d: sparsity,
            entry_bound_k: ones.max(1) as i64,
            column_ones_bound: None,
            row_fn: product,
            column_fn: Some(Arc::new(move |j| as_column(j))),
        })
    }

    /// Returns a copy of this matrix with its dimension padded up to `dim`,
    /// placing `diagonal` on each new diagonal entry.
    pub fn padded(&self, dim: usize, diagonal: i64) -> Result<RowOracleMatrix> {
        ensure!(dim >= self.dim, Contract, "cannot pad {} down to {dim}", self.dim);
        ensure!(diagonal != 0, Contract, "padding diagonal must be nonzero");
        let old = self.dim;
        let row = Arc::clone(&self.row_fn);
        let col = self.column_fn.clone();
        let mut padded =
            RowOracleMatrix::new(dim, self.sparsity_d, self.entry_bound_k.max(diagonal.abs()), move |i| {
                if i < old {
                    row(i)
                } else {
                    vec![(i, diagonal)]
                }
            })?;
        if let Some(col) = col {
            padded = padded.with_column_oracle(move |j| if j < old { col(j) } else { vec![(j, diagonal)] });
        }
        padded.column_ones_bound = match self.column_ones_bound {
            Some(b) if diagonal == 1 => Some(b.max(1)),
            other => other,
        };
        Ok(padded)
    }
}

fn transpose_lists(rows: &[Vec<Entry>], dim: usize) -> Vec<Vec<Entry>> {
    let mut cols = vec![Vec::new(); dim];
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            cols[j].push((i, v));
        }
    }
    cols
}

/// Dense integer materialization of a [`RowOracleMatrix`].
///
/// `symmetric` is decided exactly at construction. `psd` starts unset and is
/// only raised by [`DenseMatrix::verify_psd`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    entries: DMatrix<i64>,
    symmetric: bool,
    psd: bool,
}

impl DenseMatrix {
    pub fn new(entries: DMatrix<i64>) -> Self {
        assert!(entries.is_square(), "dense matrices are square");
        let symmetric = entries == entries.transpose();
        Self { entries, symmetric, psd: false }
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<i64> {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_psd(&self) -> bool {
        self.psd
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.entries.map(|v| v as f64)
    }

    /// Checks positive semidefiniteness with the dense eigensolver and sets
    /// the flag when the smallest eigenvalue is at least `-1e-10`.
    pub fn verify_psd(&mut self) -> Result<bool> {
        ensure!(self.symmetric, Contract, "PSD check needs a symmetric matrix");
        let min = crate::spectral::min_eigenvalue(&self.to_f64())?;
        self.psd = min >= -1e-10;
        Ok(self.psd)
    }

    /// A row oracle reading back from this materialization.
    pub fn to_oracle(&self) -> RowOracleMatrix {
        let rows = (0..self.dim())
            .map(|i| self.entries.row(i).iter().enumerate().filter(|&(_, &v)| v != 0).map(|(j, &v)| (j, v)).collect())
            .collect();
        RowOracleMatrix::from_row_lists(rows)
    }
}
