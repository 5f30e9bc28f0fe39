//! Exact determinants, the Chebyshev description of the path/cycle Gram
//! blocks, and the dense eigensolver every spectral claim is checked against.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::sparse_oracle::{DenseMatrix, RowOracleMatrix};

/// Largest dimension accepted by [`det_cycle_cover`].
pub const CYCLE_COVER_MAX_DIM: usize = 10;

/// Symmetry tolerance for the dense eigensolver.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Path,
    Cycle,
}

impl std::str::FromStr for BlockKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(Self::Path),
            "cycle" => Ok(Self::Cycle),
            other => Err(Error::Parse(format!("unknown block kind {other:?}"))),
        }
    }
}

/// Gram matrix `Aᵀ A` of one connected piece of the augmented
/// configuration graph.
#[derive(Debug, Clone)]
pub struct StructuredBlock {
    pub kind: BlockKind,
    pub ell: usize,
    pub matrix: DenseMatrix,
}

/// Builds the exact integer Gram block.
///
/// `Path`: tridiagonal, diagonal `(2, …, 2, 1)`, off-diagonal `1`.
/// `Cycle`: a leading `(ell-1)`-block with diagonal `(1, 2, …, 2)` and
/// off-diagonal `1`, plus a decoupled trailing `1`.
pub fn structured_matrix(kind: BlockKind, ell: usize) -> Result<StructuredBlock> {
    let m = match kind {
        BlockKind::Path => {
            ensure!(ell >= 1, Range, "path block needs ell >= 1");
            DMatrix::from_fn(ell, ell, |i, j| match () {
                _ if i == j && i + 1 == ell => 1,
                _ if i == j => 2,
                _ if i.abs_diff(j) == 1 => 1,
                _ => 0,
            })
        }
        BlockKind::Cycle => {
            ensure!(ell >= 3, Range, "cycle block needs ell >= 3");
            let last = ell - 1;
            DMatrix::from_fn(ell, ell, |i, j| match () {
                _ if i == last || j == last => i64::from(i == j),
                _ if i == j && i == 0 => 1,
                _ if i == j => 2,
                _ if i.abs_diff(j) == 1 => 1,
                _ => 0,
            })
        }
    };
    Ok(StructuredBlock { kind, ell, matrix: DenseMatrix::new(m) })
}

/// Determinant as the signed sum over cycle covers.
///
/// Each cover contributes the product of its edge weights times `-1` per
/// cycle of even length. Covers are enumerated by always extending the
/// cycle through the smallest uncovered vertex, so each is visited once.
pub fn det_cycle_cover(a: &DMatrix<i64>) -> Result<i128> {
    ensure!(a.is_square(), Contract, "determinant of a non-square matrix");
    let n = a.nrows();
    ensure!(
        n <= CYCLE_COVER_MAX_DIM,
        Resource,
        "cycle-cover enumeration is capped at dimension {CYCLE_COVER_MAX_DIM}, got {n}"
    );
    let mut covered = vec![false; n];
    Ok(covers(a, &mut covered))
}

fn covers(a: &DMatrix<i64>, covered: &mut [bool]) -> i128 {
    let Some(start) = covered.iter().position(|&c| !c) else {
        return 1;
    };
    covered[start] = true;
    let total = extend_cycle(a, covered, start, start, 1, 1);
    covered[start] = false;
    total
}

fn extend_cycle(a: &DMatrix<i64>, covered: &mut [bool], start: usize, at: usize, len: usize, weight: i128) -> i128 {
    let n = a.nrows();
    let mut total = 0i128;
    for next in 0..n {
        let w = a[(at, next)] as i128;
        if w == 0 {
            continue;
        }
        if next == start {
            let sign = if len % 2 == 0 { -1 } else { 1 };
            total += sign * weight * w * covers(a, covered);
        } else if !covered[next] {
            covered[next] = true;
            total += extend_cycle(a, covered, start, next, len + 1, weight * w);
            covered[next] = false;
        }
    }
    total
}

/// Fraction-free Gaussian elimination over the integers.
pub fn det_bareiss(a: &DMatrix<i64>) -> Result<i128> {
    ensure!(a.is_square(), Contract, "determinant of a non-square matrix");
    let n = a.nrows();
    if n == 0 {
        return Ok(1);
    }
    let overflow = || Error::Resource("integer overflow in fraction-free elimination".into());
    let mut m: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)] as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        let pivot = m[k][k];
        for i in k + 1..n {
            let lead = m[i][k];
            for j in k + 1..n {
                let v = m[i][j]
                    .checked_mul(pivot)
                    .and_then(|x| x.checked_sub(lead.checked_mul(m[k][j])?))
                    .ok_or_else(overflow)?;
                m[i][j] = v / prev;
            }
            m[i][k] = 0;
        }
        prev = pivot;
    }
    Ok(sign * m[n - 1][n - 1])
}

/// Exact determinant of a sparse oracle matrix.
///
/// The undirected nonzero pattern splits into connected components; after a
/// symmetric permutation (which leaves the determinant unchanged) the matrix
/// is block diagonal, so the determinant is the product of block
/// determinants, each computed with [`det_bareiss`].
pub fn det_sparse(m: &RowOracleMatrix) -> Result<i128> {
    let rows = m.rows()?;
    let blocks = components(&rows);
    let mut det = 1i128;
    for block in blocks {
        let local: std::collections::HashMap<usize, usize> = block.iter().enumerate().map(|(p, &v)| (v, p)).collect();
        let mut sub = DMatrix::<i64>::zeros(block.len(), block.len());
        for (p, &v) in block.iter().enumerate() {
            for &(j, val) in &rows[v] {
                sub[(p, local[&j])] = val;
            }
        }
        let d = det_bareiss(&sub)?;
        if d == 0 {
            return Ok(0);
        }
        det = det.checked_mul(d).ok_or_else(|| Error::Resource("determinant overflow".into()))?;
    }
    Ok(det)
}

/// Smallest eigenvalue of a symmetric oracle matrix, taken over the dense
/// blocks of its connected components.
pub fn min_eigenvalue_sparse(m: &RowOracleMatrix) -> Result<f64> {
    let rows = m.rows()?;
    let mut best = f64::INFINITY;
    for block in components(&rows) {
        let local: std::collections::HashMap<usize, usize> = block.iter().enumerate().map(|(p, &v)| (v, p)).collect();
        let mut sub = DMatrix::<f64>::zeros(block.len(), block.len());
        for (p, &v) in block.iter().enumerate() {
            for &(j, val) in &rows[v] {
                sub[(p, local[&j])] = val as f64;
            }
        }
        best = best.min(min_eigenvalue(&sub)?);
    }
    Ok(best)
}

/// Connected components of the undirected nonzero pattern, each sorted.
pub fn components(rows: &[Vec<(usize, i64)>]) -> Vec<Vec<usize>> {
    let n = rows.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, row) in rows.iter().enumerate() {
        for &(j, _) in row {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

/// `q_n(x)` from `q_0 = 1`, `q_1 = x`, `q_n = x q_{n-1} - q_{n-2}`.
pub fn chebyshev_q(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        (prev, cur) = (cur, x * cur - prev);
    }
    cur
}

/// Characteristic polynomial `p_ell(λ) = q_ell(2-λ) - q_{ell-1}(2-λ)` of
/// the path Gram block.
pub fn char_poly_p(ell: usize, lambda: f64) -> f64 {
    let x = 2.0 - lambda;
    if ell == 0 {
        return 1.0;
    }
    chebyshev_q(ell, x) - chebyshev_q(ell - 1, x)
}

/// Which zero-angle formula to use for the path block spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroFormula {
    /// Angles `(2k-1)π/(2ell+1)`, the zeros of `cos((2ell+1)θ/2)`.
    Corrected,
    /// Angles `2kπ/(2ell+1)`, kept for comparison.
    AsPrinted,
}

fn zero_angles(ell: usize, formula: ZeroFormula) -> impl Iterator<Item = f64> {
    let denom = (2 * ell + 1) as f64;
    (1..=ell).map(move |k| {
        let num = match formula {
            ZeroFormula::Corrected => (2 * k - 1) as f64,
            ZeroFormula::AsPrinted => (2 * k) as f64,
        };
        num * std::f64::consts::PI / denom
    })
}

/// Zeros `x = 2cos θ` of `q_ell(x) - q_{ell-1}(x)` under the chosen formula.
pub fn difference_zeros(ell: usize, formula: ZeroFormula) -> Vec<f64> {
    zero_angles(ell, formula).map(|t| 2.0 * t.cos()).collect()
}

/// Eigenvalues `2(1 - cos θ_k)` of the `ell × ell` path block, ascending.
pub fn closed_form_eigenvalues(ell: usize) -> Vec<f64> {
    closed_form_eigenvalues_with(ell, ZeroFormula::Corrected)
}

pub fn closed_form_eigenvalues_with(ell: usize, formula: ZeroFormula) -> Vec<f64> {
    let mut v: Vec<f64> = zero_angles(ell, formula).map(|t| 2.0 * (1.0 - t.cos())).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Closed-form spectrum of a structured block. The cycle block is the path
/// block of size `ell - 1` (reversed) plus the decoupled eigenvalue 1.
pub fn closed_form_block_spectrum(kind: BlockKind, ell: usize) -> Vec<f64> {
    match kind {
        BlockKind::Path => closed_form_eigenvalues(ell),
        BlockKind::Cycle => {
            let mut v = closed_form_eigenvalues(ell - 1);
            v.push(1.0);
            v.sort_by(f64::total_cmp);
            v
        }
    }
}

/// Smallest eigenvalue of the path block, `2(1 - cos(π/(2ell+1)))`.
pub fn path_gap(ell: usize) -> f64 {
    let t = std::f64::consts::PI / (2 * ell + 1) as f64;
    // 2(1 - cos t) = 4 sin²(t/2), without cancellation.
    4.0 * (t / 2.0).sin().powi(2)
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    ensure!(a.is_square(), Contract, "eigensolver needs a square matrix");
    let asym = (a - a.transpose()).amax();
    ensure!(asym <= SYMMETRY_TOL, Contract, "matrix is not symmetric (max |A - Aᵀ| = {asym:e})");
    Ok(())
}

/// Dense symmetric eigendecomposition: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_symmetric(a)?;
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), a.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(a)?;
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> Result<f64> {
    Ok(symmetric_eigenvalues(a)?[0])
}

/// Smallest eigenvalue with a unit eigenvector.
pub fn min_eigenpair(a: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let (values, vectors) = symmetric_eigen(a)?;
    Ok((values[0], vectors.column(0).into_owned()))
}

/// Dense Hermitian eigendecomposition, ascending.
pub fn hermitian_eigen(a: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    ensure!(a.is_square(), Contract, "eigensolver needs a square matrix");
    let asym = (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    ensure!(asym <= SYMMETRY_TOL, Contract, "matrix is not Hermitian (max |A - A†| = {asym:e})");
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), a.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// The `k`-th smallest (0-based) eigenvalue of a symmetric tridiagonal
/// matrix by Sturm-sequence bisection. `off[i]` couples rows `i` and `i+1`.
pub fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> Result<f64> {
    let n = diag.len();
    ensure!(n > 0 && off.len() + 1 == n, Contract, "tridiagonal shape mismatch");
    ensure!(k < n, Range, "eigenvalue index {k} of a {n}×{n} matrix");
    let radius = |i: usize| {
        let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < n { off[i].abs() } else { 0.0 };
        l + r
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    // Number of eigenvalues strictly below x.
    let below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            let coupling = if i > 0 { off[i - 1] * off[i - 1] / q } else { 0.0 };
            q = diag[i] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * scale;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest eigenvalue of the `ell × ell` path Gram block from its
/// tridiagonal structure.
pub fn path_min_eigenvalue(ell: usize) -> Result<f64> {
    ensure!(ell >= 1, Range, "path block needs ell >= 1");
    let mut diag = vec![2.0; ell];
    diag[ell - 1] = 1.0;
    tridiagonal_eigenvalue(&diag, &vec![1.0; ell - 1], 0)
}

/// Dense spectrum of a structured block alongside its closed form.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub min_eig: f64,
    pub closed_form: Option<Vec<f64>>,
    pub max_abs_discrepancy: f64,
}

pub fn spectrum_report(kind: BlockKind, ell: usize) -> Result<SpectrumReport> {
    let block = structured_matrix(kind, ell)?;
    let eigenvalues = symmetric_eigenvalues(&block.matrix.to_f64())?;
    let closed = closed_form_block_spectrum(kind, ell);
    let max_abs_discrepancy = eigenvalues.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(SpectrumReport { min_eig: eigenvalues[0], eigenvalues, closed_form: Some(closed), max_abs_discrepancy })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
