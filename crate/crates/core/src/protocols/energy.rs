use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{ensure, Result};
use crate::simulator::{hermiticity_error, CMatrix};

pub const MAX_BITS: u32 = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySearch {
    pub lower: f64,
    pub upper: f64,
    /// Bracket width before the first and after every bisection step.
    pub widths: Vec<f64>,
}

impl EnergySearch {
    pub fn estimate(&self) -> f64 {
        (self.lower + self.upper) / 2.0
    }
}

/// `λ_min(H) > θ`, decided by whether `H − θI` admits a Cholesky factor.
///
/// The factorization runs on the real symmetric form `[[A, −B], [B, A]]` of
/// `H = A + iB`, which has the spectrum of `H` with doubled multiplicities.
pub fn energy_above(h: &CMatrix, theta: f64) -> bool {
    let n = h.nrows();
    let real = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        let v = match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        };
        if i == j {
            v - theta
        } else {
            v
        }
    });
    real.cholesky().is_some()
}

/// Bisects a Gershgorin bracket of `λ_min(H)` until it is at most
/// `2^{-bits}` wide.
pub fn binary_search_energy(h: &CMatrix, bits: u32) -> Result<EnergySearch> {
    ensure!(bits <= MAX_BITS, Config, "{bits} bits exceeds {MAX_BITS}");
    ensure!(h.is_square() && h.nrows() > 0, Contract, "Hamiltonian must be a nonempty square matrix");
    let herm = hermiticity_error(h);
    ensure!(herm <= 1e-12, Contract, "matrix is not Hermitian (error {herm:.3e})");
    let n = h.nrows();
    let (mut lower, mut upper) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| h[(i, j)].norm()).sum();
        lower = lower.min(h[(i, i)].re - radius);
        upper = upper.max(h[(i, i)].re + radius);
    }
    // Widen by a hair so that both ends are strict.
    let pad = 1e-9 * (1.0 + upper.abs().max(lower.abs()));
    lower -= pad;
    upper += pad;
    let target = (-(bits as f64)).exp2();
    let mut widths = vec![upper - lower];
    while upper - lower > target {
        let mid = (lower + upper) / 2.0;
        if energy_above(h, mid) {
            lower = mid;
        } else {
            upper = mid;
        }
        widths.push(upper - lower);
    }
    Ok(EnergySearch { lower, upper, widths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::to_complex;
    use crate::spectral::{min_eigenvalue, structured_matrix, BlockKind};
    use nalgebra::DVector;

    #[test]
    fn diagonal_to_ten_bits() {
        let h = to_complex(&DMatrix::from_diagonal(&DVector::from_vec(vec![0.375, 1.0])));
        let s = binary_search_energy(&h, 10).unwrap();
        assert!(s.upper - s.lower <= (-10f64).exp2());
        assert!((s.estimate() - 0.375).abs() <= (-10f64).exp2());
        assert!(s.lower <= 0.375 && 0.375 <= s.upper);
    }

    #[test]
    fn widths_halve() {
        let h = to_complex(&structured_matrix(BlockKind::Path, 16).unwrap().matrix.to_f64());
        let s = binary_search_energy(&h, 30).unwrap();
        for w in s.widths.windows(2) {
            assert!((w[1] - w[0] / 2.0).abs() <= 1e-15);
        }
        let exact = min_eigenvalue(&structured_matrix(BlockKind::Path, 16).unwrap().matrix.to_f64()).unwrap();
        assert!((s.estimate() - exact).abs() <= (-30f64).exp2() + 1e-10);
    }

    #[test]
    fn rejects_excess_precision() {
        let h = CMatrix::identity(2, 2);
        assert!(binary_search_energy(&h, 41).is_err());
    }
}
