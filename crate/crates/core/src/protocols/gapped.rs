use serde::Serialize;

use super::Verifier;
use crate::error::{ensure, Result};
use crate::simulator::{expm_taylor, one_bit_pe, CMatrix, EvolutionParams, Gate, QuantumCircuit, Statevector};
use crate::sparse_oracle::RowOracleMatrix;
use crate::spectral::min_eigenpair;

/// Largest gap exponent whose `ε` stays well above double-precision
/// roundoff at `t = π/(k·d)`.
pub const MAX_GAP_EXPONENT: u32 = 12;

/// `ε = 2^{-2g} t² / 16`.
pub fn gapped_epsilon(g: u32, evo_time: f64) -> f64 {
    (-2.0 * g as f64).exp2() * evo_time * evo_time / 16.0
}

/// The matrix padded to a power-of-two dimension together with its
/// truncated-Taylor evolution operator.
#[derive(Debug, Clone)]
pub struct GappedSetup {
    pub matrix: RowOracleMatrix,
    pub original_dim: usize,
    pub gap_exponent: u32,
    pub params: EvolutionParams,
    pub unitary: CMatrix,
}

impl GappedSetup {
    /// Pads with unit diagonal entries, which stay above any `2^{-g}` gap.
    pub fn new(m: &RowOracleMatrix, g: u32) -> Result<Self> {
        ensure!(
            g <= MAX_GAP_EXPONENT,
            Config,
            "gap exponent {g} puts ε below the double-precision floor (at most {MAX_GAP_EXPONENT})"
        );
        let padded = m.padded(m.dim().next_power_of_two(), 1)?;
        let evo_time = std::f64::consts::PI / padded.norm_bound().max(1.0);
        let params = EvolutionParams::for_oracle(&padded, gapped_epsilon(g, evo_time))?;
        let unitary = expm_taylor(&padded, params.evo_time, params.taylor_order)?;
        Ok(Self { matrix: padded, original_dim: m.dim(), gap_exponent: g, params, unitary })
    }

    pub fn qubits(&self) -> usize {
        self.matrix.dim().trailing_zeros() as usize
    }

    pub fn epsilon(&self) -> f64 {
        self.params.target_error
    }

    /// `x = 2^{-g} t`, the phase of the smallest allowed nonzero eigenvalue.
    pub fn gap_phase(&self) -> f64 {
        (-(self.gap_exponent as f64)).exp2() * self.params.evo_time
    }

    pub fn completeness_bound(&self) -> f64 {
        1.0 - self.epsilon()
    }

    /// `(1 + cos x)/2` plus the effect of an `ε` operator-norm error on the
    /// outcome probability.
    pub fn soundness_bound(&self) -> f64 {
        let eps = self.epsilon();
        (1.0 + self.gap_phase().cos()) / 2.0 + eps + eps * eps / 4.0
    }

    pub fn acceptance(&self, witness: &Statevector) -> Result<f64> {
        one_bit_pe(&self.unitary, witness)
    }

    /// Unit eigenvector of the smallest eigenvalue, zero-padded.
    pub fn best_witness(&self) -> Result<(f64, Statevector)> {
        let dense = self.matrix.materialize()?.to_f64();
        let (lambda, v) = min_eigenpair(&dense)?;
        Ok((lambda, Statevector::normalized_real(&v)?))
    }
}

/// Outcome-0 probability of one-bit phase estimation on `e^{-iMt}` with
/// `t = π/(k·d)`, the exponential truncated at the least Taylor order whose
/// remainder is below `2^{-2g} t²/16`.
pub fn gapped_verifier(m: &RowOracleMatrix, g: u32, witness: &Statevector) -> Result<f64> {
    GappedSetup::new(m, g)?.acceptance(witness)
}

#[derive(Debug, Clone, Serialize)]
pub struct GappedDecision {
    pub yes: bool,
    pub acceptance: f64,
    pub threshold: f64,
    /// Distance of the acceptance from the bound it had to clear: above the
    /// soundness bound on YES, below the completeness bound on NO.
    pub separation: f64,
    pub min_eigenvalue: f64,
    pub completeness_bound: f64,
    pub soundness_bound: f64,
    pub epsilon: f64,
    pub evo_time: f64,
    pub taylor_order: usize,
}

/// Runs the verifier on the smallest eigenvector and answers YES when its
/// acceptance exceeds the midpoint of the completeness and soundness bounds.
pub fn decide_gapped(m: &RowOracleMatrix, g: u32) -> Result<GappedDecision> {
    let setup = GappedSetup::new(m, g)?;
    let (min_eigenvalue, witness) = setup.best_witness()?;
    let acceptance = setup.acceptance(&witness)?;
    let (c, s) = (setup.completeness_bound(), setup.soundness_bound());
    let threshold = (c + s) / 2.0;
    let yes = acceptance > threshold;
    Ok(GappedDecision {
        yes,
        acceptance,
        threshold,
        separation: if yes { acceptance - s } else { c - acceptance },
        min_eigenvalue,
        completeness_bound: c,
        soundness_bound: s,
        epsilon: setup.epsilon(),
        evo_time: setup.params.evo_time,
        taylor_order: setup.params.taylor_order,
    })
}

/// Best-witness acceptance on a YES and a NO instance sharing `g`.
#[derive(Debug, Clone, Serialize)]
pub struct GappedPair {
    pub completeness: f64,
    pub soundness: f64,
    pub separation: f64,
    pub epsilon: f64,
    pub evo_time: f64,
    pub taylor_order: usize,
    pub gap_exponent: u32,
}

/// The smallest eigenvector maximizes acceptance, since acceptance on
/// `Σ α_j v_j` is `Σ |α_j|² (1 + cos λ_j t)/2` with every `λ_j t` in `[0, π]`.
pub fn gapped_pair(yes: &RowOracleMatrix, no: &RowOracleMatrix, g: u32) -> Result<GappedPair> {
    let y = decide_gapped(yes, g)?;
    let n = decide_gapped(no, g)?;
    ensure!(
        y.evo_time == n.evo_time && y.taylor_order == n.taylor_order,
        Contract,
        "instances evolve with different parameters"
    );
    Ok(GappedPair {
        completeness: y.acceptance,
        soundness: n.acceptance,
        separation: y.acceptance - n.acceptance,
        epsilon: y.epsilon,
        evo_time: y.evo_time,
        taylor_order: y.taylor_order,
        gap_exponent: g,
    })
}

/// The verifier as a circuit: the witness on the matrix register and one
/// ancilla acting as the phase-estimation control, flipped at the end so
/// that accepting means reading 1.
pub fn gapped_verifier_circuit(name: &str, setup: &GappedSetup) -> Result<Verifier> {
    let n = setup.qubits();
    let control = n;
    let circuit = QuantumCircuit::with_gates(
        n + 1,
        [
            Gate::H(control),
            Gate::controlled_unchecked(vec![control], (0..n).collect(), setup.unitary.clone())?,
            Gate::H(control),
            Gate::X(control),
        ],
    )?;
    Verifier::new(name, circuit, n, 1, control, setup.completeness_bound(), setup.soundness_bound().min(1.0 - 1e-12))
}
