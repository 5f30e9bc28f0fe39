//! Verifiers and the protocols built on them.
//!
//! A [`Verifier`] runs its circuit on `witness ⊗ |0^k⟩` (witness on the
//! leading qubits) and accepts when the output qubit reads 1.

mod amplify;
mod energy;
mod gapped;
mod kitaev;

pub use amplify::{nwz_amplify, yes_operator, AmplificationOutcome, AmplificationParams, Decision};
pub use energy::{binary_search_energy, EnergySearch};
pub use gapped::{
    decide_gapped, gapped_epsilon, gapped_pair, gapped_verifier, gapped_verifier_circuit, GappedDecision, GappedPair,
    GappedSetup, MAX_GAP_EXPONENT,
};
pub use kitaev::{epsilon_rule, kitaev_hamiltonian, precise_lh_bounds, LocalTerm, PreciseBounds, PreciseLHInstance};

use std::path::Path;

use nalgebra::linalg::Schur;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{ensure, Error, Result};
use crate::simulator::{hermiticity_error, CMatrix, CVector, Gate, QuantumCircuit, MAX_UNITARY_QUBITS};
use crate::spectral::hermitian_eigen;

#[derive(Debug, Clone, PartialEq)]
pub struct Verifier {
    pub name: String,
    pub circuit: QuantumCircuit,
    pub witness_qubits: usize,
    pub ancilla_k: usize,
    pub output_qubit: usize,
    pub completeness_c: f64,
    pub soundness_s: f64,
}

impl Verifier {
    pub fn new(
        name: impl Into<String>,
        circuit: QuantumCircuit,
        witness_qubits: usize,
        ancilla_k: usize,
        output_qubit: usize,
        completeness_c: f64,
        soundness_s: f64,
    ) -> Result<Self> {
        ensure!(
            witness_qubits + ancilla_k == circuit.num_qubits(),
            Contract,
            "{witness_qubits} witness + {ancilla_k} ancilla qubits for a {}-qubit circuit",
            circuit.num_qubits()
        );
        ensure!(output_qubit < circuit.num_qubits(), Range, "output qubit {output_qubit}");
        ensure!(
            0.0 <= soundness_s && soundness_s < completeness_c && completeness_c <= 1.0,
            Contract,
            "need 0 <= s < c <= 1, got c = {completeness_c}, s = {soundness_s}"
        );
        Ok(Self { name: name.into(), circuit, witness_qubits, ancilla_k, output_qubit, completeness_c, soundness_s })
    }

    /// Gate count of the circuit.
    pub fn gate_count_t(&self) -> usize {
        self.circuit.size()
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "circuit": self.circuit.to_json(),
            "witness_qubits": self.witness_qubits,
            "ancilla_k": self.ancilla_k,
            "output_qubit": self.output_qubit,
            "completeness": self.completeness_c,
            "soundness": self.soundness_s,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let field = |key: &str| v.get(key).ok_or_else(|| Error::Parse(format!("verifier without {key:?}")));
        let count = |key: &str| -> Result<usize> {
            field(key)?.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("{key:?} is not a count")))
        };
        let real = |key: &str| -> Result<f64> {
            field(key)?.as_f64().ok_or_else(|| Error::Parse(format!("{key:?} is not a number")))
        };
        Self::new(
            v.get("name").and_then(Value::as_str).unwrap_or("verifier"),
            QuantumCircuit::from_json_value(field("circuit")?)?,
            count("witness_qubits")?,
            count("ancilla_k")?,
            count("output_qubit")?,
            real("completeness")?,
            real("soundness")?,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Columns `|j⟩ ⊗ |0^k⟩` of the circuit unitary, for every witness basis
    /// state `j`.
    fn witness_columns(&self) -> Result<(CMatrix, CMatrix)> {
        let u = self.circuit.unitary()?;
        let stride = 1 << self.ancilla_k;
        let cols: Vec<_> = (0..1 << self.witness_qubits).map(|j| u.column(j * stride).into_owned()).collect();
        Ok((u.clone(), CMatrix::from_columns(&cols)))
    }
}

/// `Q_x`, the compression of `V† |1⟩⟨1|_out V` to inputs with clean ancillas.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptOperator {
    pub m: usize,
    pub matrix: CMatrix,
}

impl AcceptOperator {
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigen(&self.matrix)?.0)
    }

    /// `⟨ψ|Q|ψ⟩`.
    pub fn expectation(&self, psi: &CVector) -> f64 {
        psi.dotc(&(&self.matrix * psi)).re
    }
}

fn output_rows(v: &Verifier) -> impl Iterator<Item = usize> + '_ {
    let n = v.num_qubits();
    let bit = 1 << (n - 1 - v.output_qubit);
    (0..1usize << n).filter(move |r| r & bit != 0)
}

pub fn accept_operator(v: &Verifier) -> Result<AcceptOperator> {
    ensure!(v.num_qubits() <= MAX_UNITARY_QUBITS, Resource, "{} qubits exceeds the dense cap", v.num_qubits());
    let (_, cols) = v.witness_columns()?;
    let dim = cols.ncols();
    let mut q = CMatrix::zeros(dim, dim);
    for r in output_rows(v) {
        for i in 0..dim {
            let a = cols[(r, i)].conj();
            for j in 0..dim {
                q[(i, j)] += a * cols[(r, j)];
            }
        }
    }
    Ok(AcceptOperator { m: v.witness_qubits, matrix: q })
}

/// Acceptance on the maximally mixed witness, `2^{-m} tr Q_x`.
pub fn mixed_witness_acceptance(v: &Verifier) -> Result<f64> {
    let q = accept_operator(v)?;
    Ok(q.trace() / (1u64 << q.m) as f64)
}

/// `R0 = 2Π0 − I` with `Π0 = I ⊗ |0^k⟩⟨0^k|`, and `R1 = 2Π1 − I` with
/// `Π1 = V† |1⟩⟨1|_out V`.
pub fn reflections(v: &Verifier) -> Result<(CMatrix, CMatrix)> {
    ensure!(v.num_qubits() <= MAX_UNITARY_QUBITS, Resource, "{} qubits exceeds the dense cap", v.num_qubits());
    let (u, _) = v.witness_columns()?;
    let dim = u.nrows();
    let ancilla_mask = (1usize << v.ancilla_k) - 1;
    let mut r0 = -CMatrix::identity(dim, dim);
    for i in (0..dim).filter(|i| i & ancilla_mask == 0) {
        r0[(i, i)] = Complex64::new(1.0, 0.0);
    }
    let mut accepting = CMatrix::zeros(dim, dim);
    for r in output_rows(v) {
        accepting[(r, r)] = Complex64::new(1.0, 0.0);
    }
    let pi1 = u.adjoint() * accepting * &u;
    let r1 = pi1 * Complex64::new(2.0, 0.0) - CMatrix::identity(dim, dim);
    Ok((r0, r1))
}

/// Orthonormal eigenbasis and eigenvalues of a normal matrix, read off its
/// complex Schur form.
pub(crate) fn normal_eigen(w: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let (z, t) = Schur::new(w.clone()).unpack();
    let off: f64 = (0..t.nrows())
        .flat_map(|i| (0..i).map(move |j| (i, j)).chain((i + 1..t.ncols()).map(move |j| (i, j))))
        .map(|(i, j)| t[(i, j)].norm())
        .fold(0.0, f64::max);
    ensure!(off <= 1e-8, Contract, "matrix is not normal (Schur off-diagonal {off:.3e})");
    Ok((t.diagonal().iter().copied().collect(), z))
}

/// Eigenphases of `R1 R0` against the spectrum of `Q_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanPairing {
    /// Every eigenphase of `R1 R0`, in `(−π, π]`.
    pub phases: Vec<f64>,
    /// Nontrivial positive eigenphases, ascending.
    pub positive: Vec<f64>,
    /// Magnitudes of the nontrivial negative eigenphases, ascending.
    pub negative: Vec<f64>,
    /// `cos²(θ/2)` over the positive phases, ascending.
    pub cos_squared: Vec<f64>,
    /// Eigenvalues of `Q_x` strictly inside `(0, 1)`, ascending.
    pub interior_q: Vec<f64>,
}

impl JordanPairing {
    /// Largest mismatch between `+θ` and `−θ` phases.
    pub fn pairing_error(&self) -> f64 {
        if self.positive.len() != self.negative.len() {
            return f64::INFINITY;
        }
        self.positive.iter().zip(&self.negative).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Largest mismatch between `cos²(θ/2)` and the interior spectrum of `Q_x`.
    pub fn spectrum_error(&self) -> f64 {
        if self.cos_squared.len() != self.interior_q.len() {
            return f64::INFINITY;
        }
        self.cos_squared.iter().zip(&self.interior_q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Largest mismatch between the positive phases and `2 arccos √p_j`.
    pub fn angle_error(&self) -> f64 {
        if self.positive.len() != self.interior_q.len() {
            return f64::INFINITY;
        }
        let mut predicted: Vec<f64> = self.interior_q.iter().map(|p| 2.0 * p.sqrt().acos()).collect();
        predicted.sort_by(f64::total_cmp);
        self.positive.iter().zip(&predicted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Phases within `tol` of `0` or `π`, and `Q_x` eigenvalues within `tol` of
/// `0` or `1`, count as trivial.
pub fn jordan_pairing(v: &Verifier, tol: f64) -> Result<JordanPairing> {
    let (r0, r1) = reflections(v)?;
    let (values, _) = normal_eigen(&(r1 * r0))?;
    let phases: Vec<f64> = values.iter().map(|z| z.arg()).collect();
    let nontrivial = |p: &f64| p.abs() > tol && p.abs() < std::f64::consts::PI - tol;
    let mut positive: Vec<f64> = phases.iter().copied().filter(|p| nontrivial(p) && *p > 0.0).collect();
    let mut negative: Vec<f64> = phases.iter().copied().filter(|p| nontrivial(p) && *p < 0.0).map(f64::abs).collect();
    positive.sort_by(f64::total_cmp);
    negative.sort_by(f64::total_cmp);
    let mut cos_squared: Vec<f64> = positive.iter().map(|p| (p / 2.0).cos().powi(2)).collect();
    cos_squared.sort_by(f64::total_cmp);
    let q = accept_operator(v)?;
    let interior_q = q.eigenvalues()?.into_iter().filter(|&p| p > tol && p < 1.0 - tol).collect();
    Ok(JordanPairing { phases, positive, negative, cos_squared, interior_q })
}

/// Verifier on `m + 1` qubits whose accept operator is the given PSD
/// contraction `Q`: rotate into the eigenbasis of `Q`, load `√p_j` onto
/// the ancilla, rotate back.
pub fn dilation_verifier(name: &str, q: &CMatrix, completeness_c: f64, soundness_s: f64) -> Result<Verifier> {
    let herm = hermiticity_error(q);
    ensure!(herm <= 1e-10, Contract, "operator is not Hermitian (error {herm:.3e})");
    let (values, vectors) = hermitian_eigen(q)?;
    ensure!(
        values.iter().all(|&p| (-1e-10..=1.0 + 1e-10).contains(&p)),
        Contract,
        "eigenvalues outside [0, 1]: {values:?}"
    );
    let dim = q.nrows();
    let m = dim.trailing_zeros() as usize;
    ensure!(dim == 1 << m, Contract, "dimension {dim} is not a power of two");
    let mut load = CMatrix::zeros(2 * dim, 2 * dim);
    for (j, &p) in values.iter().enumerate() {
        let p = p.clamp(0.0, 1.0);
        let (c, s) = ((1.0 - p).sqrt(), p.sqrt());
        load[(2 * j, 2 * j)] = Complex64::new(c, 0.0);
        load[(2 * j, 2 * j + 1)] = Complex64::new(-s, 0.0);
        load[(2 * j + 1, 2 * j)] = Complex64::new(s, 0.0);
        load[(2 * j + 1, 2 * j + 1)] = Complex64::new(c, 0.0);
    }
    let witness: Vec<usize> = (0..m).collect();
    let circuit = QuantumCircuit::with_gates(
        m + 1,
        [
            Gate::unitary(witness.clone(), vectors.adjoint())?,
            Gate::unitary((0..=m).collect(), load)?,
            Gate::unitary(witness, vectors)?,
        ],
    )?;
    Verifier::new(name, circuit, m, 1, m, completeness_c, soundness_s)
}
