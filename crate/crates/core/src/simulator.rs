//! Exact statevector simulation.
//!
//! Qubit 0 is the most significant bit of a basis index, so the state
//! `|a⟩ ⊗ |b⟩` of an `m`-qubit and a `k`-qubit register has index
//! `a · 2^k + b`. Every probability is computed from amplitudes.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::error::{ensure, Error, Result};
use crate::protocols::Verifier;
use crate::sparse_oracle::{Entry, RowOracleMatrix};
use crate::spectral::hermitian_eigen;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 20;
/// Largest register for which a circuit's full unitary is built.
pub const MAX_UNITARY_QUBITS: usize = 12;
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unitarity tolerance for injected gates.
pub const GATE_UNITARY_TOL: f64 = 1e-10;
/// Unitarity tolerance for the operator fed to [`one_bit_pe`].
pub const PE_UNITARY_TOL: f64 = 1e-8;
pub const MAX_TAYLOR_ORDER: usize = 400;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Largest entry of `a − b` in absolute value.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn unitarity_error(u: &CMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(u.nrows(), u.ncols()))
}

pub fn hermiticity_error(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

/// Spectral norm (largest singular value).
pub fn operator_norm(a: &CMatrix) -> f64 {
    a.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

fn qubits_for(dim: usize) -> Result<usize> {
    ensure!(dim.is_power_of_two(), Contract, "dimension {dim} is not a power of two");
    Ok(dim.trailing_zeros() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: CVector,
}

impl Statevector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        ensure!(n <= MAX_QUBITS, Resource, "{n} qubits exceeds the {MAX_QUBITS}-qubit cap");
        ensure!(index < 1 << n, Range, "basis index {index} on {n} qubits");
        let mut amplitudes = CVector::zeros(1 << n);
        amplitudes[index] = ONE;
        Ok(Self { num_qubits: n, amplitudes })
    }

    /// Wraps amplitudes whose squared norm is 1 within `1e-10`.
    pub fn from_amplitudes(amplitudes: CVector) -> Result<Self> {
        let n = qubits_for(amplitudes.len())?;
        ensure!(n <= MAX_QUBITS, Resource, "{n} qubits exceeds the {MAX_QUBITS}-qubit cap");
        let norm = amplitudes.norm_squared();
        ensure!((norm - 1.0).abs() <= 1e-10, Contract, "state has squared norm {norm}");
        Ok(Self { num_qubits: n, amplitudes })
    }

    /// Rescales a nonzero real vector to a unit state.
    pub fn normalized_real(v: &DVector<f64>) -> Result<Self> {
        let norm = v.norm();
        ensure!(norm > 0.0, Contract, "zero vector");
        Self::from_amplitudes(v.map(|x| Complex64::new(x / norm, 0.0)))
    }

    /// Haar-random state.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Result<Self> {
        ensure!(n <= MAX_QUBITS, Resource, "{n} qubits exceeds the {MAX_QUBITS}-qubit cap");
        let v = CVector::from_fn(1 << n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let norm = v.norm();
        Self::from_amplitudes(v / Complex64::new(norm, 0.0))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        ensure!(n <= MAX_QUBITS, Resource, "{n} qubits exceeds the {MAX_QUBITS}-qubit cap");
        Ok(Self { num_qubits: n, amplitudes: self.amplitudes.kronecker(&other.amplitudes) })
    }

    /// Probability that measuring `qubit` yields 1.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        ensure!(qubit < self.num_qubits, Range, "qubit {qubit} of {}", self.num_qubits);
        let bit = 1 << (self.num_qubits - 1 - qubit);
        Ok(self.amplitudes.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Outcome distribution of measuring the listed qubits; outcome `y` reads
    /// the qubits in list order, most significant first.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for &q in qubits {
            ensure!(q < self.num_qubits, Range, "qubit {q} of {}", self.num_qubits);
        }
        let mut dist = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let y = qubits.iter().fold(0, |y, &q| (y << 1) | ((i >> (self.num_qubits - 1 - q)) & 1));
            dist[y] += a.norm_sqr();
        }
        Ok(dist)
    }
}

/// Gate set: `H`, `X`, `T`, `CNOT`, and dense (optionally controlled)
/// unitaries on any list of targets.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    T(usize),
    Cnot { control: usize, target: usize },
    Unitary { controls: Vec<usize>, targets: Vec<usize>, matrix: CMatrix },
}

impl Gate {
    pub fn unitary(targets: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        Self::controlled(Vec::new(), targets, matrix)
    }

    pub fn controlled(controls: Vec<usize>, targets: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let err = unitarity_error(&matrix);
        ensure!(err <= GATE_UNITARY_TOL, Contract, "gate matrix is not unitary (error {err:.3e})");
        Self::controlled_unchecked(controls, targets, matrix)
    }

    pub(crate) fn controlled_unchecked(controls: Vec<usize>, targets: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        ensure!(!targets.is_empty(), Contract, "gate without targets");
        let size = 1usize << targets.len();
        ensure!(
            matrix.nrows() == size && matrix.ncols() == size,
            Contract,
            "{}x{} matrix on {} targets",
            matrix.nrows(),
            matrix.ncols(),
            targets.len()
        );
        Ok(Gate::Unitary { controls, targets, matrix })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::T(_) => "T",
            Gate::Cnot { .. } => "CNOT",
            Gate::Unitary { controls, .. } if controls.is_empty() => "U",
            Gate::Unitary { .. } => "CU",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::T(q) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Unitary { controls, targets, .. } => controls.iter().chain(targets).copied().collect(),
        }
    }

    /// `(controls, targets, matrix)` form of the gate.
    pub fn parts(&self) -> (Vec<usize>, Vec<usize>, CMatrix) {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            Gate::H(q) => {
                let h = FRAC_1_SQRT_2;
                (vec![], vec![*q], CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]))
            }
            Gate::X(q) => (vec![], vec![*q], CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])),
            Gate::T(q) => {
                let phase = Complex64::from_polar(1.0, PI / 4.0);
                (vec![], vec![*q], CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, phase]))
            }
            Gate::Cnot { control, target } => {
                (vec![*control], vec![*target], CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
            }
            Gate::Unitary { controls, targets, matrix } => (controls.clone(), targets.clone(), matrix.clone()),
        }
    }

    fn apply(&self, amplitudes: &mut [Complex64], n: usize) {
        let (controls, targets, matrix) = self.parts();
        let bit = |q: usize| 1usize << (n - 1 - q);
        let target_mask: usize = targets.iter().map(|&q| bit(q)).sum();
        let control_mask: usize = controls.iter().map(|&q| bit(q)).sum();
        let k = targets.len();
        let offsets: Vec<usize> = (0..1usize << k)
            .map(|s| (0..k).filter(|&b| (s >> (k - 1 - b)) & 1 == 1).map(|b| bit(targets[b])).sum())
            .collect();
        let mut buf = vec![ZERO; offsets.len()];
        for base in 0..amplitudes.len() {
            if base & target_mask != 0 || base & control_mask != control_mask {
                continue;
            }
            for (slot, &off) in buf.iter_mut().zip(&offsets) {
                *slot = amplitudes[base + off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                amplitudes[base + off] = buf.iter().enumerate().map(|(c, b)| matrix[(r, c)] * b).sum();
            }
        }
    }

    fn to_json(&self) -> Value {
        let matrix_json = |m: &CMatrix| -> Value {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect::<Vec<_>>())
                .collect::<Vec<_>>()
                .into()
        };
        match self {
            Gate::H(q) | Gate::X(q) | Gate::T(q) => json!([self.name(), q]),
            Gate::Cnot { control, target } => json!(["CNOT", control, target]),
            Gate::Unitary { controls, targets, matrix } if controls.is_empty() => {
                json!(["U", targets, matrix_json(matrix)])
            }
            Gate::Unitary { controls, targets, matrix } => json!(["CU", controls, targets, matrix_json(matrix)]),
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed gate {v}"));
        let items = v.as_array().ok_or_else(bad)?;
        let name = items.first().and_then(Value::as_str).ok_or_else(bad)?;
        let index = |i: usize| items.get(i).and_then(Value::as_u64).map(|q| q as usize).ok_or_else(bad);
        let list = |i: usize| -> Result<Vec<usize>> {
            let arr = items.get(i).and_then(Value::as_array).ok_or_else(bad)?;
            arr.iter().map(|q| q.as_u64().map(|q| q as usize).ok_or_else(bad)).collect()
        };
        let matrix = |i: usize| -> Result<CMatrix> {
            let rows = items.get(i).and_then(Value::as_array).ok_or_else(bad)?;
            let n = rows.len();
            let mut m = CMatrix::zeros(n, n);
            for (r, row) in rows.iter().enumerate() {
                let row = row.as_array().filter(|row| row.len() == n).ok_or_else(bad)?;
                for (c, z) in row.iter().enumerate() {
                    let pair = z.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
                    let re = pair[0].as_f64().ok_or_else(bad)?;
                    let im = pair[1].as_f64().ok_or_else(bad)?;
                    m[(r, c)] = Complex64::new(re, im);
                }
            }
            Ok(m)
        };
        let expect_len = |len: usize| if items.len() == len { Ok(()) } else { Err(bad()) };
        match name {
            "H" | "X" | "T" => {
                expect_len(2)?;
                let q = index(1)?;
                Ok(match name {
                    "H" => Gate::H(q),
                    "X" => Gate::X(q),
                    _ => Gate::T(q),
                })
            }
            "CNOT" => {
                expect_len(3)?;
                Ok(Gate::Cnot { control: index(1)?, target: index(2)? })
            }
            "U" => {
                expect_len(3)?;
                Gate::unitary(list(1)?, matrix(2)?)
            }
            "CU" => {
                expect_len(4)?;
                Gate::controlled(list(1)?, list(2)?, matrix(3)?)
            }
            other => Err(Error::Parse(format!("unknown gate {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl QuantumCircuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        ensure!(num_qubits <= MAX_QUBITS, Resource, "{num_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap");
        Ok(Self { num_qubits, gates: Vec::new() })
    }

    pub fn with_gates(num_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(num_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        let qubits = gate.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            ensure!(q < self.num_qubits, Range, "{} acts on qubit {q} of {}", gate.name(), self.num_qubits);
            ensure!(!qubits[..i].contains(&q), Contract, "{} repeats qubit {q}", gate.name());
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Gate count.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn apply(&self, state: &mut Statevector) -> Result<()> {
        ensure!(
            state.num_qubits == self.num_qubits,
            Contract,
            "{}-qubit circuit applied to a {}-qubit state",
            self.num_qubits,
            state.num_qubits
        );
        let amplitudes = state.amplitudes.as_mut_slice();
        for g in &self.gates {
            g.apply(amplitudes, self.num_qubits);
        }
        Ok(())
    }

    /// Full unitary, column `j` being the image of basis state `j`.
    pub fn unitary(&self) -> Result<CMatrix> {
        ensure!(
            self.num_qubits <= MAX_UNITARY_QUBITS,
            Resource,
            "{} qubits exceeds the {MAX_UNITARY_QUBITS}-qubit unitary cap",
            self.num_qubits
        );
        let dim = 1 << self.num_qubits;
        let mut u = CMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut s = Statevector::basis(self.num_qubits, j)?;
            self.apply(&mut s)?;
            u.set_column(j, &s.amplitudes);
        }
        Ok(u)
    }

    /// Uniformly random gates from `{H, X, T, CNOT}`.
    pub fn random(num_qubits: usize, size: usize, seed: u64) -> Result<Self> {
        ensure!(num_qubits >= 2, Config, "random circuits need two qubits");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Self::new(num_qubits)?;
        for _ in 0..size {
            let q = rng.gen_range(0..num_qubits);
            let gate = match rng.gen_range(0..4) {
                0 => Gate::H(q),
                1 => Gate::X(q),
                2 => Gate::T(q),
                _ => {
                    let t = (q + rng.gen_range(1..num_qubits)) % num_qubits;
                    Gate::Cnot { control: q, target: t }
                }
            };
            c.push(gate)?;
        }
        Ok(c)
    }

    pub fn to_json(&self) -> Value {
        json!({ "qubits": self.num_qubits, "gates": self.gates.iter().map(Gate::to_json).collect::<Vec<_>>() })
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let n =
            v.get("qubits").and_then(Value::as_u64).ok_or_else(|| Error::Parse("circuit without \"qubits\"".into()))?;
        let gates =
            v.get("gates").and_then(Value::as_array).ok_or_else(|| Error::Parse("circuit without \"gates\"".into()))?;
        Self::with_gates(n as usize, gates.iter().map(Gate::from_json).collect::<Result<Vec<_>>>()?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn run_circuit(circuit: &QuantumCircuit, state: &Statevector) -> Result<Statevector> {
    let mut out = state.clone();
    circuit.apply(&mut out)?;
    Ok(out)
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian
/// matrix with the phases of `R`'s diagonal divided out.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// `e^{-iAt}` through the eigendecomposition of a Hermitian `A`.
pub fn expm_exact(a: &CMatrix, evo_time: f64) -> Result<CMatrix> {
    let err = hermiticity_error(a);
    ensure!(err <= HERMITIAN_TOL, Contract, "matrix is not Hermitian (error {err:.3e})");
    let (values, vectors) = hermitian_eigen(a)?;
    let phases =
        CVector::from_iterator(values.len(), values.iter().map(|&l| Complex64::from_polar(1.0, -l * evo_time)));
    let mut scaled = vectors.clone();
    for (j, p) in phases.iter().enumerate() {
        let mut col = scaled.column_mut(j);
        col *= *p;
    }
    Ok(scaled * vectors.adjoint())
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `x^{K+1}/(K+1)! · e^x`, the remainder bound of the order-`K` Taylor
/// polynomial of `e^{-iAt}` when `x = ‖A‖t`.
pub fn taylor_tail_bound(x: f64, order: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let k1 = order + 1;
    (k1 as f64 * x.ln() - ln_factorial(k1) + x).exp()
}

/// Smallest `K` whose remainder bound at `x` is at most `eps`.
pub fn taylor_order(x: f64, eps: f64) -> Result<usize> {
    ensure!(eps > 0.0, Config, "target error must be positive");
    (0..=MAX_TAYLOR_ORDER)
        .find(|&k| taylor_tail_bound(x, k) <= eps)
        .ok_or_else(|| Error::Config(format!("no Taylor order up to {MAX_TAYLOR_ORDER} reaches {eps:e}")))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    pub evo_time: f64,
    pub taylor_order: usize,
    pub target_error: f64,
}

impl EvolutionParams {
    /// `t = π/(k·d)` and the least order whose remainder bound is below `eps`.
    pub fn for_oracle(m: &RowOracleMatrix, eps: f64) -> Result<Self> {
        ensure!(eps > 0.0, Config, "target error must be positive");
        let kd = m.norm_bound().max(1.0);
        let evo_time = PI / kd;
        let taylor_order = taylor_order(kd * evo_time, eps)?;
        Ok(Self { evo_time, taylor_order, target_error: eps })
    }
}

fn sparse_apply(rows: &[Vec<Entry>], v: &CVector, scale: Complex64) -> CVector {
    CVector::from_iterator(
        rows.len(),
        rows.iter().map(|row| row.iter().map(|&(j, a)| v[j] * a as f64).sum::<Complex64>() * scale),
    )
}

/// Largest absolute row sum, a bound on the spectral norm of a symmetric
/// matrix.
pub fn row_sum_norm(m: &RowOracleMatrix) -> Result<f64> {
    Ok(max_row_sum(&m.rows()?))
}

fn max_row_sum(rows: &[Vec<Entry>]) -> f64 {
    rows.iter().map(|r| r.iter().map(|&(_, a)| a.abs() as f64).sum::<f64>()).fold(0.0, f64::max)
}

/// `Σ_{j≤K} (-it)^j A^j / j!` by repeated row-oracle products.
///
/// Requires `‖A‖·t ≤ π`, checked against [`row_sum_norm`].
pub fn expm_taylor(m: &RowOracleMatrix, evo_time: f64, order: usize) -> Result<CMatrix> {
    ensure!(evo_time >= 0.0, Contract, "negative evolution time {evo_time}");
    let rows = m.rows()?;
    let norm = max_row_sum(&rows);
    ensure!(norm * evo_time <= PI * (1.0 + 1e-12), Contract, "‖A‖·t = {} exceeds π", norm * evo_time);
    let dim = m.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut term = CVector::zeros(dim);
        term[j] = ONE;
        let mut acc = term.clone();
        for n in 1..=order {
            term = sparse_apply(&rows, &term, Complex64::new(0.0, -evo_time / n as f64));
            acc += &term;
        }
        out.set_column(j, &acc);
    }
    Ok(out)
}

/// Probability of reading 0 on the control of the Hadamard, controlled-`U`,
/// Hadamard circuit applied to `|0⟩ ⊗ |ψ⟩`.
pub fn one_bit_pe(u: &CMatrix, psi: &Statevector) -> Result<f64> {
    ensure!(
        u.nrows() == psi.dim() && u.ncols() == psi.dim(),
        Contract,
        "{}x{} operator on a {}-dimensional state",
        u.nrows(),
        u.ncols(),
        psi.dim()
    );
    let err = unitarity_error(u);
    ensure!(err <= PE_UNITARY_TOL, Contract, "operator is not unitary (error {err:.3e})");
    let n = psi.num_qubits();
    let circuit = QuantumCircuit::with_gates(
        n + 1,
        [Gate::H(0), Gate::controlled_unchecked(vec![0], (1..=n).collect(), u.clone())?, Gate::H(0)],
    )?;
    let state = run_circuit(&circuit, &Statevector::zero(1)?.tensor(psi)?)?;
    Ok(1.0 - state.probability_one(0)?)
}

/// A verifier's witness: a pure state or a density operator on `m` qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Pure(Statevector),
    Mixed(CMatrix),
}

impl Witness {
    pub fn maximally_mixed(m: usize) -> Result<Self> {
        ensure!(m <= MAX_UNITARY_QUBITS, Resource, "{m}-qubit density operator");
        let dim = 1 << m;
        Ok(Witness::Mixed(CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0)))
    }

    pub fn num_qubits(&self) -> Result<usize> {
        match self {
            Witness::Pure(s) => Ok(s.num_qubits()),
            Witness::Mixed(rho) => qubits_for(rho.nrows()),
        }
    }
}

impl From<Statevector> for Witness {
    fn from(s: Statevector) -> Self {
        Witness::Pure(s)
    }
}

fn pure_acceptance(v: &Verifier, psi: &Statevector) -> Result<f64> {
    let input = psi.tensor(&Statevector::zero(v.ancilla_k)?)?;
    run_circuit(&v.circuit, &input)?.probability_one(v.output_qubit)
}

/// Probability that the output qubit reads 1 after the verifier runs on
/// `witness ⊗ |0^k⟩`.
pub fn acceptance_probability(v: &Verifier, witness: &Witness) -> Result<f64> {
    let m = witness.num_qubits()?;
    ensure!(m == v.witness_qubits, Contract, "{m}-qubit witness for a {}-qubit verifier", v.witness_qubits);
    match witness {
        Witness::Pure(psi) => pure_acceptance(v, psi),
        Witness::Mixed(rho) => {
            ensure!(rho.nrows() == rho.ncols(), Contract, "density operator is not square");
            let herm = hermiticity_error(rho);
            ensure!(herm <= 1e-10, Contract, "density operator is not Hermitian (error {herm:.3e})");
            let trace = rho.trace();
            ensure!((trace.re - 1.0).abs() <= 1e-10, Contract, "density operator has trace {trace}");
            let (weights, vectors) = hermitian_eigen(rho)?;
            ensure!(weights[0] >= -1e-10, Contract, "density operator has eigenvalue {}", weights[0]);
            let mut total = 0.0;
            for (j, &w) in weights.iter().enumerate() {
                if w.abs() > 0.0 {
                    let psi = Statevector::from_amplitudes(vectors.column(j).into_owned())?;
                    total += w * pure_acceptance(v, &psi)?;
                }
            }
            Ok(total)
        }
    }
}
