use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{normal_eigen, reflections, Verifier};
use crate::error::{ensure, Result};
use crate::simulator::{CMatrix, CVector, Gate, QuantumCircuit, Statevector};

/// Extra phase-estimation qubits beyond `precision_bits`.
pub const EXTRA_PRECISION_QUBITS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationParams {
    pub trials_r: usize,
    pub precision_bits: usize,
    pub threshold_phi_c: f64,
    pub threshold_phi_s: f64,
}

impl AmplificationParams {
    /// `φ = arccos(√p)/π` at `p = c` and `p = s`.
    pub fn new(c: f64, s: f64, trials_r: usize, precision_bits: usize) -> Result<Self> {
        ensure!(0.0 <= s && s < c && c <= 1.0, Config, "need 0 <= s < c <= 1, got c = {c}, s = {s}");
        ensure!(trials_r >= 1, Config, "need at least one trial");
        ensure!((1..=10).contains(&precision_bits), Config, "precision of {precision_bits} bits");
        let params = Self {
            trials_r,
            precision_bits,
            threshold_phi_c: c.sqrt().acos() / PI,
            threshold_phi_s: s.sqrt().acos() / PI,
        };
        ensure!(
            params.resolution() < (params.threshold_phi_s - params.threshold_phi_c) / 4.0,
            Config,
            "{precision_bits} bits cannot separate φ_c = {} from φ_s = {}",
            params.threshold_phi_c,
            params.threshold_phi_s
        );
        Ok(params)
    }

    pub fn for_verifier(v: &Verifier, trials_r: usize, precision_bits: usize) -> Result<Self> {
        Self::new(v.completeness_c, v.soundness_s, trials_r, precision_bits)
    }

    pub fn resolution(&self) -> f64 {
        (-(self.precision_bits as f64)).exp2()
    }

    pub fn register_qubits(&self) -> usize {
        self.precision_bits + EXTRA_PRECISION_QUBITS
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    PromiseViolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationOutcome {
    pub decision: Decision,
    /// Probability of the reported decision.
    pub probability: f64,
    pub p_yes: f64,
    pub p_no: f64,
    pub p_violation: f64,
}

/// Per-trial probabilities of landing in the YES window, between the
/// windows, and in the NO window.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TrialClasses {
    yes: f64,
    middle: f64,
    no: f64,
}

/// Inverse quantum Fourier transform on qubits `0..b`, qubit 0 most
/// significant.
fn inverse_qft(b: usize) -> Result<Vec<Gate>> {
    let mut forward = Vec::new();
    for j in 0..b {
        forward.push(Gate::H(j));
        for k in j + 1..b {
            let phase = Complex64::from_polar(1.0, 2.0 * PI / (1u64 << (k - j + 1)) as f64);
            let diag = CMatrix::from_diagonal(&CVector::from_vec(vec![Complex64::new(1.0, 0.0), phase]));
            forward.push(Gate::controlled(vec![k], vec![j], diag)?);
        }
    }
    for j in 0..b / 2 {
        let (x, y) = (j, b - 1 - j);
        forward.extend([
            Gate::Cnot { control: x, target: y },
            Gate::Cnot { control: y, target: x },
            Gate::Cnot { control: x, target: y },
        ]);
    }
    Ok(forward.into_iter().rev().map(|g| adjoint(&g)).collect())
}

fn adjoint(g: &Gate) -> Gate {
    match g {
        Gate::Unitary { controls, targets, matrix } => {
            Gate::Unitary { controls: controls.clone(), targets: targets.clone(), matrix: matrix.adjoint() }
        }
        other => other.clone(),
    }
}

/// Outcome distribution of phase estimation of `w` on `|0^b⟩ ⊗ |e⟩`, with
/// the register simulated gate by gate.
fn phase_estimation_distribution(w: &CMatrix, e: &CVector, b: usize) -> Result<Vec<f64>> {
    let n = w.nrows().trailing_zeros() as usize;
    let total = b + n;
    let mut circuit = QuantumCircuit::new(total)?;
    for j in 0..b {
        circuit.push(Gate::H(j))?;
    }
    let system: Vec<usize> = (b..total).collect();
    let mut power = w.clone();
    for j in (0..b).rev() {
        circuit.push(Gate::controlled(vec![j], system.clone(), power.clone())?)?;
        power = &power * &power;
    }
    for g in inverse_qft(b)? {
        circuit.push(g)?;
    }
    let input = Statevector::zero(b)?.tensor(&Statevector::from_amplitudes(e.clone())?)?;
    let mut state = input;
    circuit.apply(&mut state)?;
    state.marginal(&(0..b).collect::<Vec<_>>())
}

fn classify(dist: &[f64], params: &AmplificationParams) -> TrialClasses {
    let size = dist.len();
    let slack = params.resolution();
    let mut classes = TrialClasses { yes: 0.0, middle: 0.0, no: 0.0 };
    for (y, &p) in dist.iter().enumerate() {
        let folded = y.min(size - y) as f64 / size as f64;
        if folded <= params.threshold_phi_c + slack {
            classes.yes += p;
        } else if folded >= params.threshold_phi_s - slack {
            classes.no += p;
        } else {
            classes.middle += p;
        }
    }
    classes
}

/// Decision probabilities of the median of `r` independent trials. The
/// median is the lower one for even `r`.
fn median_outcome(c: TrialClasses, r: usize) -> (f64, f64, f64) {
    let rank = r.div_ceil(2);
    let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    let (mut yes, mut no, mut mid) = (0.0, 0.0, 0.0);
    for ny in 0..=r {
        for nn in 0..=r - ny {
            let nm = r - ny - nn;
            let p = binom(r, ny)
                * binom(r - ny, nn)
                * c.yes.powi(ny as i32)
                * c.no.powi(nn as i32)
                * c.middle.powi(nm as i32);
            if ny >= rank {
                yes += p;
            } else if ny + nm < rank {
                no += p;
            } else {
                mid += p;
            }
        }
    }
    (yes, no, mid)
}

/// Eigenvectors of `R1 R0` with their decision probabilities.
struct Spectrum {
    vectors: CMatrix,
    outcomes: Vec<(f64, f64, f64)>,
}

fn spectrum(v: &Verifier, params: &AmplificationParams) -> Result<Spectrum> {
    let (r0, r1) = reflections(v)?;
    let w = r1 * r0;
    let (_, vectors) = normal_eigen(&w)?;
    let b = params.register_qubits();
    let outcomes = (0..vectors.ncols())
        .map(|j| {
            let dist = phase_estimation_distribution(&w, &vectors.column(j).into_owned(), b)?;
            Ok(median_outcome(classify(&dist, params), params.trials_r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum { vectors, outcomes })
}

fn embed(v: &Verifier, psi: &Statevector) -> Result<CVector> {
    ensure!(
        psi.num_qubits() == v.witness_qubits,
        Contract,
        "{}-qubit witness for a {}-qubit verifier",
        psi.num_qubits(),
        v.witness_qubits
    );
    Ok(psi.tensor(&Statevector::zero(v.ancilla_k)?)?.amplitudes().clone())
}

/// `r` rounds of phase estimation of `R1 R0` on `|ψ⟩ ⊗ |0^k⟩`, deciding on
/// the median folded phase.
///
/// Trials act independently on each eigenvector of `R1 R0`, so the exact
/// decision distribution is the `|⟨e|ψ,0⟩|²`-weighted mixture of
/// per-eigenvector medians. A trial counts toward YES when its folded phase
/// is at most `φ_c` plus one unit of precision and toward NO when it is at
/// least `φ_s` minus one unit.
pub fn nwz_amplify(v: &Verifier, params: &AmplificationParams, witness: &Statevector) -> Result<AmplificationOutcome> {
    let input = embed(v, witness)?;
    let spec = spectrum(v, params)?;
    let (mut p_yes, mut p_no, mut p_violation) = (0.0, 0.0, 0.0);
    for (j, (yes, no, mid)) in spec.outcomes.iter().enumerate() {
        let weight = spec.vectors.column(j).dotc(&input).norm_sqr();
        p_yes += weight * yes;
        p_no += weight * no;
        p_violation += weight * mid;
    }
    let (decision, probability) = if p_yes >= p_no && p_yes >= p_violation {
        (Decision::Yes, p_yes)
    } else if p_no >= p_violation {
        (Decision::No, p_no)
    } else {
        (Decision::PromiseViolated, p_violation)
    };
    Ok(AmplificationOutcome { decision, probability, p_yes, p_no, p_violation })
}

/// The operator `P` on the witness space with `⟨ψ|P|ψ⟩` equal to the
/// YES-decision probability of [`nwz_amplify`] on `ψ`.
pub fn yes_operator(v: &Verifier, params: &AmplificationParams) -> Result<CMatrix> {
    let spec = spectrum(v, params)?;
    let dim = 1 << v.witness_qubits;
    let stride = 1 << v.ancilla_k;
    let mut p = CMatrix::zeros(dim, dim);
    for (e, (yes, _, _)) in spec.outcomes.iter().enumerate() {
        let beta: Vec<Complex64> = (0..dim).map(|j| spec.vectors[(j * stride, e)]).collect();
        for i in 0..dim {
            for j in 0..dim {
                p[(i, j)] += beta[i] * beta[j].conj() * yes;
            }
        }
    }
    Ok(p)
}
