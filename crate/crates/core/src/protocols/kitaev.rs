use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive};
use num_complex::Complex64;
use serde_json::{json, Value};

use super::Verifier;
use crate::error::{ensure, Error, Result};
use crate::simulator::{CMatrix, Gate, QuantumCircuit, MAX_UNITARY_QUBITS};

pub const MAX_CLOCK_GATES: usize = 6;
pub const MAX_COMPUTATION_QUBITS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    pub label: String,
    pub qubits: Vec<usize>,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreciseLHInstance {
    pub num_qubits: usize,
    pub computation_qubits: usize,
    pub gate_count: usize,
    pub terms: Vec<LocalTerm>,
    pub threshold_a: f64,
    pub threshold_b: f64,
    pub exact_a: BigRational,
    pub exact_b: BigRational,
    pub locality: usize,
}

impl PreciseLHInstance {
    pub fn gap_ok(&self) -> bool {
        self.exact_b > self.exact_a
    }

    /// The full `2^n × 2^n` Hamiltonian.
    pub fn materialize(&self) -> Result<CMatrix> {
        ensure!(self.num_qubits <= MAX_UNITARY_QUBITS, Resource, "{} qubits exceeds the dense cap", self.num_qubits);
        let n = self.num_qubits;
        let dim = 1 << n;
        let mut h = CMatrix::zeros(dim, dim);
        for term in &self.terms {
            let k = term.qubits.len();
            let bits: Vec<usize> = term.qubits.iter().map(|&q| 1 << (n - 1 - q)).collect();
            let mask: usize = bits.iter().sum();
            let spread =
                |local: usize| -> usize { (0..k).filter(|&b| (local >> (k - 1 - b)) & 1 == 1).map(|b| bits[b]).sum() };
            let offsets: Vec<usize> = (0..1 << k).map(spread).collect();
            for base in (0..dim).filter(|i| i & mask == 0) {
                for (r, &ro) in offsets.iter().enumerate() {
                    for (c, &co) in offsets.iter().enumerate() {
                        let v = term.matrix[(r, c)];
                        if v != Complex64::new(0.0, 0.0) {
                            h[(base + ro, base + co)] += v;
                        }
                    }
                }
            }
        }
        Ok(h)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                let rows: Vec<Value> = (0..t.matrix.nrows())
                    .map(|r| (0..t.matrix.ncols()).map(|c| json!([t.matrix[(r, c)].re, t.matrix[(r, c)].im])).collect())
                    .collect();
                json!({ "label": t.label, "qubits": t.qubits, "matrix": rows })
            })
            .collect();
        json!({
            "qubits": self.num_qubits,
            "locality": self.locality,
            "terms": terms,
            "a": self.threshold_a,
            "b": self.threshold_b,
            "a_exact": self.exact_a.to_string(),
            "b_exact": self.exact_b.to_string(),
        })
    }
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Config(format!("{x} has no exact rational value")))
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The gate as a dense matrix on its own qubits, listed controls first.
fn local_gate(g: &Gate) -> Result<(Vec<usize>, CMatrix)> {
    let qubits = g.qubits();
    let (controls, targets, matrix) = g.parts();
    let pos = |q: &usize| qubits.iter().position(|x| x == q).unwrap_or(0);
    let local =
        Gate::controlled_unchecked(controls.iter().map(pos).collect(), targets.iter().map(pos).collect(), matrix)?;
    Ok((qubits.clone(), QuantumCircuit::with_gates(qubits.len(), [local])?.unitary()?))
}

fn diagonal_term(label: String, qubits: Vec<usize>, diag: &[f64]) -> LocalTerm {
    let d = nalgebra::DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
    LocalTerm { label, qubits, matrix: CMatrix::from_diagonal(&d) }
}

/// Kitaev's clock construction with a unary clock `c_1 … c_T` placed after
/// the computation qubits. Clock time `t` is the state with `c_1 … c_t` set.
///
/// ```text
/// H_in    = Σ_ancilla |1⟩⟨1|_a ⊗ |0⟩⟨0|_{c1}
/// H_out   = |0⟩⟨0|_out ⊗ |1⟩⟨1|_{cT}
/// H_clock = Σ_t |0⟩⟨0|_{ct} ⊗ |1⟩⟨1|_{c(t+1)}
/// H_t     = ½ |1⟩⟨1|_{c(t-1)} ⊗ [I − U_t ⊗ |1⟩⟨0|_{ct} − U_t† ⊗ |0⟩⟨1|_{ct}] ⊗ |0⟩⟨0|_{c(t+1)}
/// ```
///
/// The neighbouring clock projectors are dropped at `t = 1` and `t = T`.
pub fn kitaev_hamiltonian(v: &Verifier) -> Result<PreciseLHInstance> {
    let t_count = v.gate_count_t();
    let n = v.num_qubits();
    ensure!(t_count >= 1, Contract, "clock construction needs at least one gate");
    ensure!(t_count <= MAX_CLOCK_GATES, Resource, "{t_count} gates exceeds the {MAX_CLOCK_GATES}-gate cap");
    ensure!(n <= MAX_COMPUTATION_QUBITS, Resource, "{n} qubits exceeds the {MAX_COMPUTATION_QUBITS}-qubit cap");
    let clock = |t: usize| n + t - 1;
    let mut terms = Vec::new();

    for a in v.witness_qubits..n {
        terms.push(diagonal_term(format!("in[{a}]"), vec![a, clock(1)], &[0.0, 0.0, 1.0, 0.0]));
    }
    terms.push(diagonal_term("out".into(), vec![v.output_qubit, clock(t_count)], &[0.0, 1.0, 0.0, 0.0]));
    for t in 1..t_count {
        terms.push(diagonal_term(format!("clock[{t}]"), vec![clock(t), clock(t + 1)], &[0.0, 1.0, 0.0, 0.0]));
    }

    for (idx, gate) in v.circuit.gates().iter().enumerate() {
        let t = idx + 1;
        let (gate_qubits, u) = local_gate(gate)?;
        ensure!(gate_qubits.len() <= 2, Resource, "gate {t} acts on {} qubits", gate_qubits.len());
        let g = gate_qubits.len();
        let has_prev = t > 1;
        let has_next = t < t_count;
        let mut qubits = gate_qubits;
        if has_prev {
            qubits.push(clock(t - 1));
        }
        qubits.push(clock(t));
        if has_next {
            qubits.push(clock(t + 1));
        }
        let clock_bits = usize::from(has_prev) + 1 + usize::from(has_next);
        let size = 1 << (g + clock_bits);
        let split = |i: usize| {
            let gate_part = i >> clock_bits;
            let mut rest = i & ((1 << clock_bits) - 1);
            let next = if has_next {
                let b = rest & 1;
                rest >>= 1;
                Some(b)
            } else {
                None
            };
            let current = rest & 1;
            rest >>= 1;
            let prev = if has_prev { Some(rest & 1) } else { None };
            (gate_part, prev, current, next)
        };
        let mut matrix = CMatrix::zeros(size, size);
        for r in 0..size {
            let (gr, pr, cr, nr) = split(r);
            for c in 0..size {
                let (gc, pc, cc, nc) = split(c);
                if pr != pc || pr == Some(0) || nr != nc || nr == Some(1) {
                    continue;
                }
                let mut val = Complex64::new(0.0, 0.0);
                if gr == gc && cr == cc {
                    val += 1.0;
                }
                if cr == 1 && cc == 0 {
                    val -= u[(gr, gc)];
                }
                if cr == 0 && cc == 1 {
                    val -= u[(gc, gr)].conj();
                }
                matrix[(r, c)] = val * 0.5;
            }
        }
        terms.push(LocalTerm { label: format!("prop[{t}]"), qubits, matrix });
    }

    let locality = terms.iter().map(|t| t.qubits.len()).max().unwrap_or(0);
    let one = BigRational::one();
    let t_big = BigRational::from_integer(BigInt::from(t_count));
    let exact_a = (&one - exact(v.completeness_c)?) / (&t_big + &one);
    let exact_b = (&one - exact(v.soundness_s)?) / (&t_big * &t_big * &t_big);
    Ok(PreciseLHInstance {
        num_qubits: n + t_count,
        computation_qubits: n,
        gate_count: t_count,
        terms,
        threshold_a: ratio_to_f64(&exact_a),
        threshold_b: ratio_to_f64(&exact_b),
        exact_a,
        exact_b,
        locality,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreciseBounds {
    pub a: f64,
    pub b: f64,
    pub exact_a: BigRational,
    pub exact_b: BigRational,
    pub gap_ok: bool,
}

/// `a = (1−c)/(T+1)` and `b = (1−s)/T³` under `1 − c = ε` and
/// `1 − s = 2^{-g'} − ε`, compared exactly.
pub fn precise_lh_bounds(gate_count: usize, epsilon: f64, g_prime: u32) -> Result<PreciseBounds> {
    ensure!(gate_count >= 1, Config, "gate count must be positive");
    ensure!(epsilon >= 0.0, Config, "ε must be nonnegative");
    let eps = exact(epsilon)?;
    let t = BigRational::from_integer(BigInt::from(gate_count));
    let one = BigRational::one();
    let gap = BigRational::new(BigInt::one(), BigInt::one() << g_prime as usize);
    let exact_a = &eps / (&t + &one);
    let exact_b = (&gap - &eps) / (&t * &t * &t);
    Ok(PreciseBounds {
        a: ratio_to_f64(&exact_a),
        b: ratio_to_f64(&exact_b),
        gap_ok: exact_b > exact_a,
        exact_a,
        exact_b,
    })
}

/// Largest `ε = 2^{-j}` with `ε (T² + 1) < 2^{-g'}`.
pub fn epsilon_rule(gate_count: usize, g_prime: u32) -> f64 {
    let factor = (gate_count * gate_count + 1) as u64;
    let extra = (0u32..).find(|&e| factor < 1u64 << e).unwrap_or(63);
    (-((g_prime + extra) as f64)).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::protocols::accept_operator;
    use crate::simulator::hermiticity_error;
    use crate::spectral::hermitian_eigen;

    fn identity_verifier(c: f64) -> Verifier {
        let id = CMatrix::identity(2, 2);
        let circuit = QuantumCircuit::with_gates(1, [Gate::unitary(vec![0], id).unwrap()]).unwrap();
        Verifier::new("identity", circuit, 1, 0, 0, c, 0.0).unwrap()
    }

    #[test]
    fn single_identity_gate() {
        let v = identity_verifier(1.0);
        let inst = kitaev_hamiltonian(&v).unwrap();
        let h = inst.materialize().unwrap();
        let (values, _) = hermitian_eigen(&h).unwrap();
        assert!(values[0] >= -1e-10);
        assert!(values[0] <= inst.threshold_a + 1e-10);
        assert_eq!(inst.threshold_a, 0.0);
    }

    #[test]
    fn history_state_bound_on_corpus() {
        for name in corpus::VERIFIER_NAMES {
            let v = corpus::verifier(name).unwrap();
            if v.gate_count_t() == 0 || v.gate_count_t() > MAX_CLOCK_GATES {
                continue;
            }
            let inst = kitaev_hamiltonian(&v).unwrap();
            assert!(inst.locality <= 5);
            assert!(inst.terms.iter().all(|t| t.qubits.len() <= 5));
            let h = inst.materialize().unwrap();
            assert!(hermiticity_error(&h) <= 1e-12);
            let best = *accept_operator(&v).unwrap().eigenvalues().unwrap().last().unwrap();
            let (values, _) = hermitian_eigen(&h).unwrap();
            assert!(values[0] >= -1e-10, "{name}");
            let bound = (1.0 - best) / (inst.gate_count as f64 + 1.0);
            assert!(values[0] <= bound + 1e-10, "{name}: {} > {bound}", values[0]);
        }
    }

    #[test]
    fn exact_thresholds() {
        let v = identity_verifier(0.75);
        let inst = kitaev_hamiltonian(&v).unwrap();
        assert_eq!(inst.exact_a, BigRational::new(BigInt::from(1), BigInt::from(8)));
        assert_eq!(inst.exact_b, BigRational::one());
        assert!(inst.gap_ok());
    }

    #[test]
    fn bounds_limits() {
        let ideal = precise_lh_bounds(5, 0.0, 10).unwrap();
        assert!(ideal.gap_ok);
        assert_eq!(ideal.exact_b, BigRational::new(BigInt::from(1), BigInt::from(1024 * 125)));
        let too_large = precise_lh_bounds(5, (-10f64).exp2(), 10).unwrap();
        assert!(!too_large.gap_ok);
        for t in 1..=6 {
            let eps = epsilon_rule(t, 20);
            assert!(eps * ((t * t + 1) as f64) < (-20f64).exp2());
            assert!(2.0 * eps * ((t * t + 1) as f64) >= (-20f64).exp2());
            assert!(precise_lh_bounds(t, eps, 20).unwrap().gap_ok);
        }
    }

    #[test]
    fn caps() {
        let circuit = QuantumCircuit::random(2, 7, 1).unwrap();
        let v = Verifier::new("long", circuit, 1, 1, 1, 0.9, 0.1).unwrap();
        assert!(matches!(kitaev_hamiltonian(&v), Err(Error::Resource(_))));
    }
}
