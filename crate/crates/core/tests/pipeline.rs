use expgap_core::corpus;
use expgap_core::instance::Instance;
use expgap_core::protocols::{accept_operator, binary_search_energy, decide_gapped, kitaev_hamiltonian, Verifier};
use expgap_core::simulator::{CMatrix, QuantumCircuit, Statevector};
use expgap_core::spectral::{det_sparse, hermitian_eigen};
use nalgebra::DMatrix;
use num_complex::Complex64;

#[test]
fn instance_file_to_gapped_decision() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    std::fs::write(&path, r#"{"kind": "rtm", "machine": "double_one", "input": "1", "space": 3}"#).unwrap();
    let inst = Instance::load(&path).unwrap();
    // "1" is rejected, so the adjacency is singular and the Gram matrix has a kernel.
    assert_eq!(det_sparse(&inst.adjacency).unwrap(), 0);
    let (ata, g) = inst.gapped().unwrap();
    let d = decide_gapped(&ata, g).unwrap();
    assert!(d.yes);
    assert!(d.min_eigenvalue.abs() < 1e-10);
}

#[test]
fn accepting_run_is_a_gapped_no() {
    let inst = Instance::from_json(r#"{"kind": "rtm", "machine": "double_one", "input": "11"}"#, None).unwrap();
    assert_eq!(det_sparse(&inst.adjacency).unwrap().abs(), 1);
    let (ata, g) = inst.gapped().unwrap();
    assert!(!decide_gapped(&ata, g).unwrap().yes);
}

#[test]
fn machine_file_relative_to_instance() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    std::fs::write(
        dir.join("m.json"),
        r#"{"states": ["s", "a"], "start": "s", "accept": "a", "alphabet": ["_", "1"], "blank": "_",
            "space": 2, "transitions": [["s", "1", "a", "1", "S"]]}"#,
    )
    .unwrap();
    std::fs::write(dir.join("i.json"), r#"{"kind": "rtm", "machine": "m.json", "input": "1"}"#).unwrap();
    let inst = Instance::load(dir.join("i.json")).unwrap();
    assert_eq!(det_sparse(&inst.adjacency).unwrap().abs(), 1);
}

#[test]
fn verifier_survives_json_round_trip() {
    for name in corpus::VERIFIER_NAMES {
        let v = corpus::verifier(name).unwrap();
        let back = Verifier::from_json(&v.to_json().to_string()).unwrap();
        let (a, b) = (accept_operator(&v).unwrap(), accept_operator(&back).unwrap());
        assert!((a.matrix - b.matrix).iter().all(|z| z.norm() < 1e-15), "{name}");
    }
}

#[test]
fn random_circuit_round_trip_preserves_action() {
    let c = QuantumCircuit::random(4, 60, 7).unwrap();
    let back = QuantumCircuit::from_json(&c.to_json().to_string()).unwrap();
    let psi = Statevector::basis(4, 5).unwrap();
    let mut a = psi.clone();
    let mut b = psi;
    c.apply(&mut a).unwrap();
    back.apply(&mut b).unwrap();
    assert!((a.inner(&b).norm() - 1.0).abs() < 1e-12);
}

#[test]
fn energy_search_on_complex_hermitian() {
    // σ_y has eigenvalues ±1; 0.5·I + σ_y ⊗ Z shifts them to -0.5 and 1.5.
    let i = Complex64::i();
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let sy = CMatrix::from_row_slice(2, 2, &[z, -i, i, z]);
    let pz = CMatrix::from_row_slice(2, 2, &[one, z, z, -one]);
    let h = sy.kronecker(&pz) + CMatrix::identity(4, 4) * Complex64::new(0.5, 0.0);
    let s = binary_search_energy(&h, 30).unwrap();
    assert!((s.estimate() + 0.5).abs() <= (-30f64).exp2() + 1e-10);
}

#[test]
fn energy_search_on_clock_hamiltonian() {
    let v = corpus::verifier("rotate_yes").unwrap();
    let h = kitaev_hamiltonian(&v).unwrap().materialize().unwrap();
    let exact = hermitian_eigen(&h).unwrap().0[0];
    let s = binary_search_energy(&h, 30).unwrap();
    assert!(s.lower <= exact && exact <= s.upper);
}

#[test]
fn dense_cap_refuses_oversized_materialization() {
    let m = expgap_core::RowOracleMatrix::identity(64).unwrap();
    assert!(m.materialize_with_cap(32).is_err());
    let d = m.materialize_with_cap(64).unwrap();
    assert_eq!(d.entries(), &DMatrix::<i64>::identity(64, 64));
}
