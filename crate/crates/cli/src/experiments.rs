use expgap_core::corpus;
use expgap_core::instance::Instance;
use expgap_core::protocols::{
    accept_operator, binary_search_energy, decide_gapped, kitaev_hamiltonian, nwz_amplify, AmplificationParams,
    Decision, Verifier,
};
use expgap_core::simulator::{to_complex, CMatrix, Statevector};
use expgap_core::spectral::{
    det_cycle_cover, det_sparse, hermitian_eigen, min_eigenvalue_sparse, path_gap, spectrum_report, CYCLE_COVER_MAX_DIM,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, ExperimentConfig, Params};
use crate::error::CliError;
use crate::report::{to_json_string, Report};

/// Largest clock instance whose spectrum `kitaev` reports.
const KITAEV_SPECTRUM_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    PromiseViolated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub status: Status,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome { report, status: Status::Ok }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = &cfg.params;
    match cfg.command {
        Command::Spectrum => spectrum(p),
        Command::Det => det(p),
        Command::Reduce => reduce(p),
        Command::Verify => verify(p),
        Command::Amplify => amplify(p),
        Command::Kitaev => kitaev(p),
        Command::Energy => energy(p),
    }
}

fn require<'a>(value: &'a Option<String>, flag: &str, command: Command) -> Result<&'a str, CliError> {
    value.as_deref().ok_or_else(|| CliError::Usage(format!("{command} needs --{flag}")))
}

fn load_instance(s: &str) -> Result<Instance, CliError> {
    if s.trim_start().starts_with('{') {
        Ok(Instance::from_json(s, None)?)
    } else {
        Ok(Instance::load(s)?)
    }
}

fn load_verifier(s: &str) -> Result<Verifier, CliError> {
    if corpus::VERIFIER_NAMES.contains(&s) {
        Ok(corpus::verifier(s)?)
    } else {
        Ok(Verifier::load(s)?)
    }
}

fn spectrum(p: &Params) -> Result<Outcome, CliError> {
    let ell = p.ell();
    let s = spectrum_report(p.kind(), ell)?;
    let closed = s.closed_form.unwrap_or_default();
    let mut report = Report::new("spectrum", &["ell", "k", "closed_form", "eigensolver", "abs_err"]);
    for (k, (c, e)) in closed.iter().zip(&s.eigenvalues).enumerate() {
        report.push(vec![ell.into(), (k + 1).into(), (*c).into(), (*e).into(), (c - e).abs().into()]);
    }
    Ok(Outcome::ok(report))
}

fn det(p: &Params) -> Result<Outcome, CliError> {
    let inst = load_instance(require(&p.instance, "instance", Command::Det)?)?;
    let a = &inst.adjacency;
    let cycle_cover =
        if a.dim() <= CYCLE_COVER_MAX_DIM { Some(det_cycle_cover(a.materialize()?.entries())?) } else { None };
    let mut report = Report::new("det", &["dim", "det", "det_cycle_cover"]);
    report.push(vec![a.dim().into(), det_sparse(a)?.into(), cycle_cover.into()]);
    Ok(Outcome::ok(report))
}

fn reduce(p: &Params) -> Result<Outcome, CliError> {
    let inst = load_instance(require(&p.instance, "instance", Command::Reduce)?)?;
    let accepted = match &inst.machine {
        Some((m, input)) => Some(m.simulate(input)?.accepted),
        None => None,
    };
    let det = det_sparse(&inst.adjacency)?;
    let (ata, g) = inst.gapped()?;
    let mut report =
        Report::new("reduce", &["dim", "accepted", "det", "gapped_yes", "gap_exponent", "gap_bound", "min_eigenvalue"]);
    report.push(vec![
        inst.adjacency.dim().into(),
        accepted.into(),
        det.into(),
        (det == 0).into(),
        g.into(),
        path_gap(inst.adjacency.dim()).into(),
        min_eigenvalue_sparse(&ata)?.into(),
    ]);
    Ok(Outcome::ok(report))
}

fn verify(p: &Params) -> Result<Outcome, CliError> {
    let inst = load_instance(require(&p.instance, "instance", Command::Verify)?)?;
    let (ata, g) = inst.gapped()?;
    let g = p.g.unwrap_or(g);
    let d = decide_gapped(&ata, g)?;
    let mut report = Report::new(
        "verify",
        &[
            "decision",
            "acceptance",
            "threshold",
            "completeness",
            "soundness",
            "separation",
            "epsilon",
            "evo_time",
            "taylor_order",
            "gap_exponent",
            "min_eigenvalue",
        ],
    );
    report.push(vec![
        (if d.yes { "yes" } else { "no" }).into(),
        d.acceptance.into(),
        d.threshold.into(),
        d.completeness_bound.into(),
        d.soundness_bound.into(),
        d.separation.into(),
        d.epsilon.into(),
        d.evo_time.into(),
        d.taylor_order.into(),
        g.into(),
        d.min_eigenvalue.into(),
    ]);
    Ok(Outcome::ok(report))
}

fn witness(v: &Verifier, spec: &str, seed: u64) -> Result<Statevector, CliError> {
    let m = v.witness_qubits;
    if spec == "best" {
        let (_, vectors) = hermitian_eigen(&accept_operator(v)?.matrix)?;
        return Ok(Statevector::from_amplitudes(vectors.column(vectors.ncols() - 1).into_owned())?);
    }
    if spec == "random" {
        return Ok(Statevector::random(m, &mut ChaCha8Rng::seed_from_u64(seed))?);
    }
    if let Some(index) = spec.strip_prefix("basis:") {
        let i: usize = index.parse().map_err(|_| CliError::Usage(format!("bad basis index {index:?}")))?;
        return Ok(Statevector::basis(m, i)?);
    }
    Err(CliError::Usage(format!("witness must be best, random or basis:<i>, got {spec:?}")))
}

fn amplify(p: &Params) -> Result<Outcome, CliError> {
    let v = load_verifier(require(&p.verifier, "verifier", Command::Amplify)?)?;
    let params = AmplificationParams::for_verifier(&v, p.trials(), p.precision_bits())?;
    let psi = witness(&v, p.witness(), p.seed())?;
    let o = nwz_amplify(&v, &params, &psi)?;
    let decision = match o.decision {
        Decision::Yes => "yes",
        Decision::No => "no",
        Decision::PromiseViolated => "promise_violated",
    };
    let mut report = Report::new(
        "amplify",
        &["verifier", "witness", "r", "precision_bits", "decision", "probability", "p_yes", "p_no", "p_violation"],
    );
    report.push(vec![
        v.name.as_str().into(),
        p.witness().into(),
        params.trials_r.into(),
        params.precision_bits.into(),
        decision.into(),
        o.probability.into(),
        o.p_yes.into(),
        o.p_no.into(),
        o.p_violation.into(),
    ]);
    let status = if o.decision == Decision::PromiseViolated { Status::PromiseViolated } else { Status::Ok };
    Ok(Outcome { report, status })
}

fn kitaev(p: &Params) -> Result<Outcome, CliError> {
    let v = load_verifier(require(&p.verifier, "verifier", Command::Kitaev)?)?;
    let inst = kitaev_hamiltonian(&v)?;
    if let Some(path) = &p.emit {
        std::fs::write(path, to_json_string(&inst.to_json()))?;
    }
    let lambda_min = if inst.num_qubits <= KITAEV_SPECTRUM_QUBITS {
        Some(hermitian_eigen(&inst.materialize()?)?.0[0])
    } else {
        None
    };
    let mut report =
        Report::new("kitaev", &["qubits", "gate_count", "locality", "terms", "a", "b", "gap_ok", "lambda_min"]);
    report.push(vec![
        inst.num_qubits.into(),
        inst.gate_count.into(),
        inst.locality.into(),
        inst.terms.len().into(),
        inst.threshold_a.into(),
        inst.threshold_b.into(),
        inst.gap_ok().into(),
        lambda_min.into(),
    ]);
    Ok(Outcome::ok(report))
}

fn energy(p: &Params) -> Result<Outcome, CliError> {
    let h: CMatrix = match (&p.verifier, &p.instance) {
        (Some(v), _) => kitaev_hamiltonian(&load_verifier(v)?)?.materialize()?,
        (None, Some(i)) => {
            let (ata, _) = load_instance(i)?.gapped()?;
            to_complex(&ata.materialize()?.to_f64())
        }
        (None, None) => return Err(CliError::Usage("energy needs --verifier or --instance".into())),
    };
    let bits = p.bits();
    let s = binary_search_energy(&h, bits)?;
    let mut report = Report::new("energy", &["bits", "estimate", "lower", "upper", "iterations"]);
    report.push(vec![bits.into(), s.estimate().into(), s.lower.into(), s.upper.into(), (s.widths.len() - 1).into()]);
    Ok(Outcome::ok(report))
}
