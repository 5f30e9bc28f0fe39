//! Machines and verifiers shipped with the crate.

use crate::error::{Error, Result};
use crate::protocols::Verifier;
use crate::rtm::ReversibleTM;

pub const MACHINE_NAMES: [&str; 3] = ["head_is_one", "double_one", "unary_counter"];

pub const VERIFIER_NAMES: [&str; 5] = ["copy_witness", "entangle", "phase_mix", "rotate_yes", "rotate_no"];

pub const GOLDEN_STEP: &str = include_str!("../../../corpus/golden/double_one_step.json");

fn machine_json(name: &str) -> Option<&'static str> {
    Some(match name {
        "head_is_one" => include_str!("../../../corpus/machines/head_is_one.json"),
        "double_one" => include_str!("../../../corpus/machines/double_one.json"),
        "unary_counter" => include_str!("../../../corpus/machines/unary_counter.json"),
        _ => return None,
    })
}

fn verifier_json(name: &str) -> Option<&'static str> {
    Some(match name {
        "copy_witness" => include_str!("../../../corpus/verifiers/copy_witness.json"),
        "entangle" => include_str!("../../../corpus/verifiers/entangle.json"),
        "phase_mix" => include_str!("../../../corpus/verifiers/phase_mix.json"),
        "rotate_yes" => include_str!("../../../corpus/verifiers/rotate_yes.json"),
        "rotate_no" => include_str!("../../../corpus/verifiers/rotate_no.json"),
        _ => return None,
    })
}

pub fn machine(name: &str) -> Result<ReversibleTM> {
    let json = machine_json(name).ok_or_else(|| Error::Config(format!("no corpus machine {name:?}")))?;
    ReversibleTM::from_json(json)
}

/// Sample inputs listed alongside a corpus machine.
pub fn inputs(name: &str) -> Vec<String> {
    let Some(json) = machine_json(name) else {
        return Vec::new();
    };
    #[derive(serde::Deserialize)]
    struct Listed {
        #[serde(default)]
        inputs: Vec<String>,
    }
    serde_json::from_str::<Listed>(json).map(|l| l.inputs).unwrap_or_default()
}

pub fn verifier(name: &str) -> Result<Verifier> {
    let json = verifier_json(name).ok_or_else(|| Error::Config(format!("no corpus verifier {name:?}")))?;
    Verifier::from_json(json)
}
