//! Matrix instances described in JSON.
//!
//! ```text
//! {"dim": 3, "entries": [[0, 0, 1], [1, 2, 1]]}
//! {"kind": "path", "ell": 8}
//! {"kind": "cycle", "ell": 8}
//! {"kind": "rtm", "machine": "double_one", "input": "11", "space": 3}
//! ```
//!
//! `machine` names a corpus machine or a JSON file, resolved relative to
//! the instance file. `space` is optional and overrides the machine's bound.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::corpus;
use crate::error::{Error, Result};
use crate::rtm::ReversibleTM;
use crate::sparse_oracle::RowOracleMatrix;
use crate::spectral::{path_gap, BlockKind};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InstanceSpec {
    Entries { dim: usize, entries: Vec<(usize, usize, i64)> },
    Machine { kind: MachineKind, machine: String, input: String, space: Option<usize> },
    Block { kind: BlockKind, ell: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineKind {
    Rtm,
}

/// A resolved instance: an adjacency oracle and, for machine instances, the
/// machine and input it came from.
#[derive(Debug, Clone)]
pub struct Instance {
    pub adjacency: RowOracleMatrix,
    pub machine: Option<(ReversibleTM, String)>,
}

impl Instance {
    pub fn from_spec(spec: &InstanceSpec, base: Option<&Path>) -> Result<Self> {
        match spec {
            InstanceSpec::Entries { dim, entries } => {
                Ok(Self { adjacency: RowOracleMatrix::from_entries(*dim, entries)?, machine: None })
            }
            InstanceSpec::Block { kind: BlockKind::Path, ell } => {
                Ok(Self { adjacency: RowOracleMatrix::path_adjacency(*ell)?, machine: None })
            }
            InstanceSpec::Block { kind: BlockKind::Cycle, ell } => {
                Ok(Self { adjacency: RowOracleMatrix::cycle_adjacency(*ell)?, machine: None })
            }
            InstanceSpec::Machine { machine, input, space, .. } => {
                let mut m = resolve_machine(machine, base)?;
                if let Some(s) = space {
                    m = m.with_space(*s)?;
                }
                Ok(Self { adjacency: m.augmented_adjacency(input)?, machine: Some((m, input.clone())) })
            }
        }
    }

    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?, base)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path)?, path.parent())
    }

    /// `Aᵀ A` and a gap exponent valid for it. Machine instances use the
    /// configuration-graph reduction; the others use the path-block bound
    /// at their dimension.
    pub fn gapped(&self) -> Result<(RowOracleMatrix, u32)> {
        if let Some((m, input)) = &self.machine {
            let g = m.reduce_to_gapped(input)?;
            return Ok((g.matrix, g.gap_exponent));
        }
        let bound = path_gap(self.adjacency.dim());
        let g = (-bound.log2()).ceil().max(0.0) as u32;
        Ok((self.adjacency.ata_oracle()?, g))
    }
}

fn resolve_machine(name: &str, base: Option<&Path>) -> Result<ReversibleTM> {
    if corpus::MACHINE_NAMES.contains(&name) {
        return corpus::machine(name);
    }
    let path: PathBuf = match base {
        Some(dir) => dir.join(name),
        None => PathBuf::from(name),
    };
    if !path.exists() {
        return Err(Error::Config(format!("machine {name:?} is neither a corpus name nor a file")));
    }
    ReversibleTM::load(path)
}
